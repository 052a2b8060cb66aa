// driftsim command line: generate the object database, run or sweep
// experiments, emit and analyze root traces.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "driftsim/analysis.hpp"
#include "driftsim/config_io.hpp"
#include "driftsim/errors.hpp"
#include "driftsim/experiment.hpp"
#include "driftsim/report.hpp"

namespace fs = std::filesystem;
using namespace driftsim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::string policy;
    std::string protocol;
    std::string h_list;
    uint64_t seed = 0;
    bool seed_set = false;
    bool trace_pages = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_out = true) {
    cmd->set_help_flag("--help", "print help"); // frees -h for the --h option
    cmd->add_option("--config", o.config_path, "configuration file");
    cmd->add_option("--seed", o.seed, "run seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--policy", o.policy, "clustering policy (comma list for sweep)");
    cmd->add_option("--protocol", o.protocol, "regional protocol");
    cmd->add_option("--h", o.h_list, "change rate (comma list for sweep)");
    if (with_out) cmd->add_option("--out", o.out_dir, "output directory");
}

std::vector<double> parse_h_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("--h", "not a number: " + item);
        }
    }
    return out;
}

std::vector<PolicyKind> parse_policy_list(const std::string& s) {
    std::vector<PolicyKind> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(policy_kind_from(item));
    return out;
}

ExperimentConfig load_config(const CommonOpts& o) {
    ExperimentConfig cfg;
    if (!o.config_path.empty()) cfg = parse_config_file(o.config_path);
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.protocol.empty()) cfg.regional.protocol = regional_protocol_from(o.protocol);
    return cfg;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw RunError("cannot write " + (dir / name).string());
    return f;
}

struct CsvPageSink : PageEventSink {
    std::ofstream file;

    explicit CsvPageSink(std::ofstream f) : file(std::move(f)) {
        file << "txn_id,page_id,event\n";
    }
    void page_event(uint64_t txn, char kind, uint32_t page) override {
        const char* name = "?";
        switch (kind) {
        case 'h': name = "hit"; break;
        case 'm': name = "miss"; break;
        case 'e': name = "evict"; break;
        case 'w': name = "cwrite"; break;
        case 'r': name = "cread"; break;
        }
        file << txn << ',' << page << ',' << name << '\n';
    }
};

void print_metrics(const RunMetrics& m, uint64_t txns) {
    std::cout << "transactions    " << txns << "\n"
              << "transaction_io  " << m.transaction_io << "\n"
              << "clustering_io   " << m.clustering_io << "\n"
              << "total_io        " << m.total_io << "\n"
              << "hit_rate        " << m.hit_rate << "\n"
              << "change_steps    " << m.change_steps << "\n"
              << "fallbacks       " << m.fallbacks << "\n"
              << "config_digest   " << m.config_digest << "\n"
              << "wall_seconds    " << m.wall_seconds << "\n";
}

int cmd_generate(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o);
    DbParams db = cfg.db;
    db.seed = cfg.seed;
    ObjectGraph g = generate_database(db);

    auto f = open_out(o.out_dir, "database.txt");
    dump_graph(g, f);

    uint64_t total = g.total_bytes();
    uint32_t smallest = ~0u, largest = 0;
    for (uint32_t i = 0; i < g.num_objects(); ++i) {
        smallest = std::min(smallest, g.size_of(i));
        largest = std::max(largest, g.size_of(i));
    }
    std::cout << "objects     " << g.num_objects() << "\n"
              << "classes     " << g.num_classes() << "\n"
              << "min_size    " << smallest << "\n"
              << "mean_size   " << static_cast<double>(total) / g.num_objects() << "\n"
              << "max_size    " << largest << "\n"
              << "total_bytes " << total << "\n"
              << "written     " << (fs::path(o.out_dir) / "database.txt").string()
              << "\n";
    return 0;
}

int cmd_run(const CommonOpts& o, bool write_out) {
    ExperimentConfig cfg = load_config(o);
    if (!o.policy.empty()) cfg.policy.kind = policy_kind_from(o.policy);
    if (!o.h_list.empty()) {
        auto hs = parse_h_list(o.h_list);
        if (hs.size() != 1) throw ConfigError("--h", "run takes a single h value");
        cfg.regional.h = hs[0];
    }

    RunHooks hooks;
    std::unique_ptr<CsvPageSink> sink;
    if (o.trace_pages) {
        sink = std::make_unique<CsvPageSink>(open_out(o.out_dir, "pages.csv"));
        hooks.page_sink = sink.get();
    }

    RunMetrics m = run_experiment(cfg, o.trace_pages ? &hooks : nullptr);
    print_metrics(m, cfg.transactions);

    if (write_out) {
        std::vector<SweepRow> rows = {{cfg.regional.protocol, cfg.dependency.protocol,
                                       cfg.integration, cfg.policy.kind, cfg.regional.h,
                                       cfg.seed, cfg.transactions, m}};
        auto f = open_out(o.out_dir, "results.csv");
        f << results_csv(rows);
        auto s = open_out(o.out_dir, "series.csv");
        s << "txn,transaction_io,clustering_io,total_io\n";
        for (const auto& p : m.series)
            s << p.txn << ',' << p.transaction_io << ',' << p.clustering_io << ','
              << (p.transaction_io + p.clustering_io) << '\n';
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o);
    std::vector<double> hs = !o.h_list.empty() ? parse_h_list(o.h_list) : cfg.h_sweep;
    if (hs.empty()) throw ConfigError("run.h_sweep", "sweep needs h values (--h or config)");
    std::vector<PolicyKind> policies =
        !o.policy.empty() ? parse_policy_list(o.policy) : cfg.sweep_policies;

    std::vector<SweepRow> rows = sweep_h(cfg, hs, policies);
    emit_results(rows, o.out_dir);
    std::cout << results_csv(rows);
    std::cout << "written " << (fs::path(o.out_dir) / "results.csv").string() << "\n";
    return 0;
}

int cmd_trace(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o);
    if (!o.policy.empty()) cfg.policy.kind = policy_kind_from(o.policy);
    if (!o.h_list.empty()) {
        auto hs = parse_h_list(o.h_list);
        if (hs.size() != 1) throw ConfigError("--h", "trace takes a single h value");
        cfg.regional.h = hs[0];
    }

    std::vector<TraceRow> rows;
    rows.reserve(cfg.transactions);
    RunHooks hooks;
    hooks.on_root = [&](const TraceRow& r) { rows.push_back(r); };
    std::unique_ptr<CsvPageSink> sink;
    if (o.trace_pages) {
        sink = std::make_unique<CsvPageSink>(open_out(o.out_dir, "pages.csv"));
        hooks.page_sink = sink.get();
    }

    run_experiment(cfg, &hooks);
    auto f = open_out(o.out_dir, "roots.csv");
    write_trace_csv(rows, f);
    std::cout << "written " << (fs::path(o.out_dir) / "roots.csv").string() << "\n";
    return 0;
}

int cmd_analyze(const CommonOpts& o, const std::string& trace_path) {
    ExperimentConfig cfg = load_config(o);
    if (!o.h_list.empty()) {
        auto hs = parse_h_list(o.h_list);
        if (hs.size() != 1) throw ConfigError("--h", "analyze takes a single h value");
        cfg.regional.h = hs[0]; // must match the h the trace was produced with
    }
    std::ifstream in(trace_path);
    if (!in) throw RunError("cannot open trace: " + trace_path);
    std::vector<TraceRow> rows = read_trace_csv(in);

    HotRegionStats st = analyze_trace(rows, cfg.regional, cfg.db.num_objects);
    std::cout << "roots            " << st.roots << "\n"
              << "regions          " << st.region_counts.size() << "\n"
              << "hot_share        " << st.hot_share << "\n"
              << "expected_share   " << st.expected_share << "\n"
              << "hot_size         " << st.hot_size << "\n"
              << "chi_square       " << st.chi_square << "\n"
              << "chi_critical_99  " << st.chi_critical << "\n"
              << "hot_share_check  " << (st.hot_share_pass ? "PASS" : "FAIL") << "\n"
              << "hot_size_check   " << (st.hot_size_pass ? "PASS" : "FAIL") << "\n"
              << "chi_square_check " << (st.chi_pass ? "PASS" : "FAIL") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-store access-pattern drift simulator"};
    app.require_subcommand(1);

    CommonOpts gen_o, run_o, sweep_o, trace_o, an_o;
    std::string trace_path;

    auto* gen = app.add_subcommand("generate", "generate and dump the object database");
    add_common(gen, gen_o);

    auto* run = app.add_subcommand("run", "run one experiment");
    add_common(run, run_o);
    run->add_flag("--trace-pages", run_o.trace_pages, "write per-page event csv");
    bool run_write_out = false;
    run->add_flag("--write", run_write_out, "also write results.csv and series.csv");

    auto* sweep = app.add_subcommand("sweep", "run an h sweep across policies");
    add_common(sweep, sweep_o);

    auto* trace = app.add_subcommand("trace", "emit the root selection trace");
    add_common(trace, trace_o);
    trace->add_flag("--trace-pages", trace_o.trace_pages, "write per-page event csv");

    auto* analyze = app.add_subcommand("analyze", "hot-region statistics of a trace");
    add_common(analyze, an_o, /*with_out=*/false);
    analyze->add_option("--trace", trace_path, "roots.csv to analyze")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_o);
        if (run->parsed()) return cmd_run(run_o, run_write_out);
        if (sweep->parsed()) return cmd_sweep(sweep_o);
        if (trace->parsed()) return cmd_trace(trace_o);
        if (analyze->parsed()) return cmd_analyze(an_o, trace_path);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

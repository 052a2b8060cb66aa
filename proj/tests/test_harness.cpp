#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftsim/analysis.hpp"
#include "driftsim/config_io.hpp"
#include "driftsim/errors.hpp"
#include "driftsim/experiment.hpp"
#include "driftsim/report.hpp"

using namespace driftsim;

namespace {

// Small but non-trivial setup: 2000 objects under a 16-frame buffer.
ExperimentConfig small_cfg() {
    ExperimentConfig c;
    c.db.num_objects = 2000;
    c.db.num_classes = 20;
    c.storage.buffer_bytes = 64 * 1024;
    c.transactions = 500;
    c.policy.min_observations = 200;
    return c;
}

bool deterministic_fields_equal(const RunMetrics& a, const RunMetrics& b) {
    return a.transaction_io == b.transaction_io &&
           a.clustering_io == b.clustering_io && a.total_io == b.total_io &&
           a.hits == b.hits && a.accesses == b.accesses &&
           a.change_steps == b.change_steps && a.fallbacks == b.fallbacks &&
           a.config_digest == b.config_digest &&
           a.series.size() == b.series.size() &&
           std::equal(a.series.begin(), a.series.end(), b.series.begin(),
                      [](const IntervalPoint& x, const IntervalPoint& y) {
                          return x.txn == y.txn &&
                                 x.transaction_io == y.transaction_io &&
                                 x.clustering_io == y.clustering_io;
                      });
}

constexpr const char* kDefaultConfigText =
    "[database]\n"
    "classes = 50\n"
    "max_refs_per_class = 10\n"
    "base_size = 50\n"
    "objects = 100000\n"
    "ref_types = 4\n"
    "ref_type_dist = uniform\n"
    "class_ref_dist = uniform\n"
    "objects_in_classes_dist = uniform\n"
    "object_refs_dist = uniform\n"
    "\n"
    "[storage]\n"
    "page_size = 4096\n"
    "buffer_bytes = 4194304\n"
    "replacement = lru1\n"
    "placement = sequential\n"
    "\n"
    "[regional]\n"
    "protocol = moving_window\n"
    "h = 0\n"
    "region_fraction = 0.003\n"
    "weight_max = 0.8\n"
    "weight_min = 0.0006\n"
    "weight_step = 0.02\n"
    "assignment = random\n"
    "cycle_rest_weight = auto\n"
    "\n"
    "[dependency]\n"
    "protocol = random\n"
    "integration = false\n"
    "hybrid_r = 5\n"
    "same_class_fraction = 0.25\n"
    "first_phase_hot_fraction = 0.03\n"
    "first_phase_hot_prob = 0.8\n"
    "\n"
    "[policy]\n"
    "kind = none\n"
    "trigger_period = 200\n"
    "worst_pages = 50\n"
    "min_observations = 2000\n"
    "decay = 0.9\n"
    "co_access_window = 2\n"
    "\n"
    "[run]\n"
    "transactions = 10000\n"
    "depth = 2\n"
    "seed = 1\n"
    "h_sweep =\n"
    "sweep_policies = none,prp,gp,aggressive\n";

} // namespace

TEST_CASE("built-in defaults serialize to the pinned reference values") {
    CHECK(serialize_config(ExperimentConfig{}) == kDefaultConfigText);

    // shipped sample stays in lockstep with the defaults
    std::ifstream shipped(std::string(DRIFTSIM_SOURCE_DIR) + "/configs/default.cfg",
                          std::ios::binary);
    REQUIRE(shipped.good());
    std::stringstream buf;
    buf << shipped.rdbuf();
    CHECK(buf.str() == kDefaultConfigText);
}

TEST_CASE("config text round-trips through parse and serialize") {
    std::istringstream in(kDefaultConfigText);
    ExperimentConfig parsed = parse_config(in);
    CHECK(serialize_config(parsed) == kDefaultConfigText);
}

TEST_CASE("config parsing: overrides, comments, errors") {
    std::istringstream in(
        "# comment\n"
        "[regional]\n"
        "protocol = cycles_of_change\n"
        "h = 0.25\n"
        "[policy]\n"
        "kind = gp\n"
        "[run]\n"
        "seed = 77\n"
        "h_sweep = 0,0.5,1\n");
    ExperimentConfig cfg = parse_config(in);
    CHECK(cfg.regional.protocol == RegionalProtocol::CyclesOfChange);
    CHECK(cfg.regional.h == 0.25);
    CHECK(cfg.policy.kind == PolicyKind::Gp);
    CHECK(cfg.seed == 77);
    CHECK(cfg.h_sweep == std::vector<double>{0.0, 0.5, 1.0});
    // untouched keys keep their defaults
    CHECK(cfg.db.num_objects == 100000);

    std::istringstream unknown("[regional]\nbogus = 1\n");
    CHECK_THROWS_WITH_AS(parse_config(unknown),
                         "regional.bogus: unknown key", ConfigError);

    std::istringstream bad_value("[regional]\nh = fast\n");
    CHECK_THROWS_AS(parse_config(bad_value), ConfigError);

    std::istringstream no_section("h = 1\n");
    CHECK_THROWS_AS(parse_config(no_section), ConfigError);
}

TEST_CASE("invalid configuration is rejected before transaction 1") {
    ExperimentConfig cfg = small_cfg();
    cfg.regional.h = 2.0;
    try {
        run_experiment(cfg);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "regional.h");
    }
}

TEST_CASE("runs are deterministic in config and seed") {
    ExperimentConfig cfg = small_cfg();
    cfg.policy.kind = PolicyKind::Gp;
    cfg.regional.h = 0.02;
    cfg.seed = 33;
    RunMetrics a = run_experiment(cfg);
    RunMetrics b = run_experiment(cfg);
    CHECK(deterministic_fields_equal(a, b));
    CHECK(a.total_io == a.transaction_io + a.clustering_io);
    CHECK(!a.series.empty());
    CHECK(a.series.back().transaction_io == a.transaction_io);
}

TEST_CASE("no-clustering baseline never pays clustering I/O") {
    ExperimentConfig cfg = small_cfg();
    RunMetrics m = run_experiment(cfg);
    CHECK(m.clustering_io == 0);
    CHECK(m.total_io == m.transaction_io);
}

TEST_CASE("root streams match across policies for one (h, seed)") {
    ExperimentConfig cfg = small_cfg();
    cfg.regional.h = 0.05;
    cfg.seed = 4;

    auto roots_for = [&](PolicyKind kind) {
        ExperimentConfig c = cfg;
        c.policy.kind = kind;
        std::vector<uint32_t> roots;
        RunHooks hooks;
        hooks.on_root = [&](const TraceRow& r) { roots.push_back(r.root); };
        run_experiment(c, &hooks);
        return roots;
    };

    auto none = roots_for(PolicyKind::None);
    auto gp = roots_for(PolicyKind::Gp);
    auto aggressive = roots_for(PolicyKind::Aggressive);
    CHECK(none == gp);
    CHECK(none == aggressive);
}

TEST_CASE("pattern-change cadence through the full run") {
    for (double h : {1.0, 0.01, 0.0006}) {
        ExperimentConfig cfg = small_cfg();
        cfg.transactions = 10000;
        cfg.regional.h = h;
        RunMetrics m = run_experiment(cfg);
        CHECK(m.change_steps == 10000 / change_period(h));
    }
}

TEST_CASE("integrated by-reference run executes with sound phases") {
    ExperimentConfig cfg = small_cfg();
    cfg.integration = true;
    cfg.dependency.protocol = DependencyProtocol::ByReference;
    cfg.dependency.hybrid_r = 3;

    std::vector<TraceRow> rows;
    RunHooks hooks;
    hooks.on_root = [&](const TraceRow& r) { rows.push_back(r); };
    RunMetrics m = run_experiment(cfg, &hooks);
    REQUIRE(rows.size() == cfg.transactions);

    size_t dep = 0, rand = 0;
    for (const TraceRow& r : rows) {
        if (r.phase == RootPhase::Dependency) ++dep;
        if (r.phase == RootPhase::Randomisation) ++rand;
    }
    CHECK(rand > 0);
    CHECK(dep > 0);
    CHECK(m.total_io > 0);
}

TEST_CASE("uniform-weight control gives every region an equal share") {
    ExperimentConfig cfg;
    cfg.db.num_objects = 5000;
    cfg.regional.region_fraction = 0.1; // 10 regions
    cfg.regional.weight_max = 0.5;
    cfg.regional.weight_min = 0.5;

    DbParams db = cfg.db;
    db.seed = cfg.seed;
    ObjectGraph g = generate_database(db);
    RootSelector sel(g, cfg.regional, cfg.dependency, SelectorMode::Regional, 1);

    std::vector<TraceRow> rows;
    const uint64_t draws = 100000;
    for (uint64_t t = 1; t <= draws; ++t) {
        RootChoice c = sel.next_root();
        sel.advance_pattern();
        rows.push_back({t, c.oid, c.phase, c.region});
    }

    HotRegionStats st = analyze_trace(rows, cfg.regional, cfg.db.num_objects);
    CHECK(st.chi_pass);
    for (uint64_t count : st.region_counts)
        CHECK(static_cast<double>(count) / draws ==
              doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("weights {3,1} produce shares {0.75, 0.25}") {
    ExperimentConfig cfg;
    cfg.db.num_objects = 4000;
    cfg.regional.region_fraction = 0.5; // two regions
    cfg.regional.weight_max = 3.0;
    cfg.regional.weight_min = 1.0;

    DbParams db = cfg.db;
    ObjectGraph g = generate_database(db);
    RootSelector sel(g, cfg.regional, cfg.dependency, SelectorMode::Regional, 2);

    std::vector<TraceRow> rows;
    const uint64_t draws = 100000;
    for (uint64_t t = 1; t <= draws; ++t) {
        RootChoice c = sel.next_root();
        sel.advance_pattern();
        rows.push_back({t, c.oid, c.phase, c.region});
    }

    HotRegionStats st = analyze_trace(rows, cfg.regional, cfg.db.num_objects);
    CHECK(st.expected_share == doctest::Approx(0.75));
    CHECK(st.hot_share == doctest::Approx(0.75).epsilon(0.01));
    CHECK(st.hot_share_pass);
    CHECK(static_cast<double>(st.region_counts[1]) / draws ==
          doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("analyze tracks a moving hot region when h > 0") {
    ExperimentConfig cfg;
    cfg.db.num_objects = 3000;
    cfg.db.num_classes = 20;
    cfg.regional.h = 0.02; // window moves every 50 selections
    cfg.transactions = 4000;

    std::vector<TraceRow> rows;
    RunHooks hooks;
    hooks.on_root = [&](const TraceRow& r) { rows.push_back(r); };
    run_experiment(cfg, &hooks);

    HotRegionStats st = analyze_trace(rows, cfg.regional, cfg.db.num_objects);
    CHECK(st.hot_share == doctest::Approx(st.expected_share).epsilon(0.03));
    CHECK(st.hot_share_pass);
}

TEST_CASE("sweep produces the full grid with matched seeds") {
    ExperimentConfig cfg = small_cfg();
    cfg.transactions = 200;
    std::vector<double> hs = {0.0, 0.5};
    std::vector<PolicyKind> policies = {PolicyKind::None, PolicyKind::Gp};

    auto rows = sweep_h(cfg, hs, policies);
    REQUIRE(rows.size() == 4);
    for (const SweepRow& r : rows) CHECK(r.seed == cfg.seed);

    std::string csv = results_csv(rows);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "protocol,dependency,policy,h,seed,txns,transaction_io,clustering_io,"
          "total_io,hit_rate");
    size_t count = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++count;
    CHECK(count == 4);

    CHECK_THROWS_AS(sweep_h(cfg, hs, {}), ConfigError);
    CHECK_THROWS_AS(sweep_h(cfg, {}, policies), ConfigError);
    CHECK_THROWS_AS(sweep_h(cfg, {2.0}, policies), ConfigError);
}

TEST_CASE("emitted result files are byte-stable") {
    ExperimentConfig cfg = small_cfg();
    cfg.transactions = 150;
    auto rows = sweep_h(cfg, {0.0, 1.0}, {PolicyKind::None, PolicyKind::Prp});

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "driftsim_emit_test";
    fs::remove_all(dir);

    emit_results(rows, dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        REQUIRE(f.good());
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    };
    std::string first_csv = slurp(dir / "results.csv");
    std::string first_plot = slurp(dir / "plot_moving_window.dat");

    emit_results(rows, dir); // idempotent rewrite
    CHECK(slurp(dir / "results.csv") == first_csv);
    CHECK(slurp(dir / "plot_moving_window.dat") == first_plot);

    // plot file: header plus one line per h value
    size_t newlines = std::count(first_plot.begin(), first_plot.end(), '\n');
    CHECK(newlines == 3);

    CHECK_THROWS_AS(emit_results({}, dir), RunError);
    fs::remove_all(dir);
}

TEST_CASE("trace csv round trip") {
    std::vector<TraceRow> rows = {{1, 10, RootPhase::Regional, 0},
                                  {2, 11, RootPhase::Randomisation, 1},
                                  {3, 12, RootPhase::Dependency, 2},
                                  {4, 13, RootPhase::DependencyFallback, 0}};
    std::ostringstream out;
    write_trace_csv(rows, out);
    std::istringstream in(out.str());
    auto back = read_trace_csv(in);
    REQUIRE(back.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].txn == rows[i].txn);
        CHECK(back[i].root == rows[i].root);
        CHECK(back[i].phase == rows[i].phase);
        CHECK(back[i].region == rows[i].region);
    }

    std::istringstream bad("nope\n");
    CHECK_THROWS_AS(read_trace_csv(bad), RunError);
}

TEST_CASE("clustering pays off against the frozen pattern (single seed)") {
    ExperimentConfig cfg = small_cfg();
    cfg.transactions = 2000;
    cfg.regional.h = 0.0;
    cfg.seed = 3;

    ExperimentConfig none = cfg;
    none.policy.kind = PolicyKind::None;
    ExperimentConfig gp = cfg;
    gp.policy.kind = PolicyKind::Gp;

    RunMetrics m_none = run_experiment(none);
    RunMetrics m_gp = run_experiment(gp);

    auto second_half = [](const RunMetrics& m) {
        const IntervalPoint& mid = m.series[m.series.size() / 2 - 1];
        return m.total_io - (mid.transaction_io + mid.clustering_io);
    };
    CHECK(second_half(m_gp) <= second_half(m_none));
}

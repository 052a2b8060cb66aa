#include "driftsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "driftsim/config_io.hpp"
#include "driftsim/errors.hpp"

namespace driftsim {

void ExperimentConfig::validate() const {
    db.validate();
    storage.validate();
    regional.validate();
    dependency.validate();
    policy.validate();
    if (transactions == 0)
        throw ConfigError("run.transactions", "must be >= 1");
    for (double h : h_sweep)
        if (!(h >= 0.0 && h <= 1.0))
            throw ConfigError("run.h_sweep", "every h must lie in [0,1]");
}

uint64_t fnv1a64(const std::string& text) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

RunMetrics run_experiment(const ExperimentConfig& cfg, const RunHooks* hooks) {
    cfg.validate();
    auto start = std::chrono::steady_clock::now();

    DbParams db = cfg.db;
    db.seed = cfg.seed;
    ObjectGraph graph = generate_database(db);

    PageMap pm = place_sequential(graph, cfg.storage);
    BufferPool pool(cfg.storage.frame_count());
    if (hooks && hooks->page_sink) pool.set_sink(hooks->page_sink);

    SelectorMode mode = cfg.integration ? SelectorMode::Integrated
                                        : SelectorMode::Regional;
    RootSelector selector(graph, cfg.regional, cfg.dependency, mode, cfg.seed);
    ClusteringPolicy policy(cfg.policy, graph);

    RunMetrics m;
    m.seed = cfg.seed;
    m.config_digest = [&] {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
        return std::string(buf);
    }();

    std::vector<uint32_t> seq;
    const bool clustering = cfg.policy.kind != PolicyKind::None;

    for (uint64_t txn = 1; txn <= cfg.transactions; ++txn) {
        pool.set_txn(txn);
        RootChoice choice = selector.next_root();
        simple_traversal(graph, choice.oid, cfg.traversal_depth, seq);

        for (uint32_t pos = 0; pos < seq.size(); ++pos) {
            uint32_t oid = seq[pos];
            uint32_t page = pm.page_of[oid];
            Access outcome = access_object(pool, pm, oid);
            if (clustering)
                policy.observe({txn, oid, page, outcome == Access::Hit, pos});
        }

        selector.note_traversal(seq);
        if (hooks && hooks->on_root)
            hooks->on_root({txn, choice.oid, choice.phase, choice.region});
        selector.advance_pattern();

        if (clustering && txn % cfg.policy.trigger_period == 0) {
            ReclusterPlan plan = policy.maybe_recluster(pm);
            if (!plan.empty()) apply_recluster(pool, pm, plan);
        }

        if (txn % 100 == 0 || txn == cfg.transactions) {
            IoTally t = pool.tally();
            if (!m.series.empty() && m.series.back().txn == txn) m.series.pop_back();
            m.series.push_back({txn, t.transaction_io, t.clustering_io});
        }
    }

    IoTally t = pool.tally();
    m.transaction_io = t.transaction_io;
    m.clustering_io = t.clustering_io;
    m.total_io = t.total();
    m.hits = pool.hits();
    m.accesses = pool.hits() + pool.misses();
    m.hit_rate = m.accesses ? static_cast<double>(m.hits) / m.accesses : 0.0;
    m.change_steps = selector.change_steps();
    m.fallbacks = selector.fallback_count();
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
}

std::vector<SweepRow> sweep_h(const ExperimentConfig& cfg,
                              const std::vector<double>& h_values,
                              const std::vector<PolicyKind>& policies) {
    if (h_values.empty())
        throw ConfigError("run.h_sweep", "needs at least one h value");
    if (policies.empty())
        throw ConfigError("run.sweep_policies", "needs at least one policy");
    for (double h : h_values)
        if (!(h >= 0.0 && h <= 1.0))
            throw ConfigError("run.h_sweep", "every h must lie in [0,1]");

    std::vector<SweepRow> rows;
    rows.reserve(h_values.size() * policies.size());
    for (double h : h_values) {
        for (PolicyKind kind : policies) {
            ExperimentConfig cell = cfg;
            cell.regional.h = h;
            cell.policy.kind = kind;
            RunMetrics metrics = run_experiment(cell);
            rows.push_back({cell.regional.protocol, cell.dependency.protocol,
                            cell.integration, kind, h, cell.seed,
                            cell.transactions, std::move(metrics)});
        }
    }
    return rows;
}

} // namespace driftsim

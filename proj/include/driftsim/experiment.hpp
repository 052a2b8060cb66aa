#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "driftsim/dynamics.hpp"
#include "driftsim/object_graph.hpp"
#include "driftsim/policy.hpp"
#include "driftsim/storage.hpp"

namespace driftsim {

// Full experiment description. Defaults are the reference setup end to end:
// the standard database and storage parameters, the region template, depth-2
// traversals and 10000 transactions. One seed drives generation, workload
// and region assignment through independent derived streams.
struct ExperimentConfig {
    DbParams db;
    StorageConfig storage;
    RegionalConfig regional;
    DependencyConfig dependency;
    bool integration = false; // false: plain regional; true: candidate-set regions
    PolicyConfig policy;
    uint64_t transactions = 10000;
    uint32_t traversal_depth = 2;
    uint64_t seed = 1;
    std::vector<double> h_sweep; // empty means single-h runs
    std::vector<PolicyKind> sweep_policies = {PolicyKind::None, PolicyKind::Prp,
                                              PolicyKind::Gp, PolicyKind::Aggressive};

    void validate() const;
};

struct IntervalPoint {
    uint64_t txn;            // cumulative counters sampled after this txn
    uint64_t transaction_io;
    uint64_t clustering_io;
};

struct RunMetrics {
    uint64_t transaction_io = 0;
    uint64_t clustering_io = 0;
    uint64_t total_io = 0;
    uint64_t hits = 0;
    uint64_t accesses = 0;
    double hit_rate = 0.0;
    std::vector<IntervalPoint> series; // sampled every 100 transactions
    uint64_t change_steps = 0;
    uint64_t fallbacks = 0;
    double wall_seconds = 0.0; // informational, not part of determinism
    std::string config_digest;
    uint64_t seed = 0;
};

struct RunHooks {
    std::function<void(const TraceRow&)> on_root;
    PageEventSink* page_sink = nullptr;
};

RunMetrics run_experiment(const ExperimentConfig& cfg,
                          const RunHooks* hooks = nullptr);

struct SweepRow {
    RegionalProtocol protocol;
    DependencyProtocol dependency; // meaningful only when integrated
    bool integrated;
    PolicyKind policy;
    double h;
    uint64_t seed;
    uint64_t transactions;
    RunMetrics metrics;
};

// Cross product of h values and policies, matched seeds per cell. Root
// streams are identical across policies for a given (h, seed).
std::vector<SweepRow> sweep_h(const ExperimentConfig& cfg,
                              const std::vector<double>& h_values,
                              const std::vector<PolicyKind>& policies);

uint64_t fnv1a64(const std::string& text);

} // namespace driftsim

#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "driftsim/object_graph.hpp"
#include "driftsim/storage.hpp"

namespace driftsim {

enum class PolicyKind { None, Prp, Gp, Aggressive };

struct PolicyConfig {
    PolicyKind kind = PolicyKind::None;
    uint32_t trigger_period = 200;    // transactions between recluster attempts
    uint32_t worst_pages = 50;        // page budget per plan (Prp/Gp)
    uint64_t min_observations = 2000; // events before the first plan (Prp/Gp)
    double decay = 0.9;               // heat decay per trigger period
    uint32_t co_access_window = 2;    // traversal positions that count as adjacent

    void validate() const;
};

struct AccessEvent {
    uint64_t txn;
    uint32_t oid;
    uint32_t page;
    bool hit;
    uint32_t pos_in_traversal;
};

// Object heat with lazy exponential decay, plus co-access edge weights for
// pairs within the traversal window.
class HeatStats {
public:
    explicit HeatStats(uint32_t num_objects) : heat_(num_objects, 0.0) {}

    void observe(const AccessEvent& ev, uint32_t window);
    void decay_tick(double factor); // heat only; edges keep accumulating

    double heat(uint32_t oid) const { return heat_[oid]; }
    const std::vector<double>& heats() const { return heat_; }
    const std::unordered_map<uint64_t, double>& edges() const { return edges_; }
    double edge_weight(uint32_t a, uint32_t b) const;
    uint64_t observations() const { return observations_; }
    uint64_t since_recluster() const { return since_recluster_; }
    void note_recluster() { since_recluster_ = 0; }

    static uint64_t edge_key(uint32_t a, uint32_t b) {
        if (a > b) std::swap(a, b);
        return (static_cast<uint64_t>(a) << 32) | b;
    }

private:
    std::vector<double> heat_;
    std::unordered_map<uint64_t, double> edges_;
    std::vector<uint32_t> recent_; // trailing window within one traversal
    uint64_t observations_ = 0;
    uint64_t since_recluster_ = 0;
};

// How badly a page mixes hot and cold bytes: sum over objects of the heat
// above the page's own per-byte average. Zero for homogeneous pages.
double page_mixture_score(const PageMap& pm, uint32_t page,
                          const std::vector<double>& heat);

// Observes the access stream and periodically emits re-cluster plans.
//   None: never plans.
//   Prp:  ranks objects of the worst pages by heat, repacks hottest first.
//   Gp:   greedy co-access graph partitioning over the worst pages' objects.
//   Aggressive: Gp over every page with any positive score, no page budget,
//   no observation gate.
class ClusteringPolicy {
public:
    ClusteringPolicy(const PolicyConfig& cfg, const ObjectGraph& g);

    void observe(const AccessEvent& ev);
    ReclusterPlan maybe_recluster(const PageMap& pm);

    const PolicyConfig& config() const { return cfg_; }
    HeatStats& stats() { return stats_; }

private:
    ReclusterPlan prp_plan(const PageMap& pm,
                           const std::vector<uint32_t>& pages) const;
    ReclusterPlan gp_plan(const PageMap& pm,
                          const std::vector<uint32_t>& pages) const;

    PolicyConfig cfg_;
    const ObjectGraph* graph_;
    HeatStats stats_;
};

} // namespace driftsim

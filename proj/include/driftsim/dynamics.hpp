#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftsim/object_graph.hpp"
#include "driftsim/rng.hpp"

namespace driftsim {

enum class RegionalProtocol { MovingWindow, GradualMovingWindow, CyclesOfChange };
enum class AssignMethod { Random, ByClass };
enum class Direction { Up, Down };

// Region template plus change-rate knob. h is the change rate: one pattern
// change every ceil(1/h) root selections; h=0 freezes the pattern, h=1
// changes it after every transaction.
struct RegionalConfig {
    RegionalProtocol protocol = RegionalProtocol::MovingWindow;
    double h = 0.0;
    double region_fraction = 0.003; // of the universe, per region
    double weight_max = 0.80;
    double weight_min = 0.0006;
    double weight_step = 0.02;
    AssignMethod assignment = AssignMethod::Random;
    // Cycles only: weight of the unchanging remainder region. Negative means
    // auto (weight_min scaled by the remainder's size relative to a cycling
    // region, so its per-object probability matches a cold region).
    double cycle_rest_weight = -1.0;

    void validate() const;
};

// Selections between pattern changes: ceil(1/h). Zero means never.
uint64_t change_period(double h);

// Region object counts for a universe of n, determined by index alone.
// MovingWindow/Gradual: floor(1/fraction) equal regions, remainder spread one
// per region from the front. Cycles: two cycling regions of fraction*n each
// plus the remainder. Throws unless allow_collapse, in which case the count
// shrinks to fit small universes.
std::vector<size_t> region_sizes(const RegionalConfig& cfg, size_t n,
                                 bool allow_collapse);

// Weight dynamics, separate from membership so the same arithmetic drives
// live selection, candidate-set integration, and trace replay.
struct WeightSchedule {
    std::vector<double> weights;
    std::vector<Direction> dirs;
    size_t window_pos = 0;
    uint64_t roots_since_change = 0;
    uint64_t change_steps = 0;

    size_t size() const { return weights.size(); }
};

WeightSchedule make_weight_schedule(const RegionalConfig& cfg,
                                    const std::vector<size_t>& sizes);

// Applies one post-selection tick; performs a change step each time the
// trigger count reaches the period. MovingWindow swaps hot/cold in one step.
// Gradual steps the outgoing and incoming regions by +-weight_step (clamped)
// and retargets the window only once both reach their bounds. Cycles steps
// the two cycling regions in their current directions, flipping at bounds.
void advance_pattern(WeightSchedule& sched, const RegionalConfig& cfg);

struct RegionPartition {
    std::vector<std::vector<uint32_t>> members;

    size_t size() const { return members.size(); }
};

// Slices the universe into regions. Random assignment permutes with rng;
// ByClass sorts by (class id, oid) first.
RegionPartition build_regions(const RegionalConfig& cfg,
                              std::vector<uint32_t> universe,
                              const ObjectGraph& g, Rng& rng,
                              bool allow_collapse);

struct RootPick {
    uint32_t oid;
    uint32_t region;
};

// Two-level draw: region r with probability weight(r)/sum, then a uniform
// member. Empty regions sit out of the normalization entirely.
RootPick select_root(const std::vector<double>& weights,
                     const RegionPartition& part, Rng& rng);

// Projects a schedule onto fewer slots (index mod n_slots), preserving total
// weight. Identity when n_slots equals the schedule size.
std::vector<double> fold_weights(const WeightSchedule& sched, size_t n_slots);

enum class DependencyProtocol { Random, ByReference, TraversedObjects, SameClass };

struct DependencyConfig {
    DependencyProtocol protocol = DependencyProtocol::Random;
    uint32_t hybrid_r = 5;                 // dependency picks per randomisation pick
    double same_class_fraction = 0.25;     // of the previous root's class
    double first_phase_hot_fraction = 0.03;
    double first_phase_hot_prob = 0.8;

    void validate() const;
};

// Candidate objects for the next root. whole_database avoids materializing
// the trivial Random case.
struct CandidateSet {
    bool whole_database = false;
    std::vector<uint32_t> ids; // sorted, unique

    bool empty() const { return !whole_database && ids.empty(); }
};

// ByReference: targets of the previous root's refs. TraversedObjects: the
// set visited by the previous traversal. SameClass: a deterministic subset
// of the previous root's class (pure function of root, class and fraction).
// ByReference may come back empty when the previous root has no refs.
CandidateSet dependency_candidates(const DependencyConfig& cfg,
                                   const ObjectGraph& g,
                                   std::optional<uint32_t> prev_root,
                                   std::span<const uint32_t> prev_traversal);

enum class SelectorMode {
    Regional,   // plain regional protocol over the whole database
    Hybrid,     // randomisation/dependency phases, uniform candidate pick
    Integrated  // hybrid phases with candidate sets partitioned into regions
};

enum class RootPhase { Regional, Randomisation, Dependency, DependencyFallback };

const char* to_string(RootPhase p);

struct RootChoice {
    uint32_t oid;
    RootPhase phase;
    uint32_t region;
};

struct TraceRow {
    uint64_t txn;
    uint32_t root;
    RootPhase phase;
    uint32_t region;
};

// Produces the workload root stream. One instance per run; call next_root,
// then note_traversal with the executed sequence, then advance_pattern, for
// every transaction. The stream is a pure function of (graph, configs, seed).
class RootSelector {
public:
    RootSelector(const ObjectGraph& g, const RegionalConfig& regional,
                 const DependencyConfig& deps, SelectorMode mode, uint64_t seed);

    RootChoice next_root();
    void note_traversal(std::span<const uint32_t> seq);
    void advance_pattern();

    uint64_t change_steps() const { return schedule_.change_steps; }
    uint64_t fallback_count() const { return fallbacks_; }
    const WeightSchedule& schedule() const { return schedule_; }
    const RegionPartition& regions() const { return regions_; }

private:
    RootChoice hybrid_next();
    RootPick integrated_pick(const CandidateSet& cands);
    uint32_t first_phase_draw(uint32_t* region_out);

    const ObjectGraph* graph_;
    RegionalConfig regional_;
    DependencyConfig deps_;
    SelectorMode mode_;
    Rng workload_rng_;
    uint64_t partition_seed_;

    WeightSchedule schedule_;
    RegionPartition regions_; // Regional mode only

    std::vector<uint32_t> fp_hot_, fp_cold_; // randomisation-phase split

    bool in_dependency_ = false;
    uint32_t dep_done_ = 0;
    std::optional<uint32_t> prev_root_;
    std::vector<uint32_t> prev_traversal_;
    uint64_t fallbacks_ = 0;
};

} // namespace driftsim

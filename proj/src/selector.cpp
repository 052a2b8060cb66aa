#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftsim/dynamics.hpp"
#include "driftsim/errors.hpp"

namespace driftsim {

const char* to_string(RootPhase p) {
    switch (p) {
    case RootPhase::Regional: return "regional";
    case RootPhase::Randomisation: return "rand";
    case RootPhase::Dependency: return "dep";
    case RootPhase::DependencyFallback: return "dep_fb";
    }
    return "?";
}

RootSelector::RootSelector(const ObjectGraph& g, const RegionalConfig& regional,
                           const DependencyConfig& deps, SelectorMode mode,
                           uint64_t seed)
    : graph_(&g),
      regional_(regional),
      deps_(deps),
      mode_(mode),
      workload_rng_(Rng::stream(seed, stream_tag::kWorkload)),
      partition_seed_(Rng::stream_seed(seed, stream_tag::kPartition)) {
    regional_.validate();
    deps_.validate();

    const uint32_t n = g.num_objects();
    if (mode_ == SelectorMode::Regional) {
        std::vector<uint32_t> universe(n);
        std::iota(universe.begin(), universe.end(), 0u);
        Rng prng(partition_seed_);
        regions_ = build_regions(regional_, std::move(universe), g, prng,
                                 /*allow_collapse=*/false);
        std::vector<size_t> sizes;
        sizes.reserve(regions_.size());
        for (const auto& m : regions_.members) sizes.push_back(m.size());
        schedule_ = make_weight_schedule(regional_, sizes);
        return;
    }

    schedule_ = make_weight_schedule(
        regional_, region_sizes(regional_, n, /*allow_collapse=*/true));

    // Randomisation-phase split: one hot slice of the database, drawn with
    // probability first_phase_hot_prob, cold remainder otherwise.
    bool wants_first_phase = mode_ == SelectorMode::Hybrid ||
                             deps_.protocol != DependencyProtocol::Random;
    if (wants_first_phase) {
        std::vector<uint32_t> all(n);
        std::iota(all.begin(), all.end(), 0u);
        Rng fp = Rng::stream(seed, stream_tag::kFirstPhase);
        fp.shuffle(all);
        size_t hot = static_cast<size_t>(
            std::llround(deps_.first_phase_hot_fraction * static_cast<double>(n)));
        hot = std::clamp<size_t>(hot, 1, n);
        fp_hot_.assign(all.begin(), all.begin() + hot);
        fp_cold_.assign(all.begin() + hot, all.end());
    }
}

uint32_t RootSelector::first_phase_draw(uint32_t* region_out) {
    double u = workload_rng_.uniform01();
    bool hot = fp_cold_.empty() || u < deps_.first_phase_hot_prob;
    const auto& pool = hot ? fp_hot_ : fp_cold_;
    *region_out = hot ? 0 : 1;
    return pool[workload_rng_.bounded(pool.size())];
}

RootPick RootSelector::integrated_pick(const CandidateSet& cands) {
    std::vector<uint32_t> ids;
    if (cands.whole_database) {
        ids.resize(graph_->num_objects());
        std::iota(ids.begin(), ids.end(), 0u);
    } else {
        ids = cands.ids;
    }
    // Re-seeded from the same derived seed every selection: equal candidate
    // sets always partition identically, and the workload stream is untouched.
    Rng prng(partition_seed_);
    RegionPartition part = build_regions(regional_, std::move(ids), *graph_, prng,
                                         /*allow_collapse=*/true);
    std::vector<double> weights = fold_weights(schedule_, part.size());
    return select_root(weights, part, workload_rng_);
}

RootChoice RootSelector::next_root() {
    switch (mode_) {
    case SelectorMode::Regional: {
        RootPick p = select_root(schedule_.weights, regions_, workload_rng_);
        return {p.oid, RootPhase::Regional, p.region};
    }
    case SelectorMode::Integrated:
        if (deps_.protocol == DependencyProtocol::Random) {
            // Random dependency has no phases to alternate; every selection
            // is a regional draw over the whole database.
            CandidateSet all;
            all.whole_database = true;
            RootPick p = integrated_pick(all);
            return {p.oid, RootPhase::Regional, p.region};
        }
        return hybrid_next();
    case SelectorMode::Hybrid:
        return hybrid_next();
    }
    throw std::logic_error("RootSelector: bad mode");
}

RootChoice RootSelector::hybrid_next() {
    bool dependency_turn = in_dependency_ && prev_root_.has_value();

    if (!dependency_turn) {
        uint32_t region = 0;
        uint32_t oid = first_phase_draw(&region);
        in_dependency_ = deps_.hybrid_r > 0;
        dep_done_ = 0;
        prev_root_ = oid;
        return {oid, RootPhase::Randomisation, region};
    }

    CandidateSet cands;
    bool have_basis =
        deps_.protocol != DependencyProtocol::TraversedObjects || !prev_traversal_.empty();
    if (have_basis)
        cands = dependency_candidates(deps_, *graph_, prev_root_, prev_traversal_);

    if (!have_basis || cands.empty()) {
        // No candidates (previous root has no refs): take a randomisation
        // pick for this selection and restart the dependency count.
        uint32_t region = 0;
        uint32_t oid = first_phase_draw(&region);
        ++fallbacks_;
        in_dependency_ = deps_.hybrid_r > 0;
        dep_done_ = 0;
        prev_root_ = oid;
        return {oid, RootPhase::DependencyFallback, region};
    }

    RootPick p;
    if (mode_ == SelectorMode::Integrated) {
        p = integrated_pick(cands);
    } else if (cands.whole_database) {
        p = {static_cast<uint32_t>(workload_rng_.bounded(graph_->num_objects())), 0};
    } else {
        p = {cands.ids[workload_rng_.bounded(cands.ids.size())], 0};
    }

    ++dep_done_;
    if (dep_done_ >= deps_.hybrid_r) in_dependency_ = false;
    prev_root_ = p.oid;
    return {p.oid, RootPhase::Dependency, p.region};
}

void RootSelector::note_traversal(std::span<const uint32_t> seq) {
    if (mode_ == SelectorMode::Regional) return;
    prev_traversal_.assign(seq.begin(), seq.end());
}

void RootSelector::advance_pattern() {
    if (mode_ == SelectorMode::Hybrid) return; // no regional weights in play
    driftsim::advance_pattern(schedule_, regional_);
}

} // namespace driftsim

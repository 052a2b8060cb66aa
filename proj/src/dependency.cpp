#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftsim/dynamics.hpp"
#include "driftsim/errors.hpp"

namespace driftsim {

namespace {

constexpr uint64_t kSameClassSalt = 0x73616d65636c7373ULL;

} // namespace

void DependencyConfig::validate() const {
    if (!(same_class_fraction > 0.0 && same_class_fraction <= 1.0))
        throw ConfigError("dependency.same_class_fraction", "must lie in (0,1]");
    if (!(first_phase_hot_fraction > 0.0 && first_phase_hot_fraction <= 1.0))
        throw ConfigError("dependency.first_phase_hot_fraction", "must lie in (0,1]");
    if (!(first_phase_hot_prob >= 0.0 && first_phase_hot_prob <= 1.0))
        throw ConfigError("dependency.first_phase_hot_prob", "must lie in [0,1]");
}

CandidateSet dependency_candidates(const DependencyConfig& cfg,
                                   const ObjectGraph& g,
                                   std::optional<uint32_t> prev_root,
                                   std::span<const uint32_t> prev_traversal) {
    CandidateSet out;
    switch (cfg.protocol) {
    case DependencyProtocol::Random:
        out.whole_database = true;
        return out;

    case DependencyProtocol::ByReference: {
        if (!prev_root)
            throw std::invalid_argument("dependency_candidates: previous root required");
        auto targets = g.refs(*prev_root);
        out.ids.assign(targets.begin(), targets.end());
        break;
    }

    case DependencyProtocol::TraversedObjects: {
        if (prev_traversal.empty())
            throw std::invalid_argument("dependency_candidates: previous traversal required");
        out.ids.assign(prev_traversal.begin(), prev_traversal.end());
        break;
    }

    case DependencyProtocol::SameClass: {
        if (!prev_root)
            throw std::invalid_argument("dependency_candidates: previous root required");
        uint32_t cls = g.object_class[*prev_root];
        const auto& members = g.by_class[cls];
        size_t k = static_cast<size_t>(
            std::ceil(cfg.same_class_fraction * static_cast<double>(members.size())));
        k = std::clamp<size_t>(k, 1, members.size());
        if (k == members.size()) {
            out.ids = members;
            return out; // already sorted and unique
        }
        // Deterministic subset: same (root, class, fraction) always yields
        // the same members.
        uint64_t salt = splitmix64(splitmix64(kSameClassSalt ^ cls) ^ *prev_root);
        std::vector<std::pair<uint64_t, uint32_t>> ranked;
        ranked.reserve(members.size());
        for (uint32_t oid : members)
            ranked.emplace_back(splitmix64(salt ^ oid), oid);
        std::nth_element(ranked.begin(), ranked.begin() + (k - 1), ranked.end());
        ranked.resize(k);
        out.ids.reserve(k);
        for (const auto& [rank, oid] : ranked) out.ids.push_back(oid);
        std::sort(out.ids.begin(), out.ids.end());
        return out;
    }
    }

    std::sort(out.ids.begin(), out.ids.end());
    out.ids.erase(std::unique(out.ids.begin(), out.ids.end()), out.ids.end());
    return out;
}

} // namespace driftsim

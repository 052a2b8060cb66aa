#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftsim/dynamics.hpp"
#include "driftsim/errors.hpp"

namespace driftsim {

void RegionalConfig::validate() const {
    if (!(h >= 0.0 && h <= 1.0))
        throw ConfigError("regional.h", "must lie in [0,1]");
    if (!(region_fraction > 0.0 && region_fraction <= 1.0))
        throw ConfigError("regional.region_fraction", "must lie in (0,1]");
    if (weight_min < 0.0)
        throw ConfigError("regional.weight_min", "must be >= 0");
    if (weight_max < weight_min)
        throw ConfigError("regional.weight_max", "must be >= weight_min");
    if (weight_step < 0.0)
        throw ConfigError("regional.weight_step", "must be >= 0");
}

uint64_t change_period(double h) {
    if (h <= 0.0) return 0;
    return static_cast<uint64_t>(std::ceil(1.0 / h));
}

std::vector<size_t> region_sizes(const RegionalConfig& cfg, size_t n,
                                 bool allow_collapse) {
    if (n == 0)
        throw std::invalid_argument("region_sizes: empty universe");

    if (cfg.protocol == RegionalProtocol::CyclesOfChange) {
        if (n < 3) {
            if (!allow_collapse)
                throw ConfigError("regional.region_fraction",
                                  "cycles-of-change needs at least 3 objects");
            if (n == 1) return {1, 0, 0};
            return {1, 1, 0};
        }
        size_t cyc = static_cast<size_t>(std::llround(cfg.region_fraction * n));
        cyc = std::max<size_t>(cyc, 1);
        if (2 * cyc > n) {
            if (!allow_collapse)
                throw ConfigError("regional.region_fraction",
                                  "cycling regions would exceed the universe");
            cyc = n / 2;
        }
        return {cyc, cyc, n - 2 * cyc};
    }

    size_t count = static_cast<size_t>(std::floor(1.0 / cfg.region_fraction));
    count = std::max<size_t>(count, 1);
    if (count > n) {
        if (!allow_collapse)
            throw ConfigError("regional.region_fraction",
                              "more regions than objects in the universe");
        count = n;
    }
    std::vector<size_t> sizes(count, n / count);
    size_t rem = n % count;
    for (size_t i = 0; i < rem; ++i) ++sizes[i];
    return sizes;
}

WeightSchedule make_weight_schedule(const RegionalConfig& cfg,
                                    const std::vector<size_t>& sizes) {
    WeightSchedule s;
    const size_t n = sizes.size();
    s.weights.assign(n, cfg.weight_min);
    s.dirs.assign(n, Direction::Down);
    s.window_pos = 0;

    if (cfg.protocol == RegionalProtocol::CyclesOfChange) {
        if (n >= 1) s.weights[0] = cfg.weight_max;
        if (n >= 2) s.dirs[1] = Direction::Up;
        if (n >= 3) {
            double rest = cfg.cycle_rest_weight;
            if (rest < 0.0) {
                // Per-object probability of the remainder matches a cold
                // cycling region.
                rest = cfg.weight_min * static_cast<double>(sizes[2]) /
                       static_cast<double>(std::max<size_t>(sizes[0], 1));
            }
            s.weights[2] = std::clamp(rest, cfg.weight_min, cfg.weight_max);
        }
        return s;
    }

    s.weights[0] = cfg.weight_max;
    if (cfg.protocol == RegionalProtocol::GradualMovingWindow && n > 1)
        s.dirs[1] = Direction::Up; // first incoming region
    return s;
}

void advance_pattern(WeightSchedule& s, const RegionalConfig& cfg) {
    const uint64_t period = change_period(cfg.h);
    if (period == 0) return;
    if (++s.roots_since_change < period) return;
    s.roots_since_change = 0;
    ++s.change_steps;

    const size_t n = s.size();
    switch (cfg.protocol) {
    case RegionalProtocol::MovingWindow: {
        s.weights[s.window_pos] = cfg.weight_min;
        s.dirs[s.window_pos] = Direction::Down;
        s.window_pos = (s.window_pos + 1) % n;
        s.weights[s.window_pos] = cfg.weight_max;
        s.dirs[s.window_pos] = Direction::Up;
        break;
    }
    case RegionalProtocol::GradualMovingWindow: {
        if (n < 2) break;
        size_t out = s.window_pos;
        size_t in = (out + 1) % n;
        double wo = s.weights[out] - cfg.weight_step;
        s.weights[out] = (wo <= cfg.weight_min) ? cfg.weight_min : wo;
        double wi = s.weights[in] + cfg.weight_step;
        s.weights[in] = (wi >= cfg.weight_max) ? cfg.weight_max : wi;
        if (s.weights[out] == cfg.weight_min && s.weights[in] == cfg.weight_max) {
            // Transition complete; the next pair starts cooling/heating.
            s.window_pos = in;
            s.dirs[in] = Direction::Down;
            s.dirs[(in + 1) % n] = Direction::Up;
        }
        break;
    }
    case RegionalProtocol::CyclesOfChange: {
        // Tolerant bound detection so a step equal to the full span lands on
        // the bound despite rounding and swaps the regions every trigger.
        const double eps = 1e-9 * (cfg.weight_max - cfg.weight_min);
        for (size_t r = 0; r < 2 && r < n; ++r) {
            if (s.dirs[r] == Direction::Up) {
                double w = s.weights[r] + cfg.weight_step;
                if (w >= cfg.weight_max - eps) {
                    w = cfg.weight_max;
                    s.dirs[r] = Direction::Down;
                }
                s.weights[r] = w;
            } else {
                double w = s.weights[r] - cfg.weight_step;
                if (w <= cfg.weight_min + eps) {
                    w = cfg.weight_min;
                    s.dirs[r] = Direction::Up;
                }
                s.weights[r] = w;
            }
        }
        break;
    }
    }
}

RegionPartition build_regions(const RegionalConfig& cfg,
                              std::vector<uint32_t> universe,
                              const ObjectGraph& g, Rng& rng,
                              bool allow_collapse) {
    if (universe.empty())
        throw std::invalid_argument("build_regions: empty universe");
    auto sizes = region_sizes(cfg, universe.size(), allow_collapse);

    if (cfg.assignment == AssignMethod::Random) {
        rng.shuffle(universe);
    } else {
        std::sort(universe.begin(), universe.end(), [&](uint32_t a, uint32_t b) {
            uint32_t ca = g.object_class[a], cb = g.object_class[b];
            return ca != cb ? ca < cb : a < b;
        });
    }

    RegionPartition part;
    part.members.resize(sizes.size());
    size_t at = 0;
    for (size_t i = 0; i < sizes.size(); ++i) {
        part.members[i].assign(universe.begin() + at, universe.begin() + at + sizes[i]);
        at += sizes[i];
    }
    return part;
}

RootPick select_root(const std::vector<double>& weights,
                     const RegionPartition& part, Rng& rng) {
    if (weights.size() != part.size())
        throw std::invalid_argument("select_root: weights and partition disagree");

    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i)
        if (!part.members[i].empty()) total += weights[i];
    if (total <= 0.0)
        throw ConfigError("regional.weights",
                          "every selectable region has zero weight");

    double u = rng.uniform01() * total;
    size_t pick = weights.size();
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (part.members[i].empty()) continue;
        acc += weights[i];
        pick = i;
        if (u < acc) break;
    }
    const auto& members = part.members[pick];
    uint32_t oid = members[rng.bounded(members.size())];
    return {oid, static_cast<uint32_t>(pick)};
}

std::vector<double> fold_weights(const WeightSchedule& sched, size_t n_slots) {
    std::vector<double> out(n_slots, 0.0);
    for (size_t j = 0; j < sched.size(); ++j)
        out[j % n_slots] += sched.weights[j];
    return out;
}

} // namespace driftsim

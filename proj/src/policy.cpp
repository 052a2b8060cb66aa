#include "driftsim/policy.hpp"

#include <algorithm>
#include <cmath>

#include "driftsim/errors.hpp"

namespace driftsim {

namespace {

constexpr double kScoreEps = 1e-12;

struct Bin {
    std::vector<uint32_t> members;
    uint32_t bytes = 0;
    bool alive = true;
};

// A bin that reproduces an existing page exactly needs no moves.
bool matches_existing_page(const PageMap& pm, const std::vector<uint32_t>& bin) {
    uint32_t page = pm.page_of[bin.front()];
    const auto& objs = pm.contents[page];
    if (objs.size() != bin.size()) return false;
    std::vector<uint32_t> a = bin, b = objs;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

ReclusterPlan assemble_plan(const PageMap& pm, const std::vector<Bin>& bins) {
    ReclusterPlan plan;
    uint32_t next_target = pm.page_count();
    for (const auto& bin : bins) {
        if (!bin.alive || bin.members.empty()) continue;
        if (matches_existing_page(pm, bin.members)) continue;
        uint32_t target = next_target + plan.new_pages;
        ++plan.new_pages;
        for (uint32_t oid : bin.members) plan.moves.push_back({oid, target});
    }
    return plan;
}

// Sequential fill in the given object order; a new bin opens whenever the
// next object does not fit.
void pack_sequential(const PageMap& pm, const std::vector<uint32_t>& objs,
                     std::vector<Bin>& bins) {
    for (uint32_t oid : objs) {
        uint32_t size = pm.object_size[oid];
        if (bins.empty() || !bins.back().alive ||
            bins.back().bytes + size > pm.page_size) {
            bins.emplace_back();
        }
        bins.back().members.push_back(oid);
        bins.back().bytes += size;
    }
}

} // namespace

void PolicyConfig::validate() const {
    if (trigger_period == 0)
        throw ConfigError("policy.trigger_period", "must be >= 1");
    if ((kind == PolicyKind::Prp || kind == PolicyKind::Gp) && worst_pages == 0)
        throw ConfigError("policy.worst_pages", "must be >= 1 for prp/gp");
    if (!(decay > 0.0 && decay <= 1.0))
        throw ConfigError("policy.decay", "must lie in (0,1]");
    if (co_access_window == 0)
        throw ConfigError("policy.co_access_window", "must be >= 1");
}

void HeatStats::observe(const AccessEvent& ev, uint32_t window) {
    heat_[ev.oid] += 1.0;
    ++observations_;
    ++since_recluster_;
    if (window <= 1) return;
    if (ev.pos_in_traversal == 0) recent_.clear();
    for (uint32_t prev : recent_)
        if (prev != ev.oid) edges_[edge_key(prev, ev.oid)] += 1.0;
    recent_.push_back(ev.oid);
    if (recent_.size() >= window) recent_.erase(recent_.begin());
}

void HeatStats::decay_tick(double factor) {
    if (factor >= 1.0) return;
    for (double& h : heat_) h *= factor;
}

double HeatStats::edge_weight(uint32_t a, uint32_t b) const {
    auto it = edges_.find(edge_key(a, b));
    return it == edges_.end() ? 0.0 : it->second;
}

double page_mixture_score(const PageMap& pm, uint32_t page,
                          const std::vector<double>& heat) {
    const auto& objs = pm.contents[page];
    if (objs.size() < 2 || pm.fill[page] == 0) return 0.0;
    double total = 0.0;
    for (uint32_t o : objs) total += heat[o];
    if (total <= 0.0) return 0.0;
    double density = total / pm.fill[page];
    double score = 0.0;
    for (uint32_t o : objs) {
        double excess = heat[o] - density * pm.object_size[o];
        if (excess > 0.0) score += excess;
    }
    return score;
}

ClusteringPolicy::ClusteringPolicy(const PolicyConfig& cfg, const ObjectGraph& g)
    : cfg_(cfg), graph_(&g), stats_(g.num_objects()) {
    cfg_.validate();
}

void ClusteringPolicy::observe(const AccessEvent& ev) {
    if (cfg_.kind == PolicyKind::None) return;
    stats_.observe(ev, cfg_.co_access_window);
}

ReclusterPlan ClusteringPolicy::maybe_recluster(const PageMap& pm) {
    if (cfg_.kind == PolicyKind::None) return {};
    stats_.decay_tick(cfg_.decay);

    const bool conservative =
        cfg_.kind == PolicyKind::Prp || cfg_.kind == PolicyKind::Gp;
    if (conservative && stats_.observations() < cfg_.min_observations) return {};
    if (stats_.since_recluster() == 0) return {};

    std::vector<std::pair<double, uint32_t>> worst;
    for (uint32_t p = 0; p < pm.page_count(); ++p) {
        if (pm.retired[p]) continue;
        double s = page_mixture_score(pm, p, stats_.heats());
        if (s > kScoreEps) worst.emplace_back(s, p);
    }
    if (worst.empty()) return {};
    std::sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (conservative && worst.size() > cfg_.worst_pages)
        worst.resize(cfg_.worst_pages);

    std::vector<uint32_t> pages;
    pages.reserve(worst.size());
    for (const auto& [score, page] : worst) pages.push_back(page);

    ReclusterPlan plan = cfg_.kind == PolicyKind::Prp ? prp_plan(pm, pages)
                                                      : gp_plan(pm, pages);
    if (!plan.empty()) stats_.note_recluster();
    return plan;
}

ReclusterPlan ClusteringPolicy::prp_plan(const PageMap& pm,
                                         const std::vector<uint32_t>& pages) const {
    std::vector<uint32_t> objs;
    for (uint32_t p : pages)
        objs.insert(objs.end(), pm.contents[p].begin(), pm.contents[p].end());

    const auto& heat = stats_.heats();
    std::sort(objs.begin(), objs.end(), [&](uint32_t a, uint32_t b) {
        return heat[a] != heat[b] ? heat[a] > heat[b] : a < b;
    });

    std::vector<Bin> bins;
    pack_sequential(pm, objs, bins);
    return assemble_plan(pm, bins);
}

ReclusterPlan ClusteringPolicy::gp_plan(const PageMap& pm,
                                        const std::vector<uint32_t>& pages) const {
    std::vector<uint32_t> objs;
    for (uint32_t p : pages)
        objs.insert(objs.end(), pm.contents[p].begin(), pm.contents[p].end());

    std::vector<uint8_t> selected(graph_->num_objects(), 0);
    for (uint32_t o : objs) selected[o] = 1;

    // Co-access subgraph restricted to the selected objects.
    struct Edge { double w; uint64_t key; };
    std::vector<Edge> sub;
    for (const auto& [key, w] : stats_.edges()) {
        if (w <= 0.0) continue;
        uint32_t a = static_cast<uint32_t>(key >> 32);
        uint32_t b = static_cast<uint32_t>(key);
        if (selected[a] && selected[b]) sub.push_back({w, key});
    }
    std::sort(sub.begin(), sub.end(), [](const Edge& x, const Edge& y) {
        return x.w != y.w ? x.w > y.w : x.key < y.key;
    });

    constexpr uint32_t kUnassigned = 0xFFFFFFFFu;
    std::vector<uint32_t> bin_of(graph_->num_objects(), kUnassigned);
    std::vector<Bin> bins;

    auto fits = [&](const Bin& bin, uint32_t bytes) {
        return bin.bytes + bytes <= pm.page_size;
    };

    for (const Edge& e : sub) {
        uint32_t a = static_cast<uint32_t>(e.key >> 32);
        uint32_t b = static_cast<uint32_t>(e.key);
        uint32_t ba = bin_of[a], bb = bin_of[b];
        if (ba == kUnassigned && bb == kUnassigned) {
            uint32_t bytes = pm.object_size[a] + pm.object_size[b];
            if (bytes > pm.page_size) continue;
            bins.emplace_back();
            Bin& bin = bins.back();
            bin.members = {a, b};
            bin.bytes = bytes;
            bin_of[a] = bin_of[b] = static_cast<uint32_t>(bins.size() - 1);
        } else if (bb == kUnassigned) {
            if (fits(bins[ba], pm.object_size[b])) {
                bins[ba].members.push_back(b);
                bins[ba].bytes += pm.object_size[b];
                bin_of[b] = ba;
            }
        } else if (ba == kUnassigned) {
            if (fits(bins[bb], pm.object_size[a])) {
                bins[bb].members.push_back(a);
                bins[bb].bytes += pm.object_size[a];
                bin_of[a] = bb;
            }
        } else if (ba != bb) {
            uint32_t keep = std::min(ba, bb), drop = std::max(ba, bb);
            if (bins[keep].bytes + bins[drop].bytes <= pm.page_size) {
                for (uint32_t o : bins[drop].members) {
                    bins[keep].members.push_back(o);
                    bin_of[o] = keep;
                }
                bins[keep].bytes += bins[drop].bytes;
                bins[drop].alive = false;
                bins[drop].members.clear();
                bins[drop].bytes = 0;
            }
        }
    }

    // Objects untouched by any subgraph edge: pack by heat, hottest first.
    const auto& heat = stats_.heats();
    std::vector<uint32_t> leftovers;
    for (uint32_t o : objs)
        if (bin_of[o] == kUnassigned) leftovers.push_back(o);
    std::sort(leftovers.begin(), leftovers.end(), [&](uint32_t a, uint32_t b) {
        return heat[a] != heat[b] ? heat[a] > heat[b] : a < b;
    });
    std::vector<Bin> tail;
    pack_sequential(pm, leftovers, tail);
    for (auto& bin : tail) bins.push_back(std::move(bin));

    return assemble_plan(pm, bins);
}

} // namespace driftsim

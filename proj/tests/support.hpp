#pragma once

// Shared test fixtures: hand-built graphs and independent reference models
// the implementation is checked against.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "driftsim/object_graph.hpp"

namespace testsupport {

// Builds a graph directly from per-object classes, per-class sizes and
// per-object ref lists (all ref types 0).
inline driftsim::ObjectGraph make_graph(std::vector<uint32_t> cls_of,
                                        std::vector<uint32_t> cls_size,
                                        std::vector<std::vector<uint32_t>> refs) {
    driftsim::ObjectGraph g;
    g.seed = 0;
    g.num_ref_types = 1;
    g.object_class = std::move(cls_of);
    g.class_size = std::move(cls_size);
    g.class_ref_types.resize(g.class_size.size());
    for (size_t o = 0; o < refs.size(); ++o) {
        uint32_t c = g.object_class[o];
        if (refs[o].size() > g.class_ref_types[c].size())
            g.class_ref_types[c].assign(refs[o].size(), 0);
    }
    g.ref_offset.resize(g.object_class.size() + 1);
    g.ref_offset[0] = 0;
    for (size_t o = 0; o < g.object_class.size(); ++o) {
        const auto& r = o < refs.size() ? refs[o] : std::vector<uint32_t>{};
        g.ref_offset[o + 1] = g.ref_offset[o] + r.size();
        g.ref_target.insert(g.ref_target.end(), r.begin(), r.end());
        g.ref_type.insert(g.ref_type.end(), r.size(), 0);
    }
    g.by_class.resize(g.class_size.size());
    for (uint32_t o = 0; o < g.object_class.size(); ++o)
        g.by_class[g.object_class[o]].push_back(o);
    return g;
}

// Uniform graph: n objects of one class and one size, no refs.
inline driftsim::ObjectGraph flat_graph(uint32_t n, uint32_t size) {
    return make_graph(std::vector<uint32_t>(n, 0), {size},
                      std::vector<std::vector<uint32_t>>(n));
}

// Straightforward reference LRU: recency kept as a vector scanned per access.
// Deliberately naive; the point is independence from the BufferPool code.
struct ReferenceLru {
    size_t capacity;
    std::vector<uint32_t> recency; // front = most recent
    uint64_t misses = 0;

    explicit ReferenceLru(size_t cap) : capacity(cap) {}

    bool access(uint32_t page) {
        auto it = std::find(recency.begin(), recency.end(), page);
        if (it != recency.end()) {
            recency.erase(it);
            recency.insert(recency.begin(), page);
            return true; // hit
        }
        ++misses;
        recency.insert(recency.begin(), page);
        if (recency.size() > capacity) recency.pop_back();
        return false;
    }
};

// Pre-order depth-bounded DFS, written independently of simple_traversal.
inline void reference_dfs(const driftsim::ObjectGraph& g, uint32_t oid,
                          uint32_t remaining, std::vector<uint32_t>& out) {
    out.push_back(oid);
    if (remaining == 0) return;
    for (uint32_t t : g.refs(oid)) reference_dfs(g, t, remaining - 1, out);
}

} // namespace testsupport

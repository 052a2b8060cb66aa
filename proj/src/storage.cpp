#include "driftsim/storage.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "driftsim/errors.hpp"

namespace driftsim {

void StorageConfig::validate() const {
    if (page_size == 0)
        throw ConfigError("storage.page_size", "must be >= 1");
    if (buffer_bytes / page_size == 0)
        throw ConfigError("storage.buffer_bytes", "buffer must hold at least one page");
}

uint32_t PageMap::live_page_count() const {
    uint32_t n = 0;
    for (uint32_t p = 0; p < page_count(); ++p)
        if (!retired[p]) ++n;
    return n;
}

uint32_t PageMap::new_page() {
    contents.emplace_back();
    fill.push_back(0);
    retired.push_back(0);
    return page_count() - 1;
}

BufferPool::BufferPool(uint32_t capacity) : capacity_(capacity) {
    if (capacity_ == 0)
        throw ConfigError("storage.buffer_bytes", "buffer must hold at least one page");
}

void BufferPool::ensure(uint32_t page) {
    if (page >= resident_.size()) {
        size_t n = std::max<size_t>(static_cast<size_t>(page) + 1, resident_.size() * 2);
        prev_.resize(n, kNil);
        next_.resize(n, kNil);
        resident_.resize(n, 0);
    }
}

void BufferPool::unlink(uint32_t page) {
    uint32_t p = prev_[page], n = next_[page];
    if (p != kNil) next_[p] = n; else head_ = n;
    if (n != kNil) prev_[n] = p; else tail_ = p;
    prev_[page] = next_[page] = kNil;
}

void BufferPool::push_front(uint32_t page) {
    prev_[page] = kNil;
    next_[page] = head_;
    if (head_ != kNil) prev_[head_] = page;
    head_ = page;
    if (tail_ == kNil) tail_ = page;
}

bool BufferPool::resident(uint32_t page) const {
    return page < resident_.size() && resident_[page];
}

Access BufferPool::touch(uint32_t page) {
    ensure(page);
    if (resident_[page]) {
        ++hits_;
        unlink(page);
        push_front(page);
        if (sink_) sink_->page_event(txn_, 'h', page);
        return Access::Hit;
    }
    ++misses_;
    if (sink_) sink_->page_event(txn_, 'm', page);
    push_front(page);
    resident_[page] = 1;
    ++size_;
    if (size_ > capacity_) {
        uint32_t victim = tail_;
        unlink(victim);
        resident_[victim] = 0;
        --size_;
        if (sink_) sink_->page_event(txn_, 'e', victim);
    }
    return Access::Miss;
}

void BufferPool::invalidate(uint32_t page) {
    if (!resident(page)) return;
    unlink(page);
    resident_[page] = 0;
    --size_;
}

void BufferPool::charge_clustering_read(uint32_t page) {
    ++clustering_reads_;
    if (sink_) sink_->page_event(txn_, 'r', page);
}

void BufferPool::charge_clustering_write(uint32_t page) {
    ++clustering_writes_;
    if (sink_) sink_->page_event(txn_, 'w', page);
}

PageMap place_sequential(const ObjectGraph& g, const StorageConfig& config) {
    config.validate();
    PageMap pm;
    pm.page_size = config.page_size;
    pm.page_of.assign(g.num_objects(), PageMap::kNoPage);
    pm.object_size.resize(g.num_objects());

    uint32_t page = PageMap::kNoPage;
    uint32_t used = 0;
    for (uint32_t o = 0; o < g.num_objects(); ++o) {
        uint32_t size = g.size_of(o);
        if (size > config.page_size)
            throw ConfigError("storage.page_size",
                              "object larger than one page cannot be placed");
        if (page == PageMap::kNoPage || used + size > config.page_size) {
            page = pm.new_page();
            used = 0;
        }
        pm.contents[page].push_back(o);
        used += size;
        pm.fill[page] = used;
        pm.page_of[o] = page;
        pm.object_size[o] = size;
    }
    return pm;
}

Access access_object(BufferPool& pool, const PageMap& pm, uint32_t oid) {
    if (oid >= pm.page_of.size() || pm.page_of[oid] == PageMap::kNoPage)
        throw std::logic_error("access_object: oid has no page; clustering bookkeeping bug");
    return pool.touch(pm.page_of[oid]);
}

void apply_recluster(BufferPool& pool, PageMap& pm, const ReclusterPlan& plan) {
    if (plan.empty()) return;

    const uint32_t first_new = pm.page_count();
    const uint32_t page_limit = first_new + plan.new_pages;

    // Validate before mutating. Capacity is decided by each page's net fill;
    // move order within one plan is immaterial.
    std::unordered_map<uint32_t, int64_t> fill_delta;
    std::unordered_set<uint32_t> plan_oids;
    std::unordered_set<uint32_t> touched_set; // pages whose contents change
    std::vector<ReclusterPlan::Move> effective;
    effective.reserve(plan.moves.size());
    for (const auto& mv : plan.moves) {
        if (mv.oid >= pm.page_of.size() || pm.page_of[mv.oid] == PageMap::kNoPage)
            throw RunError("apply_recluster: move references an unmapped object");
        if (!plan_oids.insert(mv.oid).second)
            throw RunError("apply_recluster: duplicate move for one object");
        uint32_t src = pm.page_of[mv.oid];
        if (mv.target_page == src) continue;
        if (mv.target_page >= page_limit)
            throw RunError("apply_recluster: move targets an unknown page");
        if (mv.target_page < first_new && pm.retired[mv.target_page])
            throw RunError("apply_recluster: move targets a retired page");
        int64_t size = pm.object_size[mv.oid];
        fill_delta[src] -= size;
        fill_delta[mv.target_page] += size;
        touched_set.insert(src);
        touched_set.insert(mv.target_page);
        effective.push_back(mv);
    }
    if (effective.empty()) return;

    for (const auto& [page, delta] : fill_delta) {
        int64_t base = page < first_new ? pm.fill[page] : 0;
        if (base + delta > static_cast<int64_t>(pm.page_size))
            throw RunError("apply_recluster: plan overfills a target page");
    }
    for (uint32_t p = first_new; p < page_limit; ++p)
        if (!touched_set.count(p))
            throw RunError("apply_recluster: declared new page receives no objects");

    // Modified pages, in id order for deterministic charging.
    std::vector<uint32_t> touched(touched_set.begin(), touched_set.end());
    std::sort(touched.begin(), touched.end());

    // Reads: every affected existing page not already buffered.
    for (uint32_t page : touched)
        if (page < first_new && !pool.resident(page))
            pool.charge_clustering_read(page);

    for (uint32_t p = first_new; p < page_limit; ++p) pm.new_page();

    // Pull moved objects out of their source pages in one pass each.
    std::unordered_set<uint32_t> moved_out;
    std::unordered_set<uint32_t> sources;
    for (const auto& mv : effective) {
        moved_out.insert(mv.oid);
        sources.insert(pm.page_of[mv.oid]);
    }
    for (uint32_t src : sources) {
        auto& objs = pm.contents[src];
        size_t w = 0;
        for (uint32_t o : objs)
            if (!moved_out.count(o)) objs[w++] = o;
        objs.resize(w);
    }
    for (const auto& mv : effective) {
        uint32_t src = pm.page_of[mv.oid];
        pm.fill[src] -= pm.object_size[mv.oid];
        pm.contents[mv.target_page].push_back(mv.oid);
        pm.fill[mv.target_page] += pm.object_size[mv.oid];
        pm.page_of[mv.oid] = mv.target_page;
    }

    // Writes: every modified page, then drop it from the buffer (written
    // through, not retained). Emptied pages retire.
    for (uint32_t page : touched) {
        pool.charge_clustering_write(page);
        pool.invalidate(page);
        if (pm.contents[page].empty()) {
            pm.retired[page] = 1;
            pm.fill[page] = 0;
        }
    }
}

} // namespace driftsim

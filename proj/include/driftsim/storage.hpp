#pragma once

#include <cstdint>
#include <vector>

#include "driftsim/object_graph.hpp"

namespace driftsim {

struct StorageConfig {
    uint32_t page_size = 4096;            // bytes
    uint64_t buffer_bytes = 4 * 1024 * 1024;
    enum class Replacement { Lru1 } replacement = Replacement::Lru1;
    enum class Placement { Sequential } placement = Placement::Sequential;

    uint32_t frame_count() const {
        return static_cast<uint32_t>(buffer_bytes / page_size);
    }
    void validate() const;
};

struct IoTally {
    uint64_t transaction_io = 0; // page reads serving workload traversals
    uint64_t clustering_io = 0;  // page reads/writes from reorganization
    uint64_t total() const { return transaction_io + clustering_io; }
};

// Object-to-page image. Page ids are stable; emptied pages are retired and
// never reused within a run. Object sizes are copied in at placement so the
// image is self-contained for capacity checks.
struct PageMap {
    static constexpr uint32_t kNoPage = 0xFFFFFFFFu;

    uint32_t page_size = 0;
    std::vector<uint32_t> page_of;               // oid -> page id
    std::vector<uint32_t> object_size;           // oid -> bytes
    std::vector<std::vector<uint32_t>> contents; // page id -> oids, layout order
    std::vector<uint32_t> fill;                  // page id -> used bytes
    std::vector<uint8_t> retired;                // page id -> retired flag

    uint32_t page_count() const { return static_cast<uint32_t>(contents.size()); }
    uint32_t live_page_count() const;
    uint32_t new_page(); // appends an empty live page, returns its id
};

// Receives buffer and reclustering page events when page tracing is on.
// Kinds: 'h' hit, 'm' miss, 'e' evict, 'r' clustering read, 'w' clustering write.
struct PageEventSink {
    virtual ~PageEventSink() = default;
    virtual void page_event(uint64_t txn, char kind, uint32_t page) = 0;
};

enum class Access { Hit, Miss };

// Fixed-capacity LRU frame pool over page ids, plus the run's I/O tally.
class BufferPool {
public:
    explicit BufferPool(uint32_t capacity);

    Access touch(uint32_t page); // workload access; Miss counts transaction I/O
    bool resident(uint32_t page) const;
    void invalidate(uint32_t page); // drop without write-back

    void charge_clustering_read(uint32_t page);
    void charge_clustering_write(uint32_t page);

    uint32_t capacity() const { return capacity_; }
    uint32_t resident_count() const { return size_; }
    uint64_t hits() const { return hits_; }
    uint64_t misses() const { return misses_; }
    IoTally tally() const { return {misses_, clustering_reads_ + clustering_writes_}; }
    uint64_t clustering_reads() const { return clustering_reads_; }
    uint64_t clustering_writes() const { return clustering_writes_; }

    void set_sink(PageEventSink* sink) { sink_ = sink; }
    void set_txn(uint64_t txn) { txn_ = txn; }

private:
    void ensure(uint32_t page);
    void unlink(uint32_t page);
    void push_front(uint32_t page);

    static constexpr uint32_t kNil = 0xFFFFFFFFu;
    uint32_t capacity_;
    uint32_t size_ = 0;
    uint32_t head_ = kNil; // most recently used
    uint32_t tail_ = kNil; // least recently used
    std::vector<uint32_t> prev_, next_;
    std::vector<uint8_t> resident_;
    uint64_t hits_ = 0, misses_ = 0;
    uint64_t clustering_reads_ = 0, clustering_writes_ = 0;
    PageEventSink* sink_ = nullptr;
    uint64_t txn_ = 0;
};

// Packs objects into pages in object-id order; an object that does not fit
// in the current page's remaining space opens a new page.
PageMap place_sequential(const ObjectGraph& g, const StorageConfig& config);

Access access_object(BufferPool& pool, const PageMap& pm, uint32_t oid);

// One reorganization step: moves plus fresh-page allocations. Targets at or
// above the current page count denote new pages and must be contiguous.
struct ReclusterPlan {
    struct Move {
        uint32_t oid;
        uint32_t target_page;
    };
    std::vector<Move> moves;
    uint32_t new_pages = 0;

    bool empty() const { return moves.empty(); }
};

// Applies the plan atomically. Charging rule: one read per non-resident
// affected existing page, one write per modified page (new pages included).
// Rewritten pages are dropped from the buffer, not retained. An overfull
// target rejects the whole plan with no mutation.
void apply_recluster(BufferPool& pool, PageMap& pm, const ReclusterPlan& plan);

} // namespace driftsim

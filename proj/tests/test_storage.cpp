#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "driftsim/errors.hpp"
#include "driftsim/rng.hpp"
#include "driftsim/storage.hpp"
#include "support.hpp"

using namespace driftsim;
using testsupport::flat_graph;

namespace {

// Consistency between page_of, contents and fill, and page capacity.
void check_map_invariants(const PageMap& pm) {
    std::vector<uint32_t> seen(pm.page_of.size(), 0);
    for (uint32_t p = 0; p < pm.page_count(); ++p) {
        uint64_t bytes = 0;
        for (uint32_t o : pm.contents[p]) {
            CHECK(pm.page_of[o] == p);
            ++seen[o];
            bytes += pm.object_size[o];
        }
        CHECK(bytes == pm.fill[p]);
        CHECK(pm.fill[p] <= pm.page_size);
        if (pm.retired[p]) CHECK(pm.contents[p].empty());
    }
    for (uint32_t o = 0; o < seen.size(); ++o) CHECK(seen[o] == 1);
}

} // namespace

TEST_CASE("sequential placement packs in id order") {
    ObjectGraph g = flat_graph(3, 2000);
    StorageConfig sc;
    PageMap pm = place_sequential(g, sc);
    REQUIRE(pm.page_count() == 2);
    CHECK(pm.contents[0] == std::vector<uint32_t>{0, 1});
    CHECK(pm.contents[1] == std::vector<uint32_t>{2});
    check_map_invariants(pm);
}

TEST_CASE("single object lands on a single page") {
    ObjectGraph g = flat_graph(1, 100);
    PageMap pm = place_sequential(g, StorageConfig{});
    CHECK(pm.page_count() == 1);
}

TEST_CASE("an object larger than a page is a configuration error") {
    ObjectGraph g = flat_graph(1, 5000);
    CHECK_THROWS_AS(place_sequential(g, StorageConfig{}), ConfigError);
}

TEST_CASE("generated database occupies the expected page range") {
    ObjectGraph g = generate_database(DbParams{});
    StorageConfig sc;
    PageMap pm = place_sequential(g, sc);
    uint64_t lower = (g.total_bytes() + sc.page_size - 1) / sc.page_size;
    CHECK(pm.page_count() >= lower);
    CHECK(pm.page_count() <= 2 * lower);
    CHECK(sc.frame_count() == 1024);
}

TEST_CASE("LRU base cases") {
    BufferPool pool(2);
    CHECK(pool.touch(10) == Access::Miss);
    CHECK(pool.touch(10) == Access::Hit);

    // capacity 2, access string A B C A: every access misses
    BufferPool p2(2);
    CHECK(p2.touch(1) == Access::Miss);
    CHECK(p2.touch(2) == Access::Miss);
    CHECK(p2.touch(3) == Access::Miss);
    CHECK(p2.touch(1) == Access::Miss);
    CHECK(p2.misses() == 4);
    CHECK(p2.hits() == 0);
}

TEST_CASE("LRU matches the reference implementation hit for hit") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        uint32_t pages = 1 + static_cast<uint32_t>(rng.bounded(26));
        uint32_t cap = 1 + static_cast<uint32_t>(rng.bounded(8));
        uint32_t len = 1 + static_cast<uint32_t>(rng.bounded(64));

        BufferPool pool(cap);
        testsupport::ReferenceLru ref(cap);
        for (uint32_t i = 0; i < len; ++i) {
            uint32_t page = static_cast<uint32_t>(rng.bounded(pages));
            bool hit = pool.touch(page) == Access::Hit;
            CHECK(hit == ref.access(page));
        }
        CHECK(pool.misses() == ref.misses);
        CHECK(pool.resident_count() <= cap);
    }
}

TEST_CASE("empty plan is a no-op") {
    ObjectGraph g = flat_graph(4, 1000);
    PageMap pm = place_sequential(g, StorageConfig{});
    BufferPool pool(4);
    PageMap before = pm;
    apply_recluster(pool, pm, ReclusterPlan{});
    CHECK(pool.tally().clustering_io == 0);
    CHECK(pm.page_of == before.page_of);
    CHECK(pm.contents == before.contents);
}

TEST_CASE("recluster charging: both pages resident") {
    // 4 x 1000-byte objects on 4096-byte pages: {0,1,2,3} on page 0, nothing
    // else, so build 8 objects for two pages
    ObjectGraph g = flat_graph(8, 1000);
    PageMap pm = place_sequential(g, StorageConfig{});
    REQUIRE(pm.page_count() == 2);
    BufferPool pool(8);
    access_object(pool, pm, 0);
    access_object(pool, pm, 4);
    uint64_t base = pool.tally().clustering_io;

    // swap one object from each page
    ReclusterPlan plan;
    plan.moves = {{0, 1}, {4, 0}};
    apply_recluster(pool, pm, plan);
    CHECK(pool.tally().clustering_io - base == 2); // two writes, zero reads
    CHECK(pool.clustering_reads() == 0);
    CHECK_FALSE(pool.resident(0));
    CHECK_FALSE(pool.resident(1));
    check_map_invariants(pm);
}

TEST_CASE("recluster charging: one resident, one cold page") {
    ObjectGraph g = flat_graph(7, 1000);
    PageMap pm = place_sequential(g, StorageConfig{});
    REQUIRE(pm.page_count() == 2); // {0,1,2,3} and {4,5,6}
    BufferPool pool(8);
    access_object(pool, pm, 0); // page 0 resident, page 1 cold

    ReclusterPlan plan;
    plan.moves = {{0, 1}}; // page 1 has 3000 bytes used, object fits
    apply_recluster(pool, pm, plan);
    CHECK(pool.clustering_reads() == 1);  // page 1 had to be read
    CHECK(pool.clustering_writes() == 2); // both pages rewritten
    CHECK(pm.page_of[0] == 1);
    check_map_invariants(pm);
}

TEST_CASE("moves to fresh pages retire emptied sources") {
    ObjectGraph g = flat_graph(4, 1000);
    PageMap pm = place_sequential(g, StorageConfig{});
    REQUIRE(pm.page_count() == 1);
    BufferPool pool(4);

    ReclusterPlan plan;
    plan.new_pages = 1;
    plan.moves = {{0, 1}, {1, 1}, {2, 1}, {3, 1}};
    apply_recluster(pool, pm, plan);
    CHECK(pm.page_count() == 2);
    CHECK(pm.retired[0]);
    CHECK(pm.contents[1] == std::vector<uint32_t>{0, 1, 2, 3});
    // one cold read of page 0, two writes (old page emptied, new page written)
    CHECK(pool.clustering_reads() == 1);
    CHECK(pool.clustering_writes() == 2);
    check_map_invariants(pm);
}

TEST_CASE("overfull plans are rejected without mutation") {
    ObjectGraph g = flat_graph(8, 1000);
    PageMap pm = place_sequential(g, StorageConfig{});
    BufferPool pool(8);
    PageMap before = pm;

    ReclusterPlan plan;
    plan.moves = {{4, 0}, {5, 0}}; // page 0 already holds 4000 of 4096 bytes
    CHECK_THROWS_AS(apply_recluster(pool, pm, plan), RunError);
    CHECK(pm.page_of == before.page_of);
    CHECK(pm.contents == before.contents);
    CHECK(pm.fill == before.fill);
    CHECK(pool.tally().clustering_io == 0);
}

TEST_CASE("random move plans preserve conservation") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        uint32_t n = 6 + static_cast<uint32_t>(rng.bounded(20));
        ObjectGraph g = flat_graph(n, 500 + static_cast<uint32_t>(rng.bounded(900)));
        PageMap pm = place_sequential(g, StorageConfig{});
        BufferPool pool(4);

        // move a random subset onto fresh pages, two per page
        std::vector<uint32_t> picks;
        for (uint32_t o = 0; o < n; ++o)
            if (rng.bounded(2)) picks.push_back(o);
        ReclusterPlan plan;
        for (size_t i = 0; i < picks.size(); ++i) {
            uint32_t target = pm.page_count() + static_cast<uint32_t>(i / 2);
            plan.moves.push_back({picks[i], target});
        }
        plan.new_pages = static_cast<uint32_t>((picks.size() + 1) / 2);
        if (plan.moves.empty()) continue;

        uint64_t before_io = pool.tally().clustering_io;
        apply_recluster(pool, pm, plan);
        CHECK(pool.tally().clustering_io > before_io);
        check_map_invariants(pm);
    }
}

TEST_CASE("unmapped object access is an internal error") {
    ObjectGraph g = flat_graph(2, 100);
    PageMap pm = place_sequential(g, StorageConfig{});
    BufferPool pool(2);
    CHECK_THROWS_AS(access_object(pool, pm, 7), std::logic_error);
}

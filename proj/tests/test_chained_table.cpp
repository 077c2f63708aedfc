#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <emhash/chained_table.hpp>
#include <emhash/errors.hpp>
#include <emhash/hashing.hpp>

#include <algorithm>
#include <random>
#include <set>

using namespace emhash;

namespace {

constexpr std::uint32_t u16 = 16;

// Hash values whose top log2(d) bits select bucket j, in a 2^16 universe.
HashValue in_bucket(std::uint64_t j, std::uint64_t d, std::uint64_t offset) {
    unsigned shift = u16 - log2_exact(d);
    return (j << shift) + offset;
}

} // namespace

TEST_CASE("a fresh table") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    ChainedTable t(dev, 16, u16);
    CHECK(t.buckets() == 16);
    CHECK(t.item_count() == 0);
    CHECK(t.load_factor() == 0);
    CHECK(dev.ledger().charged == 0);
    CHECK(t.lookup(1234) == LookupResult{false, 1});
    CHECK_THROWS_AS(ChainedTable(dev, 12, u16), ParameterError);
}

TEST_CASE("insert costs") {
    BlockDevice dev(4, 64, ChargingPolicy::combined);
    ChainedTable t(dev, 4, u16);
    CHECK(t.insert(in_bucket(0, 4, 1)) == 1);
    for (int k = 2; k <= 4; ++k)
        t.insert(in_bucket(0, 4, k));
    CHECK(t.chain_length(0) == 1);
    // Primary full, chain empty: read primary, write the new overflow block.
    CHECK(t.insert(in_bucket(0, 4, 5)) == 2);
    CHECK(t.chain_length(0) == 2);
    CHECK_THROWS_AS(t.insert(in_bucket(0, 4, 5)), DuplicateError);
    CHECK(t.item_count() == 5);
}

TEST_CASE("insert under the split policy") {
    BlockDevice dev(4, 64, ChargingPolicy::split);
    ChainedTable t(dev, 4, u16);
    CHECK(t.insert(in_bucket(1, 4, 1)) == 2);
}

TEST_CASE("lookup costs follow chain position") {
    BlockDevice dev(4, 64, ChargingPolicy::combined);
    ChainedTable t(dev, 4, u16);
    for (int k = 1; k <= 6; ++k)
        t.insert(in_bucket(2, 4, k));
    CHECK(t.lookup(in_bucket(2, 4, 1)) == LookupResult{true, 1});
    CHECK(t.lookup(in_bucket(2, 4, 5)) == LookupResult{true, 2});
    CHECK(t.lookup(in_bucket(2, 4, 99)) == LookupResult{false, 2});
    CHECK(t.lookup(in_bucket(3, 4, 99)) == LookupResult{false, 1});
}

TEST_CASE("iterate_buckets reads every chain in hash order") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    ChainedTable t(dev, 16, u16);
    t.iterate_buckets([](std::uint64_t, std::span<const HashValue>) {});
    CHECK(dev.ledger().charged == 16);

    std::mt19937_64 rng(3);
    std::set<HashValue> stored;
    while (stored.size() < 60) {
        HashValue h = rng() % 65536;
        if (stored.insert(h).second)
            t.insert(h);
    }
    REQUIRE(t.max_chain_len() == 1);
    dev.reset_ledger();
    std::vector<HashValue> seen;
    std::uint64_t expected_bucket = 0;
    t.iterate_buckets([&](std::uint64_t j, std::span<const HashValue> items) {
        CHECK(j == expected_bucket++);
        seen.insert(seen.end(), items.begin(), items.end());
    });
    CHECK(dev.ledger().charged == 16);
    CHECK(std::is_sorted(seen.begin(), seen.end()));
    CHECK(seen == std::vector<HashValue>(stored.begin(), stored.end()));
}

TEST_CASE("average successful query") {
    SUBCASE("all in primary blocks") {
        BlockDevice dev(8, 64, ChargingPolicy::combined);
        ChainedTable t(dev, 4, u16);
        for (std::uint64_t j = 0; j < 4; ++j)
            for (int k = 0; k < 8; ++k)
                t.insert(in_bucket(j, 4, k));
        auto before = dev.ledger().charged;
        CHECK(t.avg_successful_query() == 1.0);
        CHECK(dev.ledger().charged == before);
    }
    SUBCASE("one bucket overfilled with 2b items") {
        BlockDevice dev(8, 64, ChargingPolicy::combined);
        ChainedTable t(dev, 1, u16);
        for (int k = 0; k < 16; ++k)
            t.insert(static_cast<HashValue>(k * 1000));
        CHECK(t.avg_successful_query() == doctest::Approx(1.5));
    }
    SUBCASE("empty table") {
        BlockDevice dev(8, 64, ChargingPolicy::combined);
        ChainedTable t(dev, 4, u16);
        CHECK_THROWS_AS(t.avg_successful_query(), PreconditionError);
    }
}

TEST_CASE("load factor 1/2 at b=32 keeps queries near one I/O") {
    Params p;
    p.b = 32;
    p.m = 1024;
    p.u_bits = 31;
    p.n = 1u << 14;
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        p.seed = seed;
        BlockDevice dev(p);
        ChainedTable t(dev, p.n / (p.b / 2), p.u_bits);
        for (HashValue h : distinct_workload(p, p.n))
            t.insert(h);
        CHECK(t.load_factor() == doctest::Approx(0.5));
        total += t.avg_successful_query();
    }
    CHECK(total / 5 <= 1.01);
}

TEST_CASE("queries degrade as the load grows (small b)") {
    Params p;
    p.b = 8;
    p.m = 64;
    // b > log u would cap the universe at 128 items; the table itself does not need it.
    p.u_bits = 30;
    p.n = 1u << 12;
    std::vector<double> by_alpha;
    for (double alpha : {0.25, 0.5, 0.9, 2.0}) {
        BlockDevice dev(p);
        std::uint64_t d = 1;
        while (static_cast<double>(p.n) > alpha * static_cast<double>(d * p.b))
            d *= 2;
        ChainedTable t(dev, d, p.u_bits);
        for (HashValue h : distinct_workload(p, p.n))
            t.insert(h);
        by_alpha.push_back(t.avg_successful_query());
    }
    CHECK(std::is_sorted(by_alpha.begin(), by_alpha.end()));
    CHECK(by_alpha.back() > 1.1);
}

TEST_CASE("merge_sorted stores exactly the union") {
    BlockDevice dev(8, 256, ChargingPolicy::combined);
    ChainedTable t(dev, 8, u16);
    std::mt19937_64 rng(11);
    std::set<HashValue> all;
    for (int round = 0; round < 5; ++round) {
        std::set<HashValue> batch;
        while (batch.size() < 40) {
            HashValue h = rng() % 65536;
            if (!all.contains(h))
                batch.insert(h);
        }
        std::vector<HashValue> sorted(batch.begin(), batch.end());
        t.merge_sorted(sorted, round % 2 ? MergeScan::full : MergeScan::touched);
        all.insert(batch.begin(), batch.end());
        auto items = t.items();
        std::sort(items.begin(), items.end());
        REQUIRE(items == std::vector<HashValue>(all.begin(), all.end()));
        // Chains stay packed.
        for (std::uint64_t j = 0; j < t.buckets(); ++j)
            REQUIRE(t.chain_length(j) == std::max<std::uint64_t>(1, (t.bucket_size(j) + 7) / 8));
    }
    std::vector<HashValue> unsorted = {5, 3};
    CHECK_THROWS_AS(t.merge_sorted(unsorted), PreconditionError);
}

TEST_CASE("merge_sorted into an empty table writes each touched bucket once") {
    BlockDevice dev(8, 256, ChargingPolicy::combined);
    ChainedTable t(dev, 8, u16);
    std::vector<HashValue> sorted;
    for (std::uint64_t j = 0; j < 8; j += 2)
        for (int k = 0; k < 4; ++k)
            sorted.push_back(in_bucket(j, 8, k));
    dev.enable_trace();
    t.merge_sorted(sorted);
    CHECK(dev.ledger().charged == 4);
    CHECK(replay_charges(dev.trace(), dev.policy()) == 4);
}

TEST_CASE("drain returns everything sorted and releases blocks") {
    BlockDevice dev(4, 64, ChargingPolicy::combined);
    std::vector<HashValue> items;
    {
        ChainedTable t(dev, 4, u16);
        for (int k = 0; k < 30; ++k) {
            HashValue h = static_cast<HashValue>((k * 7919) % 65536);
            t.insert(h);
            items.push_back(h);
        }
        auto drained = t.drain();
        std::sort(items.begin(), items.end());
        CHECK(drained == items);
        CHECK(t.released());
        CHECK(dev.allocated_blocks() == 0);
    }
    {
        ChainedTable t(dev, 4, u16);
        t.insert(1);
    }
    CHECK(dev.allocated_blocks() == 0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <emhash/errors.hpp>
#include <emhash/io_sim.hpp>

#include <random>

using namespace emhash;

namespace {

std::vector<HashValue> iota_items(std::size_t k, HashValue from = 0) {
    std::vector<HashValue> v(k);
    for (std::size_t i = 0; i < k; ++i)
        v[i] = from + i;
    return v;
}

} // namespace

TEST_CASE("read_block") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    auto i = dev.allocate(1);
    CHECK(dev.read_block(i).empty());
    CHECK(dev.ledger().charged == 1);
    dev.read_block(i);
    CHECK(dev.ledger().charged == 2);
    CHECK(dev.ledger().reads == 2);
    CHECK_THROWS_AS(dev.read_block(99), DeviceError);
}

TEST_CASE("write then read returns the written items") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    auto i = dev.allocate(1);
    auto items = iota_items(8, 100);
    dev.write_block(i, items);
    auto back = dev.read_block(i);
    CHECK(std::vector<HashValue>(back.begin(), back.end()) == items);
    CHECK_THROWS_AS(dev.write_block(i, iota_items(9)), CapacityError);
}

TEST_CASE("combined policy merges a read with the write-back") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    auto i = dev.allocate(2);
    dev.read_block(i);
    dev.write_block(i, iota_items(3));
    CHECK(dev.ledger().charged == 1);
    CHECK(dev.ledger().reads == 1);
    CHECK(dev.ledger().writes == 1);
    // A write to another block is not merged.
    dev.read_block(i);
    dev.write_block(i + 1, iota_items(3));
    CHECK(dev.ledger().charged == 3);
}

TEST_CASE("split policy charges read and write separately") {
    BlockDevice dev(8, 64, ChargingPolicy::split);
    auto i = dev.allocate(1);
    dev.read_block(i);
    dev.write_block(i, iota_items(3));
    CHECK(dev.ledger().charged == 2);
}

TEST_CASE("read_modify_write") {
    SUBCASE("combined costs 1") {
        BlockDevice dev(8, 64, ChargingPolicy::combined);
        auto i = dev.allocate(1);
        dev.read_modify_write(i, [](auto& v) { v.push_back(7); });
        CHECK(dev.ledger().charged == 1);
        CHECK(dev.inspect(i).size() == 1);
    }
    SUBCASE("split costs 2") {
        BlockDevice dev(8, 64, ChargingPolicy::split);
        auto i = dev.allocate(1);
        dev.read_modify_write(i, [](auto& v) { v.push_back(7); });
        CHECK(dev.ledger().charged == 2);
    }
    SUBCASE("overfill is rejected without a charge") {
        BlockDevice dev(8, 64, ChargingPolicy::combined);
        auto i = dev.allocate(1);
        dev.write_block(i, iota_items(8));
        auto before = dev.ledger();
        CHECK_THROWS_AS(dev.read_modify_write(i, [](auto& v) { v.push_back(1); }), CapacityError);
        CHECK(dev.ledger().charged == before.charged);
        CHECK(dev.inspect(i).size() == 8);
    }
}

TEST_CASE("allocate is free and returns disjoint ranges") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    CHECK(dev.allocate(32) == 0);
    CHECK(dev.allocate(5) == 32);
    CHECK(dev.block_count() == 37);
    CHECK(dev.ledger().charged == 0);
    dev.release(3, 2);
    CHECK_FALSE(dev.is_allocated(3));
    CHECK(dev.allocated_blocks() == 35);
    CHECK_THROWS_AS(dev.read_block(3), DeviceError);
}

TEST_CASE("sequential_scan charges") {
    for (auto policy : {ChargingPolicy::combined, ChargingPolicy::split}) {
        for (bool rewrite : {false, true}) {
            BlockDevice dev(8, 64, policy);
            auto first = dev.allocate(32);
            dev.sequential_scan(first, 32, [&](BlockIndex, std::vector<HashValue>& v) {
                if (rewrite)
                    v.push_back(1);
                return rewrite;
            });
            std::uint64_t expect = 32;
            if (rewrite && policy == ChargingPolicy::split)
                expect = 64;
            CHECK(dev.ledger().charged == expect);
        }
    }
}

TEST_CASE("measurement scope keeps probes off the main ledger") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    auto i = dev.allocate(1);
    dev.read_block(i);
    {
        auto scope = dev.measure();
        dev.read_block(i);
        dev.read_block(i);
        CHECK(&dev.active_ledger() != &dev.ledger());
    }
    CHECK(dev.ledger().charged == 1);
    CHECK(dev.measurement_ledger().charged == 2);
    // The merge window survives the scope: this write-back is still free.
    dev.write_block(i, iota_items(2));
    CHECK(dev.ledger().charged == 1);
}

TEST_CASE("memory gauge") {
    BlockDevice dev(8, 64, ChargingPolicy::combined);
    dev.acquire_memory(60);
    CHECK_THROWS_AS(dev.acquire_memory(5), CapacityError);
    dev.release_memory(10);
    dev.acquire_memory(14);
    CHECK(dev.memory_in_use() == 64);
    CHECK(dev.ledger().memory_words_peak == 64);
}

TEST_CASE("trace replay reproduces charges for random access mixes") {
    for (auto policy : {ChargingPolicy::combined, ChargingPolicy::split}) {
        BlockDevice dev(16, 64, policy);
        dev.enable_trace();
        auto first = dev.allocate(20);
        std::mt19937_64 rng(42);
        for (int step = 0; step < 5000; ++step) {
            BlockIndex i = first + rng() % 20;
            switch (rng() % 4) {
            case 0:
                dev.read_block(i);
                break;
            case 1:
                dev.write_block(i, iota_items(rng() % 17));
                break;
            case 2:
                dev.read_modify_write(i, [](auto& v) {
                    if (!v.empty())
                        v.pop_back();
                });
                break;
            default:
                dev.sequential_scan(i, 1 + (first + 20 - i - 1) % 4, [&](BlockIndex, auto&) { return rng() % 2 == 0; });
            }
        }
        CHECK(replay_charges(dev.trace(), policy) == dev.ledger().charged);
        std::uint64_t summed = 0;
        for (const auto& a : dev.trace())
            summed += a.charge;
        CHECK(summed == dev.ledger().charged);
    }
}

TEST_CASE("replay_charges on a hand-written trace") {
    std::vector<Access> trace = {
        {AccessKind::read, 0, 1},
        {AccessKind::write, 0, 0},
        {AccessKind::write, 0, 1},
        {AccessKind::read, 1, 1},
        {AccessKind::write, 2, 1},
        {AccessKind::read_modify_write, 3, 1},
    };
    CHECK(replay_charges(trace, ChargingPolicy::combined) == 5);
    CHECK(replay_charges(trace, ChargingPolicy::split) == 7);
}

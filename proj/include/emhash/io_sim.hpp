#pragma once

#include <emhash/params.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emhash {

using BlockIndex = std::uint64_t;

enum class AccessKind { read, write, read_modify_write };

std::string_view to_string(AccessKind kind);

// One block access as recorded in a trace, with the charge it incurred.
struct Access {
    AccessKind kind;
    BlockIndex block;
    std::uint64_t charge;

    bool operator==(const Access&) const = default;
};

/// I/O counters for one accounting context.
///
/// Under the split policy `charged == reads + writes`. Under the combined
/// policy a write that immediately follows a read of the same block is free,
/// so `charged <= reads + writes`.
struct IoLedger {
    ChargingPolicy policy = ChargingPolicy::combined;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint64_t charged = 0;
    std::uint64_t memory_words_in_use = 0;
    std::uint64_t memory_words_peak = 0;

    // CSV fragment: reads,writes,charged,policy
    static std::string csv_header();
    std::string csv_fragment() const;
};

/// Recomputes the total charge of a trace from the access kinds alone.
std::uint64_t replay_charges(std::span<const Access> trace, ChargingPolicy policy);

/// Simulated disk of b-item blocks with exact I/O accounting.
///
/// Allocation and release are bookkeeping and cost nothing; every block access
/// is charged to the active ledger. The device also tracks the memory gauge
/// (item words held by memory-resident structures) against the budget m.
class BlockDevice {
public:
    BlockDevice(std::uint32_t block_capacity, std::uint64_t memory_words, ChargingPolicy policy);
    explicit BlockDevice(const Params& params);

    BlockDevice(const BlockDevice&) = delete;
    BlockDevice& operator=(const BlockDevice&) = delete;

    std::uint32_t block_capacity() const { return capacity_; }
    std::uint64_t memory_capacity() const { return memory_capacity_; }
    ChargingPolicy policy() const { return main_.policy; }

    // Appends `count` fresh empty blocks; returns the first index.
    BlockIndex allocate(std::uint64_t count);

    // Drops the contents of [first, first+count); the indices become unallocated.
    void release(BlockIndex first, std::uint64_t count = 1);

    bool is_allocated(BlockIndex i) const;
    std::uint64_t block_count() const { return blocks_.size(); }
    std::uint64_t allocated_blocks() const { return live_blocks_; }

    // The returned span is valid until the block is next written or released.
    std::span<const HashValue> read_block(BlockIndex i);
    void write_block(BlockIndex i, std::span<const HashValue> items);

    // Reads block i, hands its contents to `mutate` and writes the result back.
    // If `mutate` throws, or leaves more than b items, nothing is charged or changed.
    void read_modify_write(BlockIndex i, const std::function<void(std::vector<HashValue>&)>& mutate);

    // Visits [first, first+count) in order. The visitor returns true when it
    // rewrote the items; such blocks are charged as read-modify-writes.
    void sequential_scan(BlockIndex first, std::uint64_t count,
                         const std::function<bool(BlockIndex, std::vector<HashValue>&)>& visitor);

    // Uncharged view, for tests and measurement enumeration.
    std::span<const HashValue> inspect(BlockIndex i) const;

    // Memory gauge. Throws CapacityError if the budget m would be exceeded.
    void acquire_memory(std::uint64_t words);
    void release_memory(std::uint64_t words);
    std::uint64_t memory_in_use() const { return main_.memory_words_in_use; }

    const IoLedger& ledger() const { return main_; }
    // Ledger currently receiving charges (the measurement ledger inside a MeasurementScope).
    const IoLedger& active_ledger() const { return *active_; }
    const IoLedger& measurement_ledger() const { return side_; }
    void reset_ledger();

    void enable_trace(bool on = true) { tracing_ = on; }
    const std::vector<Access>& trace() const { return trace_; }
    void clear_trace() { trace_.clear(); }

    /// Redirects all block accesses to the measurement ledger while alive, so
    /// query probes taken for statistics never touch insertion accounting.
    class MeasurementScope {
    public:
        explicit MeasurementScope(BlockDevice& dev);
        ~MeasurementScope();
        MeasurementScope(const MeasurementScope&) = delete;
        MeasurementScope& operator=(const MeasurementScope&) = delete;

    private:
        BlockDevice& dev_;
        IoLedger* saved_;
        std::optional<BlockIndex> saved_last_read_;
    };

    MeasurementScope measure() { return MeasurementScope(*this); }

private:
    struct Block {
        std::vector<HashValue> items;
        bool allocated = false;
    };

    Block& checked(BlockIndex i);
    const Block& checked(BlockIndex i) const;
    void check_fits(std::size_t count) const;
    void charge(AccessKind kind, BlockIndex i);

    std::uint32_t capacity_;
    std::uint64_t memory_capacity_;
    std::vector<Block> blocks_;
    std::uint64_t live_blocks_ = 0;

    IoLedger main_;
    IoLedger side_;
    IoLedger* active_ = &main_;
    // Block read by the most recent access, if that access was a plain read.
    std::optional<BlockIndex> last_read_;

    bool tracing_ = false;
    std::vector<Access> trace_;
};

} // namespace emhash

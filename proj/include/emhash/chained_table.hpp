#pragma once

#include <emhash/io_sim.hpp>
#include <emhash/params.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace emhash {

struct LookupResult {
    bool found = false;
    std::uint64_t ios = 0;

    bool operator==(const LookupResult&) const = default;
};

struct ChainedStats {
    std::uint64_t d = 0;
    std::uint64_t item_count = 0;
    double load_factor = 0;
    double avg_query = 0;
    std::uint64_t max_chain_len = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

// How merge_sorted treats buckets that receive no incoming items.
enum class MergeScan {
    // Only buckets receiving items are accessed.
    touched,
    // Every bucket chain is read, as in a full sequential pass over the table.
    full,
};

/// External hash table with chaining.
///
/// Bucket j owns a primary block plus an overflow chain. Chains are kept
/// packed: every chain block except the last is full. Bucket j holds exactly
/// the items whose top log2(d) hash bits equal j, so ascending bucket order is
/// ascending hash order.
///
/// The table owns its blocks and releases them on destruction.
class ChainedTable {
public:
    ChainedTable(BlockDevice& dev, std::uint64_t buckets, std::uint32_t u_bits);
    ~ChainedTable();

    ChainedTable(ChainedTable&& other) noexcept;
    ChainedTable& operator=(ChainedTable&& other) noexcept;
    ChainedTable(const ChainedTable&) = delete;
    ChainedTable& operator=(const ChainedTable&) = delete;

    /// Walks the chain of h's bucket and appends h to the last block, or to a
    /// fresh overflow block when the last one is full. Returns the I/Os charged.
    /// Throws DuplicateError if h is already stored.
    std::uint64_t insert(HashValue h);

    // Probes the chain from the primary block until h is found or the chain ends.
    LookupResult lookup(HashValue h);

    // Reads every chain in bucket order; the visitor receives each bucket's items sorted.
    void iterate_buckets(const std::function<void(std::uint64_t, std::span<const HashValue>)>& visitor);

    // Reads the whole chain of bucket j; items are returned sorted.
    std::vector<HashValue> read_bucket(std::uint64_t j);

    /// Merges `sorted` (ascending, not already present) into the table in one
    /// pass over the buckets. A touched non-empty chain has its full blocks read
    /// and its last block rewritten; new overflow blocks are written directly.
    /// Empty buckets are written without a read.
    void merge_sorted(std::span<const HashValue> sorted, MergeScan scan = MergeScan::touched);

    /// Scans the whole table, returns all items in ascending order and releases
    /// every block. The table is empty and unusable afterwards.
    std::vector<HashValue> drain();

    // Mean lookup I/Os over all stored items, charged to the measurement ledger.
    double avg_successful_query();
    // Same, over `samples` items drawn uniformly with replacement.
    double avg_successful_query(std::uint64_t samples, std::uint64_t seed);

    // Uncharged enumeration of stored items, in bucket order.
    std::vector<HashValue> items() const;

    std::uint64_t buckets() const { return d_; }
    std::uint64_t item_count() const { return items_; }
    double load_factor() const;
    std::uint64_t chain_length(std::uint64_t j) const { return 1 + chains_[j].overflow.size(); }
    std::uint64_t bucket_size(std::uint64_t j) const { return chains_[j].count; }
    std::uint64_t max_chain_len() const;
    std::uint64_t total_blocks() const;
    std::uint64_t bucket_of(HashValue h) const;
    bool released() const { return released_; }

    ChainedStats stats();

private:
    struct Chain {
        std::vector<BlockIndex> overflow;
        std::uint64_t count = 0;
    };

    BlockIndex block_at(std::uint64_t j, std::size_t pos) const;
    void append_to_bucket(std::uint64_t j, std::span<const HashValue> incoming);
    void release_blocks();
    void require_live() const;

    BlockDevice* dev_;
    std::uint64_t d_;
    std::uint32_t u_bits_;
    unsigned shift_;
    BlockIndex primary_ = 0;
    std::vector<Chain> chains_;
    std::uint64_t items_ = 0;
    bool released_ = false;
};

} // namespace emhash

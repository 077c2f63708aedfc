#pragma once

#include <emhash/chained_table.hpp>
#include <emhash/io_sim.hpp>
#include <emhash/params.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace emhash {

struct SeriesStats {
    std::uint32_t gamma = 0;
    std::uint64_t levels_nonempty = 0;
    double t_u_amortized = 0;
    double t_q_avg = 0;
    std::uint64_t charged = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

/// Logarithmic-method hierarchy of hash tables H_0, H_1, ...
///
/// H_0 lives in memory and holds up to m/2 items. For k >= 1, H_k is an
/// on-disk ChainedTable with gamma^k * m/b buckets holding up to
/// gamma^k * m/2 items (load factor <= 1/2). A full H_k is merged into
/// H_{k+1} by a parallel scan; each H_k bucket feeds gamma consecutive
/// buckets of H_{k+1}. Migrations cascade eagerly.
class LogSeries {
public:
    LogSeries(BlockDevice& dev, const Params& params, std::uint32_t gamma);

    LogSeries(LogSeries&&) noexcept = default;
    LogSeries& operator=(LogSeries&&) noexcept = default;

    /// Adds h to H_0 (no I/O) and migrates when H_0 reaches m/2 items.
    /// Throws DuplicateError if h was already inserted into this series.
    void insert(HashValue h);

    // insert() without the duplicate check; the caller guarantees h is new.
    void insert_unchecked(HashValue h);

    // Adds h to H_0 without triggering a migration. H_0 must not be full.
    void stage(HashValue h);

    /// Moves every item of the full level k into level k+1, cascading while
    /// the target fills up. Returns the I/Os charged, cascade included.
    std::uint64_t migrate(std::size_t k);

    // H_0 first (free), then on-disk tables from largest to smallest.
    LookupResult lookup(HashValue h);
    bool in_memory(HashValue h) const { return h0_.contains(h); }
    // Probes only the on-disk tables, largest first.
    LookupResult lookup_disk(HashValue h);

    /// Scans every on-disk table, returns all series items in ascending hash
    /// order and leaves the series empty with its tables released.
    std::vector<HashValue> drain();

    std::uint64_t size() const;
    std::uint64_t memory_size() const { return h0_.size(); }
    std::uint64_t level_size(std::size_t k) const;
    // Number of level slots (H_0 included) that have ever been created.
    std::size_t level_count() const { return tables_.size(); }
    std::uint64_t levels_nonempty() const;

    std::uint64_t level_capacity(std::size_t k) const;
    std::uint64_t level_buckets(std::size_t k) const;
    const ChainedTable* table(std::size_t k) const;

    std::uint32_t gamma() const { return gamma_; }
    std::uint64_t inserted() const { return inserted_; }
    std::uint64_t charged() const;

    std::vector<HashValue> items() const;
    double avg_successful_query();
    SeriesStats stats();

private:
    ChainedTable& ensure_table(std::size_t k);

    BlockDevice* dev_;
    Params params_;
    std::uint32_t gamma_;
    std::unordered_set<HashValue> h0_;
    // tables_[0] is always empty: H_0 is memory-resident.
    std::vector<std::optional<ChainedTable>> tables_;
    // Simulator-side duplicate check for insert(); holds no modeled state.
    std::unordered_set<HashValue> registry_;
    std::uint64_t inserted_ = 0;
    IoLedger base_;
};

} // namespace emhash

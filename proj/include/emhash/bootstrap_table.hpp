#pragma once

#include <emhash/chained_table.hpp>
#include <emhash/io_sim.hpp>
#include <emhash/log_series.hpp>
#include <emhash/params.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace emhash {

struct BootstrapStats {
    std::uint32_t beta = 0;
    std::uint32_t gamma = 0;
    std::uint32_t round = 0;
    double t_u = 0;
    double t_q = 0;
    double frac_big = 0;
    std::uint64_t charged = 0;
    std::uint64_t n = 0;

    static std::string csv_header();
    // Columns: beta,gamma,round,t_u,t_q,frac_big,charged,n,m,b,seed
    std::string csv_row(const Params& params) const;
};

/// Big table plus a logarithmic-method buffer, merged in doubling rounds.
///
/// The first m items accumulate in memory and are dumped into the big table
/// with 4m/b buckets. In round i the big table grows from 2^(i-1)*m to
/// 2^i*m items; inserts go to an embedded LogSeries and every
/// 2^(i-1)*m/beta items the whole series is merged into the big table with
/// one full scan. The merge that closes a round rewrites the big table into
/// twice as many buckets in the same pass, keeping its load factor <= 1/2.
class BootstrapTable {
public:
    BootstrapTable(BlockDevice& dev, const Params& params, std::uint32_t beta, std::uint32_t gamma = 2);

    // Throws DuplicateError if h was already inserted.
    void insert(HashValue h);

    /// Merges the series into the big table. Returns the I/Os charged.
    /// Precondition: the series holds a complete batch.
    std::uint64_t merge_batch();

    // Memory (free), then the big table, then series tables largest first.
    LookupResult lookup(HashValue h);

    std::uint32_t beta() const { return beta_; }
    std::uint32_t gamma() const { return series_.gamma(); }
    // 0 while the first m items are still accumulating in memory.
    std::uint32_t round() const { return round_; }
    std::uint64_t size() const { return inserted_; }
    std::uint64_t big_size() const { return big_ ? big_->item_count() : 0; }
    std::uint64_t big_buckets() const { return big_ ? big_->buckets() : 0; }
    std::uint64_t series_size() const { return series_.size(); }
    std::uint64_t initial_size() const { return initial_.size(); }
    // Items not yet in the big table.
    std::uint64_t in_flight() const { return initial_.size() + series_.size(); }
    // Target size of the batch currently being collected.
    std::uint64_t batch_size() const;
    std::uint64_t round_target() const;
    std::uint64_t merges() const { return merges_; }
    std::uint64_t charged() const;
    double frac_big() const;

    const ChainedTable* big() const { return big_ ? &*big_ : nullptr; }
    const LogSeries& series() const { return series_; }

    std::vector<HashValue> items() const;
    double avg_successful_query();
    BootstrapStats stats();

private:
    void dump_initial();

    BlockDevice* dev_;
    Params params_;
    std::uint32_t beta_;
    std::unordered_set<HashValue> initial_;
    std::optional<ChainedTable> big_;
    LogSeries series_;
    std::uint32_t round_ = 0;
    std::uint64_t inserted_ = 0;
    std::uint64_t merges_ = 0;
    // Simulator-side duplicate check; holds no modeled state.
    std::unordered_set<HashValue> registry_;
    IoLedger base_;
};

// beta = b^c rounded to the nearest integer, clamped to [2, b].
std::uint32_t beta_for_exponent(std::uint32_t b, double c);
// beta = max(2, floor(epsilon * b / (2 * c_bt))), clamped to b.
std::uint32_t beta_for_epsilon(std::uint32_t b, double epsilon, double c_bt);

// Warnings specific to the bootstrap structure (log2(n/m) > b/4).
std::vector<std::string> bootstrap_warnings(const Params& params);

} // namespace emhash

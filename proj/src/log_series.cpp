#include <emhash/log_series.hpp>

#include <emhash/csv.hpp>
#include <emhash/errors.hpp>

#include <algorithm>

namespace emhash {

std::string SeriesStats::csv_header() {
    return "gamma,levels_nonempty,t_u_amortized,t_q_avg,charged,reads,writes";
}

std::string SeriesStats::csv_row() const {
    return std::to_string(gamma) + "," + std::to_string(levels_nonempty) + "," +
           format_number(t_u_amortized) + "," + format_number(t_q_avg) + "," +
           std::to_string(charged) + "," + std::to_string(reads) + "," + std::to_string(writes);
}

LogSeries::LogSeries(BlockDevice& dev, const Params& params, std::uint32_t gamma)
    : dev_(&dev)
    , params_(params)
    , gamma_(gamma)
    , base_(dev.ledger()) {
    if (gamma < 2 || !is_power_of_two(gamma))
        throw ParameterError("gamma must be a power of two >= 2");
    if (params.b == 0 || params.m / params.b < 1)
        throw ParameterError("m/b must be at least 1");
    tables_.resize(1);
}

std::uint64_t LogSeries::level_capacity(std::size_t k) const {
    std::uint64_t cap = params_.m / 2;
    for (std::size_t i = 0; i < k; ++i)
        cap *= gamma_;
    return cap;
}

std::uint64_t LogSeries::level_buckets(std::size_t k) const {
    std::uint64_t d = params_.m / params_.b;
    for (std::size_t i = 0; i < k; ++i)
        d *= gamma_;
    return d;
}

const ChainedTable* LogSeries::table(std::size_t k) const {
    if (k == 0 || k >= tables_.size() || !tables_[k])
        return nullptr;
    return &*tables_[k];
}

std::uint64_t LogSeries::level_size(std::size_t k) const {
    if (k == 0)
        return h0_.size();
    const auto* t = table(k);
    return t ? t->item_count() : 0;
}

std::uint64_t LogSeries::size() const {
    std::uint64_t total = h0_.size();
    for (std::size_t k = 1; k < tables_.size(); ++k)
        total += level_size(k);
    return total;
}

std::uint64_t LogSeries::levels_nonempty() const {
    std::uint64_t count = 0;
    for (std::size_t k = 1; k < tables_.size(); ++k)
        count += level_size(k) > 0;
    return count;
}

std::uint64_t LogSeries::charged() const { return dev_->ledger().charged - base_.charged; }

ChainedTable& LogSeries::ensure_table(std::size_t k) {
    if (tables_.size() <= k)
        tables_.resize(k + 1);
    if (!tables_[k])
        tables_[k].emplace(*dev_, level_buckets(k), params_.u_bits);
    return *tables_[k];
}

void LogSeries::insert(HashValue h) {
    if (registry_.contains(h))
        throw DuplicateError("duplicate hash value " + std::to_string(h));
    insert_unchecked(h);
    registry_.insert(h);
}

void LogSeries::insert_unchecked(HashValue h) {
    stage(h);
    if (h0_.size() == level_capacity(0))
        migrate(0);
}

void LogSeries::stage(HashValue h) {
    if (h0_.size() >= level_capacity(0))
        throw PreconditionError("H_0 is full");
    if (h >> params_.u_bits)
        throw ParameterError("hash value outside the universe");
    dev_->acquire_memory(1);
    h0_.insert(h);
    ++inserted_;
}

std::uint64_t LogSeries::migrate(std::size_t k) {
    if (level_size(k) != level_capacity(k))
        throw PreconditionError("migrate: level " + std::to_string(k) + " is not full");
    const auto before = dev_->ledger().charged;
    const std::uint64_t incoming = level_size(k);
    ChainedTable& dst = ensure_table(k + 1);
    if (dst.item_count() + incoming > level_capacity(k + 1))
        throw InvariantError("migration would overfill level " + std::to_string(k + 1));

    if (k == 0) {
        std::vector<HashValue> sorted(h0_.begin(), h0_.end());
        std::sort(sorted.begin(), sorted.end());
        dst.merge_sorted(sorted);
        dev_->release_memory(h0_.size());
        h0_.clear();
    } else {
        ChainedTable& src = *tables_[k];
        // Parallel scan: each source bucket lands in gamma consecutive target buckets.
        for (std::uint64_t j = 0; j < src.buckets(); ++j) {
            auto bucket = src.read_bucket(j);
            dst.merge_sorted(bucket);
        }
        tables_[k].reset();
    }

    if (dst.item_count() == level_capacity(k + 1))
        migrate(k + 1);
    return dev_->ledger().charged - before;
}

LookupResult LogSeries::lookup_disk(HashValue h) {
    LookupResult result;
    for (std::size_t k = tables_.size(); k-- > 1;) {
        if (!tables_[k] || tables_[k]->item_count() == 0)
            continue;
        auto r = tables_[k]->lookup(h);
        result.ios += r.ios;
        if (r.found) {
            result.found = true;
            return result;
        }
    }
    return result;
}

LookupResult LogSeries::lookup(HashValue h) {
    if (in_memory(h))
        return {true, 0};
    return lookup_disk(h);
}

std::vector<HashValue> LogSeries::drain() {
    std::vector<HashValue> out(h0_.begin(), h0_.end());
    std::sort(out.begin(), out.end());
    for (std::size_t k = 1; k < tables_.size(); ++k) {
        if (!tables_[k])
            continue;
        auto level = tables_[k]->drain();
        auto mid = out.size();
        out.insert(out.end(), level.begin(), level.end());
        std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(mid), out.end());
        tables_[k].reset();
    }
    dev_->release_memory(h0_.size());
    h0_.clear();
    registry_.clear();
    tables_.resize(1);
    return out;
}

std::vector<HashValue> LogSeries::items() const {
    std::vector<HashValue> out(h0_.begin(), h0_.end());
    for (std::size_t k = 1; k < tables_.size(); ++k) {
        if (!tables_[k])
            continue;
        auto level = tables_[k]->items();
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

double LogSeries::avg_successful_query() {
    auto all = items();
    if (all.empty())
        throw PreconditionError("average query of an empty series");
    auto scope = dev_->measure();
    std::uint64_t total = 0;
    for (HashValue h : all)
        total += lookup(h).ios;
    return static_cast<double>(total) / static_cast<double>(all.size());
}

SeriesStats LogSeries::stats() {
    if (inserted_ == 0)
        throw PreconditionError("stats of an empty series");
    SeriesStats s;
    s.gamma = gamma_;
    s.levels_nonempty = levels_nonempty();
    s.charged = charged();
    s.reads = dev_->ledger().reads - base_.reads;
    s.writes = dev_->ledger().writes - base_.writes;
    s.t_u_amortized = static_cast<double>(s.charged) / static_cast<double>(inserted_);
    s.t_q_avg = size() ? avg_successful_query() : 0.0;
    return s;
}

} // namespace emhash

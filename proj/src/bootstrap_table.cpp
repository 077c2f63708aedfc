#include <emhash/bootstrap_table.hpp>

#include <emhash/csv.hpp>
#include <emhash/errors.hpp>

#include <algorithm>
#include <cmath>

namespace emhash {

std::string BootstrapStats::csv_header() {
    return "beta,gamma,round,t_u,t_q,frac_big,charged,n,m,b,seed";
}

std::string BootstrapStats::csv_row(const Params& p) const {
    return std::to_string(beta) + "," + std::to_string(gamma) + "," + std::to_string(round) + "," +
           format_number(t_u) + "," + format_number(t_q) + "," + format_number(frac_big) + "," +
           std::to_string(charged) + "," + std::to_string(n) + "," + std::to_string(p.m) + "," +
           std::to_string(p.b) + "," + std::to_string(p.seed);
}

std::uint32_t beta_for_exponent(std::uint32_t b, double c) {
    double raw = std::round(std::pow(static_cast<double>(b), c));
    return static_cast<std::uint32_t>(std::clamp(raw, 2.0, static_cast<double>(b)));
}

std::uint32_t beta_for_epsilon(std::uint32_t b, double epsilon, double c_bt) {
    if (epsilon <= 0 || c_bt <= 0)
        throw ParameterError("epsilon and the insertion constant must be positive");
    double raw = std::floor(epsilon * b / (2.0 * c_bt));
    return static_cast<std::uint32_t>(std::clamp(raw, 2.0, static_cast<double>(b)));
}

std::vector<std::string> bootstrap_warnings(const Params& p) {
    std::vector<std::string> out;
    if (p.n > p.m && std::log2(static_cast<double>(p.n) / static_cast<double>(p.m)) > p.b / 4.0)
        out.push_back("log2(n/m) > b/4: the insertion bound assumes log(n/m) = o(b)");
    return out;
}

BootstrapTable::BootstrapTable(BlockDevice& dev, const Params& params, std::uint32_t beta,
                               std::uint32_t gamma)
    : dev_(&dev)
    , params_(params)
    , beta_(beta)
    , series_(dev, params, gamma)
    , base_(dev.ledger()) {
    require_valid(params);
    if (beta < 2 || beta > params.b)
        throw ParameterError("beta must lie in [2, b]");
}

std::uint64_t BootstrapTable::round_target() const {
    return round_ == 0 ? params_.m : (params_.m << round_);
}

std::uint64_t BootstrapTable::batch_size() const {
    if (round_ == 0)
        return params_.m;
    std::uint64_t nominal = std::max<std::uint64_t>(1, (params_.m << (round_ - 1)) / beta_);
    return std::min(nominal, round_target() - big_size());
}

std::uint64_t BootstrapTable::charged() const { return dev_->ledger().charged - base_.charged; }

double BootstrapTable::frac_big() const {
    return inserted_ ? static_cast<double>(big_size()) / static_cast<double>(inserted_) : 0.0;
}

void BootstrapTable::insert(HashValue h) {
    if (h >> params_.u_bits)
        throw ParameterError("hash value outside the universe");
    if (registry_.contains(h))
        throw DuplicateError("duplicate hash value " + std::to_string(h));

    if (round_ == 0) {
        dev_->acquire_memory(1);
        initial_.insert(h);
        registry_.insert(h);
        ++inserted_;
        if (initial_.size() == params_.m)
            dump_initial();
        return;
    }

    if (series_.size() + 1 == batch_size()) {
        series_.stage(h);
        registry_.insert(h);
        ++inserted_;
        merge_batch();
    } else {
        series_.insert_unchecked(h);
        registry_.insert(h);
        ++inserted_;
    }
}

void BootstrapTable::dump_initial() {
    std::vector<HashValue> sorted(initial_.begin(), initial_.end());
    std::sort(sorted.begin(), sorted.end());
    big_.emplace(*dev_, 4 * params_.m / params_.b, params_.u_bits);
    big_->merge_sorted(sorted);
    dev_->release_memory(initial_.size());
    initial_.clear();
    round_ = 1;
}

std::uint64_t BootstrapTable::merge_batch() {
    if (round_ == 0 || series_.size() != batch_size())
        throw PreconditionError("merge_batch: the series does not hold a complete batch");
    const auto before = dev_->ledger().charged;
    const std::uint64_t expected = big_size() + series_.size();
    auto batch = series_.drain();
    const bool closing = big_size() + batch.size() == round_target();

    if (!closing) {
        big_->merge_sorted(batch, MergeScan::full);
    } else {
        // Same pass, written into a table with twice the buckets.
        ChainedTable next(*dev_, big_->buckets() * 2, params_.u_bits);
        std::size_t pos = 0;
        for (std::uint64_t j = 0; j < big_->buckets(); ++j) {
            auto old_items = big_->read_bucket(j);
            std::size_t end = pos;
            while (end < batch.size() && big_->bucket_of(batch[end]) == j)
                ++end;
            std::vector<HashValue> merged;
            merged.reserve(old_items.size() + (end - pos));
            std::merge(old_items.begin(), old_items.end(), batch.begin() + static_cast<std::ptrdiff_t>(pos),
                       batch.begin() + static_cast<std::ptrdiff_t>(end), std::back_inserter(merged));
            next.merge_sorted(merged);
            pos = end;
        }
        big_ = std::move(next);
        ++round_;
    }
    if (big_size() != expected || series_.size() != 0)
        throw InvariantError("merge_batch lost or duplicated items");
    ++merges_;
    return dev_->ledger().charged - before;
}

LookupResult BootstrapTable::lookup(HashValue h) {
    if (round_ == 0)
        return {initial_.contains(h), 0};
    if (series_.in_memory(h))
        return {true, 0};
    auto result = big_->lookup(h);
    if (result.found)
        return result;
    auto rest = series_.lookup_disk(h);
    return {rest.found, result.ios + rest.ios};
}

std::vector<HashValue> BootstrapTable::items() const {
    std::vector<HashValue> out(initial_.begin(), initial_.end());
    if (big_) {
        auto b = big_->items();
        out.insert(out.end(), b.begin(), b.end());
    }
    auto s = series_.items();
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

double BootstrapTable::avg_successful_query() {
    auto all = items();
    if (all.empty())
        throw PreconditionError("average query of an empty table");
    auto scope = dev_->measure();
    std::uint64_t total = 0;
    for (HashValue h : all)
        total += lookup(h).ios;
    return static_cast<double>(total) / static_cast<double>(all.size());
}

BootstrapStats BootstrapTable::stats() {
    if (inserted_ == 0)
        throw PreconditionError("stats of an empty table");
    BootstrapStats s;
    s.beta = beta_;
    s.gamma = series_.gamma();
    s.round = round_;
    s.charged = charged();
    s.n = inserted_;
    s.t_u = static_cast<double>(s.charged) / static_cast<double>(inserted_);
    s.t_q = avg_successful_query();
    s.frac_big = frac_big();
    return s;
}

} // namespace emhash

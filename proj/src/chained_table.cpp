#include <emhash/chained_table.hpp>

#include <emhash/csv.hpp>
#include <emhash/errors.hpp>
#include <emhash/hashing.hpp>

#include <algorithm>
#include <random>

namespace emhash {

std::string ChainedStats::csv_header() { return "d,item_count,load_factor,avg_query,max_chain_len"; }

std::string ChainedStats::csv_row() const {
    return std::to_string(d) + "," + std::to_string(item_count) + "," + format_number(load_factor) +
           "," + format_number(avg_query) + "," + std::to_string(max_chain_len);
}

ChainedTable::ChainedTable(BlockDevice& dev, std::uint64_t buckets, std::uint32_t u_bits)
    : dev_(&dev)
    , d_(buckets)
    , u_bits_(u_bits) {
    if (!is_power_of_two(buckets))
        throw ParameterError("bucket count " + std::to_string(buckets) + " is not a power of two");
    unsigned bits = log2_exact(buckets);
    if (bits > u_bits)
        throw ParameterError("bucket count exceeds universe size");
    shift_ = u_bits - bits;
    primary_ = dev.allocate(buckets);
    chains_.resize(buckets);
}

ChainedTable::~ChainedTable() { release_blocks(); }

ChainedTable::ChainedTable(ChainedTable&& other) noexcept
    : dev_(std::exchange(other.dev_, nullptr))
    , d_(other.d_)
    , u_bits_(other.u_bits_)
    , shift_(other.shift_)
    , primary_(other.primary_)
    , chains_(std::move(other.chains_))
    , items_(std::exchange(other.items_, 0))
    , released_(std::exchange(other.released_, true)) {}

ChainedTable& ChainedTable::operator=(ChainedTable&& other) noexcept {
    if (this != &other) {
        release_blocks();
        dev_ = std::exchange(other.dev_, nullptr);
        d_ = other.d_;
        u_bits_ = other.u_bits_;
        shift_ = other.shift_;
        primary_ = other.primary_;
        chains_ = std::move(other.chains_);
        items_ = std::exchange(other.items_, 0);
        released_ = std::exchange(other.released_, true);
    }
    return *this;
}

void ChainedTable::release_blocks() {
    if (!dev_ || released_)
        return;
    dev_->release(primary_, d_);
    for (const auto& c : chains_)
        for (BlockIndex blk : c.overflow)
            dev_->release(blk);
    chains_.clear();
    items_ = 0;
    released_ = true;
}

void ChainedTable::require_live() const {
    if (released_ || !dev_)
        throw PreconditionError("table has been drained");
}

std::uint64_t ChainedTable::bucket_of(HashValue h) const { return emhash::bucket_of(h, shift_); }

BlockIndex ChainedTable::block_at(std::uint64_t j, std::size_t pos) const {
    return pos == 0 ? primary_ + j : chains_[j].overflow[pos - 1];
}

double ChainedTable::load_factor() const {
    return static_cast<double>(items_) / (static_cast<double>(d_) * dev_->block_capacity());
}

std::uint64_t ChainedTable::max_chain_len() const {
    std::uint64_t best = 0;
    for (std::uint64_t j = 0; j < chains_.size(); ++j)
        best = std::max(best, chain_length(j));
    return best;
}

std::uint64_t ChainedTable::total_blocks() const {
    std::uint64_t total = 0;
    for (std::uint64_t j = 0; j < chains_.size(); ++j)
        total += chain_length(j);
    return total;
}

std::uint64_t ChainedTable::insert(HashValue h) {
    require_live();
    if (h >> u_bits_)
        throw ParameterError("hash value outside the universe");
    const auto before = dev_->active_ledger().charged;
    const std::uint64_t j = bucket_of(h);
    Chain& chain = chains_[j];
    const std::size_t len = 1 + chain.overflow.size();
    auto duplicate = [h](std::span<const HashValue> items) {
        return std::find(items.begin(), items.end(), h) != items.end();
    };

    for (std::size_t pos = 0; pos + 1 < len; ++pos)
        if (duplicate(dev_->read_block(block_at(j, pos))))
            throw DuplicateError("duplicate hash value " + std::to_string(h));

    const BlockIndex last = block_at(j, len - 1);
    const std::uint64_t b = dev_->block_capacity();
    if (chain.count < len * b) {
        dev_->read_modify_write(last, [&](std::vector<HashValue>& items) {
            if (duplicate(items))
                throw DuplicateError("duplicate hash value " + std::to_string(h));
            items.push_back(h);
        });
    } else {
        if (duplicate(dev_->read_block(last)))
            throw DuplicateError("duplicate hash value " + std::to_string(h));
        BlockIndex fresh = dev_->allocate(1);
        const HashValue one[] = {h};
        dev_->write_block(fresh, one);
        chain.overflow.push_back(fresh);
    }
    ++chain.count;
    ++items_;
    return dev_->active_ledger().charged - before;
}

LookupResult ChainedTable::lookup(HashValue h) {
    require_live();
    const std::uint64_t j = bucket_of(h);
    const std::size_t len = chain_length(j);
    for (std::size_t pos = 0; pos < len; ++pos) {
        auto items = dev_->read_block(block_at(j, pos));
        if (std::find(items.begin(), items.end(), h) != items.end())
            return {true, pos + 1};
    }
    return {false, len};
}

std::vector<HashValue> ChainedTable::read_bucket(std::uint64_t j) {
    require_live();
    std::vector<HashValue> out;
    out.reserve(chains_[j].count);
    const std::size_t len = chain_length(j);
    for (std::size_t pos = 0; pos < len; ++pos) {
        auto items = dev_->read_block(block_at(j, pos));
        out.insert(out.end(), items.begin(), items.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void ChainedTable::iterate_buckets(
    const std::function<void(std::uint64_t, std::span<const HashValue>)>& visitor) {
    for (std::uint64_t j = 0; j < d_; ++j) {
        auto items = read_bucket(j);
        visitor(j, items);
    }
}

void ChainedTable::append_to_bucket(std::uint64_t j, std::span<const HashValue> incoming) {
    if (incoming.empty())
        return;
    const std::uint64_t b = dev_->block_capacity();
    Chain& chain = chains_[j];
    std::size_t next = 0;

    if (chain.count == 0) {
        auto first = incoming.subspan(0, std::min<std::size_t>(b, incoming.size()));
        dev_->write_block(primary_ + j, first);
        next = first.size();
    } else {
        const std::size_t len = chain_length(j);
        for (std::size_t pos = 0; pos + 1 < len; ++pos)
            dev_->read_block(block_at(j, pos));
        const std::uint64_t in_last = chain.count - (len - 1) * b;
        const std::size_t room = static_cast<std::size_t>(b - in_last);
        const std::size_t take = std::min(room, incoming.size());
        dev_->read_modify_write(block_at(j, len - 1), [&](std::vector<HashValue>& items) {
            items.insert(items.end(), incoming.begin(), incoming.begin() + take);
        });
        next = take;
    }
    while (next < incoming.size()) {
        auto chunk = incoming.subspan(next, std::min<std::size_t>(b, incoming.size() - next));
        BlockIndex fresh = dev_->allocate(1);
        dev_->write_block(fresh, chunk);
        chain.overflow.push_back(fresh);
        next += chunk.size();
    }
    chain.count += incoming.size();
    items_ += incoming.size();
}

void ChainedTable::merge_sorted(std::span<const HashValue> sorted, MergeScan scan) {
    require_live();
    if (!std::is_sorted(sorted.begin(), sorted.end()))
        throw PreconditionError("merge_sorted: input must be sorted");
    if (!sorted.empty() && (sorted.back() >> u_bits_))
        throw ParameterError("hash value outside the universe");

    const bool read_idle = scan == MergeScan::full && items_ > 0;
    std::size_t pos = 0;
    if (!read_idle) {
        while (pos < sorted.size()) {
            const std::uint64_t j = bucket_of(sorted[pos]);
            std::size_t end = pos;
            while (end < sorted.size() && bucket_of(sorted[end]) == j)
                ++end;
            append_to_bucket(j, sorted.subspan(pos, end - pos));
            pos = end;
        }
        return;
    }
    for (std::uint64_t j = 0; j < d_; ++j) {
        std::size_t end = pos;
        while (end < sorted.size() && bucket_of(sorted[end]) == j)
            ++end;
        if (end == pos) {
            const std::size_t len = chain_length(j);
            for (std::size_t p = 0; p < len; ++p)
                dev_->read_block(block_at(j, p));
        } else {
            append_to_bucket(j, sorted.subspan(pos, end - pos));
        }
        pos = end;
    }
}

std::vector<HashValue> ChainedTable::drain() {
    require_live();
    std::vector<HashValue> out;
    out.reserve(items_);
    for (std::uint64_t j = 0; j < d_; ++j) {
        auto bucket = read_bucket(j);
        out.insert(out.end(), bucket.begin(), bucket.end());
    }
    release_blocks();
    return out;
}

std::vector<HashValue> ChainedTable::items() const {
    std::vector<HashValue> out;
    if (released_)
        return out;
    out.reserve(items_);
    for (std::uint64_t j = 0; j < d_; ++j) {
        const std::size_t len = chain_length(j);
        for (std::size_t pos = 0; pos < len; ++pos) {
            auto blk = dev_->inspect(block_at(j, pos));
            out.insert(out.end(), blk.begin(), blk.end());
        }
    }
    return out;
}

double ChainedTable::avg_successful_query() {
    require_live();
    if (items_ == 0)
        throw PreconditionError("average query of an empty table");
    auto all = items();
    auto scope = dev_->measure();
    std::uint64_t total = 0;
    for (HashValue h : all)
        total += lookup(h).ios;
    return static_cast<double>(total) / static_cast<double>(all.size());
}

double ChainedTable::avg_successful_query(std::uint64_t samples, std::uint64_t seed) {
    require_live();
    if (items_ == 0)
        throw PreconditionError("average query of an empty table");
    if (samples == 0)
        throw PreconditionError("sample count must be positive");
    auto all = items();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    auto scope = dev_->measure();
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < samples; ++i)
        total += lookup(all[pick(rng)]).ios;
    return static_cast<double>(total) / static_cast<double>(samples);
}

ChainedStats ChainedTable::stats() {
    ChainedStats s;
    s.d = d_;
    s.item_count = items_;
    s.load_factor = load_factor();
    s.avg_query = items_ ? avg_successful_query() : 0.0;
    s.max_chain_len = max_chain_len();
    return s;
}

} // namespace emhash

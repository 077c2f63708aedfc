#include <emhash/io_sim.hpp>

#include <emhash/errors.hpp>

namespace emhash {

std::string_view to_string(AccessKind kind) {
    switch (kind) {
    case AccessKind::read:
        return "read";
    case AccessKind::write:
        return "write";
    case AccessKind::read_modify_write:
        return "rmw";
    }
    return "?";
}

std::string IoLedger::csv_header() { return "reads,writes,charged,policy"; }

std::string IoLedger::csv_fragment() const {
    return std::to_string(reads) + "," + std::to_string(writes) + "," + std::to_string(charged) +
           "," + std::string(to_string(policy));
}

std::uint64_t replay_charges(std::span<const Access> trace, ChargingPolicy policy) {
    std::uint64_t total = 0;
    const Access* prev = nullptr;
    for (const auto& a : trace) {
        switch (a.kind) {
        case AccessKind::read:
            total += 1;
            break;
        case AccessKind::write: {
            bool follows_read = prev && prev->kind == AccessKind::read && prev->block == a.block;
            total += (policy == ChargingPolicy::combined && follows_read) ? 0 : 1;
            break;
        }
        case AccessKind::read_modify_write:
            total += policy == ChargingPolicy::combined ? 1 : 2;
            break;
        }
        prev = &a;
    }
    return total;
}

BlockDevice::BlockDevice(std::uint32_t block_capacity, std::uint64_t memory_words,
                         ChargingPolicy policy)
    : capacity_(block_capacity)
    , memory_capacity_(memory_words) {
    if (block_capacity == 0)
        throw ParameterError("block capacity must be positive");
    main_.policy = policy;
    side_.policy = policy;
}

BlockDevice::BlockDevice(const Params& params)
    : BlockDevice(params.b, params.m, params.policy) {}

BlockIndex BlockDevice::allocate(std::uint64_t count) {
    if (count == 0)
        throw PreconditionError("allocate: count must be >= 1");
    BlockIndex first = blocks_.size();
    blocks_.resize(blocks_.size() + count);
    for (BlockIndex i = first; i < blocks_.size(); ++i)
        blocks_[i].allocated = true;
    live_blocks_ += count;
    return first;
}

void BlockDevice::release(BlockIndex first, std::uint64_t count) {
    for (BlockIndex i = first; i < first + count; ++i) {
        Block& blk = checked(i);
        blk.allocated = false;
        std::vector<HashValue>().swap(blk.items);
        --live_blocks_;
    }
}

bool BlockDevice::is_allocated(BlockIndex i) const {
    return i < blocks_.size() && blocks_[i].allocated;
}

BlockDevice::Block& BlockDevice::checked(BlockIndex i) {
    if (!is_allocated(i))
        throw DeviceError("block " + std::to_string(i) + " is not allocated");
    return blocks_[i];
}

const BlockDevice::Block& BlockDevice::checked(BlockIndex i) const {
    if (!is_allocated(i))
        throw DeviceError("block " + std::to_string(i) + " is not allocated");
    return blocks_[i];
}

void BlockDevice::check_fits(std::size_t count) const {
    if (count > capacity_)
        throw CapacityError("block overflow: " + std::to_string(count) + " items > b=" +
                            std::to_string(capacity_));
}

void BlockDevice::charge(AccessKind kind, BlockIndex i) {
    IoLedger& l = *active_;
    std::uint64_t cost = 0;
    switch (kind) {
    case AccessKind::read:
        l.reads += 1;
        cost = 1;
        break;
    case AccessKind::write:
        l.writes += 1;
        cost = (l.policy == ChargingPolicy::combined && last_read_ == i) ? 0 : 1;
        break;
    case AccessKind::read_modify_write:
        l.reads += 1;
        l.writes += 1;
        cost = l.policy == ChargingPolicy::combined ? 1 : 2;
        break;
    }
    l.charged += cost;
    last_read_ = kind == AccessKind::read ? std::optional<BlockIndex>(i) : std::nullopt;
    if (tracing_ && active_ == &main_)
        trace_.push_back({kind, i, cost});
}

std::span<const HashValue> BlockDevice::read_block(BlockIndex i) {
    const Block& blk = checked(i);
    charge(AccessKind::read, i);
    return blk.items;
}

void BlockDevice::write_block(BlockIndex i, std::span<const HashValue> items) {
    Block& blk = checked(i);
    check_fits(items.size());
    blk.items.assign(items.begin(), items.end());
    charge(AccessKind::write, i);
}

void BlockDevice::read_modify_write(BlockIndex i,
                                    const std::function<void(std::vector<HashValue>&)>& mutate) {
    std::vector<HashValue> work = checked(i).items;
    mutate(work);
    check_fits(work.size());
    checked(i).items = std::move(work);
    charge(AccessKind::read_modify_write, i);
}

void BlockDevice::sequential_scan(
    BlockIndex first, std::uint64_t count,
    const std::function<bool(BlockIndex, std::vector<HashValue>&)>& visitor) {
    for (BlockIndex i = first; i < first + count; ++i) {
        std::vector<HashValue> work = checked(i).items;
        if (visitor(i, work)) {
            check_fits(work.size());
            checked(i).items = std::move(work);
            charge(AccessKind::read_modify_write, i);
        } else {
            charge(AccessKind::read, i);
        }
    }
}

std::span<const HashValue> BlockDevice::inspect(BlockIndex i) const { return checked(i).items; }

void BlockDevice::acquire_memory(std::uint64_t words) {
    if (main_.memory_words_in_use + words > memory_capacity_)
        throw CapacityError("memory budget exceeded: " +
                            std::to_string(main_.memory_words_in_use + words) + " > m=" +
                            std::to_string(memory_capacity_));
    main_.memory_words_in_use += words;
    if (main_.memory_words_in_use > main_.memory_words_peak)
        main_.memory_words_peak = main_.memory_words_in_use;
}

void BlockDevice::release_memory(std::uint64_t words) {
    if (words > main_.memory_words_in_use)
        throw InvariantError("memory gauge underflow");
    main_.memory_words_in_use -= words;
}

void BlockDevice::reset_ledger() {
    auto keep = main_.memory_words_in_use;
    main_ = IoLedger{main_.policy};
    main_.memory_words_in_use = keep;
    main_.memory_words_peak = keep;
    side_ = IoLedger{side_.policy};
    last_read_.reset();
    trace_.clear();
}

BlockDevice::MeasurementScope::MeasurementScope(BlockDevice& dev)
    : dev_(dev)
    , saved_(dev.active_)
    , saved_last_read_(dev.last_read_) {
    dev_.active_ = &dev_.side_;
    dev_.last_read_.reset();
}

BlockDevice::MeasurementScope::~MeasurementScope() {
    dev_.active_ = saved_;
    dev_.last_read_ = saved_last_read_;
}

} // namespace emhash

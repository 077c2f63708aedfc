#include <emhash/hashing.hpp>

#include <emhash/errors.hpp>

#include <unordered_set>

namespace emhash {

HashValue ideal_hash(std::uint64_t item_id, const Params& params) {
    std::uint64_t x = mix64(item_id ^ mix64(params.seed));
    x = mix64(x);
    return x >> (64 - params.u_bits);
}

std::uint64_t bucket_index(HashValue h, std::uint64_t d, const Params& params) {
    if (!is_power_of_two(d))
        throw ParameterError("bucket count " + std::to_string(d) + " is not a power of two");
    unsigned bits = log2_exact(d);
    if (bits > params.u_bits)
        throw ParameterError("bucket count exceeds universe size");
    return bucket_of(h, params.u_bits - bits);
}

std::vector<HashValue> distinct_workload(const Params& params, std::uint64_t count) {
    if (count > params.universe())
        throw ParameterError("workload larger than the universe");
    std::vector<HashValue> out;
    out.reserve(count);
    std::unordered_set<HashValue> seen;
    seen.reserve(count * 2);
    for (std::uint64_t id = 0; out.size() < count; ++id) {
        HashValue h = ideal_hash(id, params);
        if (seen.insert(h).second)
            out.push_back(h);
    }
    return out;
}

} // namespace emhash

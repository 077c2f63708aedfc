#pragma once

#include <emhash/params.hpp>

#include <cstdint>
#include <vector>

namespace emhash {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Ideal hash of `item_id` under `params.seed`, uniform on [0, 2^u_bits).
/// Pure function of (seed, item_id): the top u_bits of a 64-bit mix.
HashValue ideal_hash(std::uint64_t item_id, const Params& params);

/// Bucket of `h` among `d` buckets: the log2(d) most significant bits of the
/// u_bits-wide hash. Refining d to g*d sends bucket j to children [g*j, g*j+g).
std::uint64_t bucket_index(HashValue h, std::uint64_t d, const Params& params);

// Unchecked form used on hot paths; `shift` is u_bits - log2(d).
constexpr std::uint64_t bucket_of(HashValue h, unsigned shift) {
    return shift >= 64 ? 0 : h >> shift;
}

/// The first `count` distinct hash values of item ids 0, 1, 2, ...
/// Ids whose hash collides with an earlier one are skipped.
std::vector<HashValue> distinct_workload(const Params& params, std::uint64_t count);

} // namespace emhash

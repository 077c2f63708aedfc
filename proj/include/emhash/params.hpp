#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace emhash {

using HashValue = std::uint64_t;

enum class ChargingPolicy {
    // A write immediately following a read of the same block costs nothing extra.
    combined,
    // Every block read and every block write is one I/O.
    split,
};

std::string_view to_string(ChargingPolicy policy);
ChargingPolicy parse_policy(std::string_view text);

/// Global model parameters shared by every structure.
///
/// `b` is the block capacity in items, `m` the memory capacity in words and
/// the universe is [0, 2^u_bits). Items are identified with their hash values.
struct Params {
    std::uint32_t b = 64;
    std::uint64_t m = 4096;
    std::uint32_t u_bits = 60;
    std::uint64_t n = 1u << 18;
    std::uint64_t seed = 1;
    ChargingPolicy policy = ChargingPolicy::combined;

    std::uint64_t universe() const { return std::uint64_t{1} << u_bits; }
    std::uint64_t memory_blocks() const { return m / b; }

    bool operator==(const Params&) const = default;
};

struct ParamReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Reports every violated invariant. Never throws.
ParamReport validate(const Params& params);

/// Throws ParameterError listing the violations when `validate` reports errors.
void require_valid(const Params& params);

// Flat key=value config text. Exact keys: b, m, u_bits, n, seed, policy.
std::string to_config(const Params& params);
Params parse_params(std::string_view text);

// Generic key=value parser used by config files. Blank lines and '#' comments
// are skipped; malformed lines throw ParameterError.
std::map<std::string, std::string> parse_key_values(std::string_view text);

// Applies the Params keys found in `kv` on top of `base`; unknown keys are ignored.
Params apply_params(Params base, const std::map<std::string, std::string>& kv);

bool is_power_of_two(std::uint64_t x);
unsigned log2_exact(std::uint64_t x);

} // namespace emhash

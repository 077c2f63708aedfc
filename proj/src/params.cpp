#include <emhash/params.hpp>

#include <emhash/errors.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace emhash {

std::string_view to_string(ChargingPolicy policy) {
    return policy == ChargingPolicy::combined ? "combined" : "split";
}

ChargingPolicy parse_policy(std::string_view text) {
    if (text == "combined")
        return ChargingPolicy::combined;
    if (text == "split")
        return ChargingPolicy::split;
    throw ParameterError("unknown charging policy '" + std::string(text) +
                         "' (expected combined or split)");
}

bool is_power_of_two(std::uint64_t x) { return std::has_single_bit(x); }

unsigned log2_exact(std::uint64_t x) {
    if (!is_power_of_two(x))
        throw ParameterError(std::to_string(x) + " is not a power of two");
    return static_cast<unsigned>(std::countr_zero(x));
}

ParamReport validate(const Params& p) {
    ParamReport report;
    if (p.b == 0)
        report.errors.push_back("b >= 1");
    if (p.u_bits == 0 || p.u_bits > 63)
        report.errors.push_back("u_bits in [1, 63]");
    if (p.b <= p.u_bits)
        report.errors.push_back("b > log u (b=" + std::to_string(p.b) +
                                ", log u=" + std::to_string(p.u_bits) + ")");
    if (p.m < 2 * std::uint64_t{p.b})
        report.errors.push_back("m >= 2b");
    if (p.b == 0 || p.m % p.b != 0 || !is_power_of_two(p.m / p.b))
        report.errors.push_back("m/b integral power of two");

    if (p.n > 1 && p.u_bits > 0 && 3.0 * std::log2(static_cast<double>(p.n)) > p.u_bits)
        report.warnings.push_back("u < n^3: hash collisions are likely and will be skipped");
    return report;
}

void require_valid(const Params& params) {
    auto report = validate(params);
    if (report.ok())
        return;
    std::string msg = "invalid parameters:";
    for (const auto& e : report.errors)
        msg += " [" + e + "]";
    throw ParameterError(msg);
}

std::string to_config(const Params& p) {
    std::ostringstream out;
    out << "b=" << p.b << '\n'
        << "m=" << p.m << '\n'
        << "u_bits=" << p.u_bits << '\n'
        << "n=" << p.n << '\n'
        << "seed=" << p.seed << '\n'
        << "policy=" << to_string(p.policy) << '\n';
    return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParameterError("bad value for " + key + ": '" + value + "'");
    return out;
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParameterError("config line " + std::to_string(line_no) + ": expected key=value");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParameterError("config line " + std::to_string(line_no) + ": empty key");
        kv[std::string(key)] = std::string(value);
    }
    return kv;
}

Params apply_params(Params p, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "b")
            p.b = parse_unsigned<std::uint32_t>(key, value);
        else if (key == "m")
            p.m = parse_unsigned<std::uint64_t>(key, value);
        else if (key == "u_bits")
            p.u_bits = parse_unsigned<std::uint32_t>(key, value);
        else if (key == "n")
            p.n = parse_unsigned<std::uint64_t>(key, value);
        else if (key == "seed")
            p.seed = parse_unsigned<std::uint64_t>(key, value);
        else if (key == "policy")
            p.policy = parse_policy(value);
    }
    return p;
}

Params parse_params(std::string_view text) {
    auto kv = parse_key_values(text);
    static constexpr std::string_view known[] = {"b", "m", "u_bits", "n", "seed", "policy"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (auto k : known)
            ok = ok || key == k;
        if (!ok)
            throw ParameterError("unknown parameter key '" + key + "'");
    }
    return apply_params(Params{}, kv);
}

} // namespace emhash

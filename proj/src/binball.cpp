#include <emhash/binball.hpp>

#include <emhash/csv.hpp>
#include <emhash/errors.hpp>
#include <emhash/hashing.hpp>

#include <algorithm>
#include <cmath>

namespace emhash {

namespace {

constexpr double prob_tolerance = 1e-12;

} // namespace

GameSpec GameSpec::uniform(std::uint64_t s, double p, std::uint64_t t, double mu) {
    if (!(p > 0 && p <= 1))
        throw ParameterError("p must lie in (0, 1]");
    GameSpec spec;
    spec.s = s;
    spec.p = p;
    spec.t = t;
    spec.mu = mu;
    spec.r = static_cast<std::uint64_t>(std::ceil(1.0 / p - 1e-9));
    spec.probs.assign(spec.r, 1.0 / static_cast<double>(spec.r));
    return spec;
}

bool GameSpec::is_uniform() const {
    return std::all_of(probs.begin(), probs.end(),
                       [&](double q) { return q == probs.front(); });
}

void validate(const GameSpec& spec) {
    if (!(spec.p > 0 && spec.p <= 1))
        throw ParameterError("p must lie in (0, 1]");
    if (spec.r == 0 || static_cast<double>(spec.r) < 1.0 / spec.p - 1e-9)
        throw ParameterError("need r >= 1/p bins");
    if (spec.probs.size() != spec.r)
        throw ParameterError("probs must have exactly r entries");
    double sum = 0;
    for (double q : spec.probs) {
        if (q < 0)
            throw ParameterError("negative bin probability");
        if (q > spec.p + prob_tolerance)
            throw ParameterError("bin probability exceeds p");
        sum += q;
    }
    if (std::abs(sum - 1.0) > prob_tolerance)
        throw ParameterError("bin probabilities must sum to 1");
    if (spec.t > spec.s)
        throw ParameterError("t must not exceed s");
}

std::uint64_t nonempty_bins(std::span<const std::uint64_t> occupancy) {
    return static_cast<std::uint64_t>(
        std::count_if(occupancy.begin(), occupancy.end(), [](std::uint64_t c) { return c > 0; }));
}

std::uint64_t optimal_removal(std::span<const std::uint64_t> occupancy, std::uint64_t t) {
    std::vector<std::uint64_t> loads;
    std::uint64_t total = 0;
    for (auto c : occupancy) {
        total += c;
        if (c > 0)
            loads.push_back(c);
    }
    if (t > total)
        throw PreconditionError("cannot remove more balls than were thrown");
    std::sort(loads.begin(), loads.end());
    std::uint64_t occupied = loads.size();
    for (auto c : loads) {
        if (c > t)
            break;
        t -= c;
        --occupied;
    }
    return occupied;
}

namespace {

void min_over_subsets(const std::vector<std::size_t>& ball_bin, std::size_t next, std::uint64_t left,
                      std::vector<std::uint64_t>& occ, std::uint64_t& best) {
    if (left == 0) {
        best = std::min(best, nonempty_bins(occ));
        return;
    }
    if (ball_bin.size() - next < left)
        return;
    // Remove ball `next`, or keep it.
    --occ[ball_bin[next]];
    min_over_subsets(ball_bin, next + 1, left - 1, occ, best);
    ++occ[ball_bin[next]];
    min_over_subsets(ball_bin, next + 1, left, occ, best);
}

} // namespace

std::uint64_t exhaustive_removal(std::span<const std::uint64_t> occupancy, std::uint64_t t) {
    std::vector<std::size_t> ball_bin;
    for (std::size_t bin = 0; bin < occupancy.size(); ++bin)
        for (std::uint64_t k = 0; k < occupancy[bin]; ++k)
            ball_bin.push_back(bin);
    if (ball_bin.size() > 16)
        throw PreconditionError("exhaustive_removal: more than 16 balls");
    if (t > ball_bin.size())
        throw PreconditionError("cannot remove more balls than were thrown");
    std::vector<std::uint64_t> occ(occupancy.begin(), occupancy.end());
    std::uint64_t best = nonempty_bins(occ);
    min_over_subsets(ball_bin, 0, t, occ, best);
    return best;
}

GameOutcome play(const GameSpec& spec, std::mt19937_64& rng) {
    validate(spec);
    GameOutcome out;
    out.occupancy.assign(spec.r, 0);
    if (spec.is_uniform()) {
        std::uniform_int_distribution<std::uint64_t> bin(0, spec.r - 1);
        for (std::uint64_t i = 0; i < spec.s; ++i)
            ++out.occupancy[bin(rng)];
    } else {
        std::discrete_distribution<std::size_t> bin(spec.probs.begin(), spec.probs.end());
        for (std::uint64_t i = 0; i < spec.s; ++i)
            ++out.occupancy[bin(rng)];
    }
    out.cost = optimal_removal(out.occupancy, spec.t);
    return out;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(mix64(mix64(seed) ^ trial));
}

std::string LemmaCheck::csv_header() {
    return "lemma,s,p,t,mu,trials,threshold,frequency,required,pass";
}

std::string LemmaCheck::csv_row() const {
    return lemma + "," + std::to_string(s) + "," + format_number(p) + "," + std::to_string(t) + "," +
           format_number(mu) + "," + std::to_string(trials) + "," + format_number(threshold) + "," +
           format_number(frequency) + "," + format_number(required) + "," + (pass ? "PASS" : "FAIL");
}

namespace {

double frequency_at_least(const GameSpec& spec, std::uint64_t trials, std::uint64_t seed,
                          double threshold) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        auto rng = trial_rng(seed, i);
        if (static_cast<double>(play(spec, rng).cost) >= threshold)
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

LemmaCheck base_check(const char* name, const GameSpec& spec, std::uint64_t trials) {
    LemmaCheck c;
    c.lemma = name;
    c.s = spec.s;
    c.p = spec.p;
    c.t = spec.t;
    c.mu = spec.mu;
    c.trials = trials;
    return c;
}

} // namespace

LemmaCheck verify_lemma3(const GameSpec& spec, std::uint64_t trials, std::uint64_t seed) {
    validate(spec);
    if (trials == 0)
        throw ParameterError("trials must be positive");
    if (static_cast<double>(spec.s) * spec.p > 1.0 / 3.0 + 1e-12)
        throw PreconditionError("lemma3 requires s*p <= 1/3 (got s*p = " +
                                format_number(static_cast<double>(spec.s) * spec.p) + ")");
    if (!(spec.mu > 0 && spec.mu <= 1))
        throw ParameterError("mu must lie in (0, 1]");
    auto c = base_check("lemma3", spec, trials);
    const double s = static_cast<double>(spec.s);
    c.threshold = (1 - spec.mu) * (1 - s * spec.p) * s - static_cast<double>(spec.t);
    c.required = 1 - std::exp(-spec.mu * spec.mu * s / 3);
    c.frequency = frequency_at_least(spec, trials, seed, c.threshold);
    const double slack = 3 * std::sqrt(c.required * (1 - c.required) / static_cast<double>(trials));
    c.pass = c.frequency >= c.required - slack;
    return c;
}

LemmaCheck verify_lemma4(const GameSpec& spec, std::uint64_t trials, std::uint64_t seed) {
    validate(spec);
    if (trials == 0)
        throw ParameterError("trials must be positive");
    const double s = static_cast<double>(spec.s);
    if (s / 2 < static_cast<double>(spec.t) || s / 2 < 1.0 / spec.p - 1e-9)
        throw PreconditionError("lemma4 requires s/2 >= t and s/2 >= 1/p");
    auto c = base_check("lemma4", spec, trials);
    c.threshold = 1.0 / (20 * spec.p);
    c.required = lemma4_required_frequency;
    c.frequency = frequency_at_least(spec, trials, seed, c.threshold);
    c.pass = c.frequency >= c.required;
    return c;
}

} // namespace emhash

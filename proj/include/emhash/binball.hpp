#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace emhash {

/// An (s, p, t) bin-ball game: s balls thrown independently into r bins with
/// per-bin probabilities `probs` (each at most p); an adversary then removes
/// t balls so the survivors occupy as few bins as possible.
struct GameSpec {
    std::uint64_t s = 0;
    std::uint64_t r = 0;
    std::vector<double> probs;
    double p = 0;
    std::uint64_t t = 0;
    double mu = 0.3;

    // r = ceil(1/p) bins, probability 1/r each.
    static GameSpec uniform(std::uint64_t s, double p, std::uint64_t t, double mu = 0.3);
    bool is_uniform() const;
};

// Throws ParameterError describing the first violated invariant.
void validate(const GameSpec& spec);

struct GameOutcome {
    std::vector<std::uint64_t> occupancy;
    std::uint64_t cost = 0;
};

std::uint64_t nonempty_bins(std::span<const std::uint64_t> occupancy);

/// Throws spec.s balls, then applies optimal_removal.
GameOutcome play(const GameSpec& spec, std::mt19937_64& rng);

/// Adversary: empties the least-loaded nonempty bins while the budget allows.
/// Returns the number of bins still occupied. Requires t <= total balls.
std::uint64_t optimal_removal(std::span<const std::uint64_t> occupancy, std::uint64_t t);

/// Brute force over every t-subset of the (labelled) balls. Requires at most
/// 16 balls; throws PreconditionError otherwise.
std::uint64_t exhaustive_removal(std::span<const std::uint64_t> occupancy, std::uint64_t t);

struct LemmaCheck {
    std::string lemma;
    std::uint64_t s = 0;
    double p = 0;
    std::uint64_t t = 0;
    double mu = 0;
    std::uint64_t trials = 0;
    double threshold = 0;
    double frequency = 0;
    double required = 0;
    bool pass = false;

    static std::string csv_header();
    std::string csv_row() const;
};

// Independent per-trial generator derived from the master seed.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Fraction of games with cost >= (1-mu)(1-sp)s - t. Passes iff the fraction
/// reaches 1 - exp(-mu^2 s/3) less a 3-sigma binomial sampling band.
/// Requires s*p <= 1/3.
LemmaCheck verify_lemma3(const GameSpec& spec, std::uint64_t trials, std::uint64_t seed);

/// Fraction of games with cost >= 1/(20p). Passes iff the fraction is >= 0.99.
/// Requires s/2 >= t and s/2 >= 1/p.
LemmaCheck verify_lemma4(const GameSpec& spec, std::uint64_t trials, std::uint64_t seed);

inline constexpr double lemma4_required_frequency = 0.99;

} // namespace emhash

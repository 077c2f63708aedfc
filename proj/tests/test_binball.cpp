#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <emhash/binball.hpp>
#include <emhash/errors.hpp>

#include <cmath>
#include <functional>

using namespace emhash;

namespace {

using Occ = std::vector<std::uint64_t>;

// Every occupancy vector with r bins and total s.
void for_each_occupancy(std::size_t r, std::uint64_t s, const std::function<void(const Occ&)>& fn) {
    Occ occ(r, 0);
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t bin, std::uint64_t left) {
        if (bin + 1 == r) {
            occ[bin] = left;
            fn(occ);
            return;
        }
        for (std::uint64_t c = 0; c <= left; ++c) {
            occ[bin] = c;
            rec(bin + 1, left - c);
        }
    };
    rec(0, s);
}

} // namespace

TEST_CASE("optimal_removal examples") {
    CHECK(optimal_removal(Occ{2, 1, 1}, 0) == 3);
    CHECK(optimal_removal(Occ{2, 1, 1}, 1) == 2);
    CHECK(optimal_removal(Occ{2, 1, 1}, 2) == 1);
    CHECK(optimal_removal(Occ{2, 1, 1}, 4) == 0);
    CHECK(optimal_removal(Occ{1, 1, 1, 1}, 3) == 1);
    CHECK(optimal_removal(Occ{3, 3}, 2) == 2);
    CHECK(optimal_removal(Occ{0, 0}, 0) == 0);
    CHECK_THROWS_AS(optimal_removal(Occ{1, 1}, 3), PreconditionError);
}

TEST_CASE("exhaustive_removal examples") {
    CHECK(exhaustive_removal(Occ{2, 1, 1}, 1) == 2);
    CHECK(exhaustive_removal(Occ{1, 1, 1, 1}, 3) == 1);
    CHECK(exhaustive_removal(Occ{3, 3}, 2) == 2);
    CHECK_THROWS_AS(exhaustive_removal(Occ{9, 8}, 1), PreconditionError);
}

TEST_CASE("greedy equals brute force for s <= 8, r <= 4, t <= 4") {
    std::size_t cases = 0, mismatches = 0;
    for (std::size_t r = 1; r <= 4; ++r)
        for (std::uint64_t s = 0; s <= 8; ++s)
            for_each_occupancy(r, s, [&](const Occ& occ) {
                for (std::uint64_t t = 0; t <= std::min<std::uint64_t>(4, s); ++t) {
                    ++cases;
                    mismatches += optimal_removal(occ, t) != exhaustive_removal(occ, t);
                }
            });
    CHECK(cases > 1000);
    CHECK(mismatches == 0);
}

TEST_CASE("play: degenerate games") {
    std::mt19937_64 rng(1);
    auto none = GameSpec::uniform(0, 0.25, 0);
    CHECK(play(none, rng).cost == 0);
    auto all_removed = GameSpec::uniform(10, 0.25, 10);
    for (int i = 0; i < 20; ++i)
        CHECK(play(all_removed, rng).cost == 0);
}

TEST_CASE("play: s=4, r=4 mean cost against exact enumeration") {
    // Exact law of the number of occupied bins over all 4^4 equally likely throws.
    double mean = 0, second = 0;
    for (int code = 0; code < 256; ++code) {
        Occ occ(4, 0);
        for (int ball = 0, c = code; ball < 4; ++ball, c /= 4)
            ++occ[c % 4];
        double k = static_cast<double>(nonempty_bins(occ));
        mean += k / 256;
        second += k * k / 256;
    }
    CHECK(mean == doctest::Approx(175.0 / 64));
    const double sd = std::sqrt(second - mean * mean);

    auto spec = GameSpec::uniform(4, 0.25, 0);
    constexpr std::uint64_t trials = 100000;
    double sum = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        auto rng = trial_rng(7, i);
        sum += static_cast<double>(play(spec, rng).cost);
    }
    CHECK(std::abs(sum / trials - mean) <= 3 * sd / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("play: non-uniform probabilities are honoured") {
    GameSpec spec;
    spec.s = 1000;
    spec.p = 0.5;
    spec.r = 3;
    spec.probs = {0.5, 0.5, 0.0};
    std::mt19937_64 rng(3);
    auto out = play(spec, rng);
    CHECK(out.occupancy[2] == 0);
    CHECK(out.occupancy[0] + out.occupancy[1] == 1000);
}

TEST_CASE("game validation") {
    auto ok = GameSpec::uniform(10, 0.25, 2);
    CHECK(ok.r == 4);
    CHECK_NOTHROW(validate(ok));

    auto few_bins = ok;
    few_bins.r = 3;
    few_bins.probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK_THROWS_AS(validate(few_bins), ParameterError);

    auto heavy = ok;
    heavy.probs = {0.4, 0.2, 0.2, 0.2};
    CHECK_THROWS_AS(validate(heavy), ParameterError);

    auto short_sum = ok;
    short_sum.probs = {0.25, 0.25, 0.25, 0.2};
    CHECK_THROWS_AS(validate(short_sum), ParameterError);

    auto too_many_removed = ok;
    too_many_removed.t = 11;
    CHECK_THROWS_AS(validate(too_many_removed), ParameterError);
}

TEST_CASE("verify_lemma3") {
    auto c = verify_lemma3(GameSpec::uniform(1000, 1.0 / 3000, 0, 0.3), 2000, 1);
    CHECK(c.threshold == doctest::Approx(0.7 * (2.0 / 3.0) * 1000));
    CHECK(c.required == doctest::Approx(1 - std::exp(-0.03 * 1000)));
    CHECK(c.frequency == 1.0);
    CHECK(c.pass);

    auto removed_all = verify_lemma3(GameSpec::uniform(50, 1.0 / 300, 50, 0.3), 200, 1);
    CHECK(removed_all.threshold <= 0);
    CHECK(removed_all.pass);

    auto mu_one = verify_lemma3(GameSpec::uniform(50, 1.0 / 300, 5, 1.0), 200, 1);
    CHECK(mu_one.threshold == doctest::Approx(-5));
    CHECK(mu_one.pass);

    CHECK_THROWS_AS(verify_lemma3(GameSpec::uniform(1000, 1.0 / 1000, 0), 10, 1), PreconditionError);
}

TEST_CASE("verify_lemma4") {
    auto c = verify_lemma4(GameSpec::uniform(200, 1.0 / 100, 100, 0.3), 2000, 1);
    CHECK(c.threshold == doctest::Approx(5.0));
    CHECK(c.pass);

    // Without removals the cost is the number of occupied bins, far above 5.
    auto spec = GameSpec::uniform(200, 1.0 / 100, 0);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto rng = trial_rng(2, i);
        REQUIRE(play(spec, rng).cost >= 50);
    }

    CHECK_THROWS_AS(verify_lemma4(GameSpec::uniform(150, 1.0 / 100, 10), 10, 1), PreconditionError);
    CHECK_THROWS_AS(verify_lemma4(GameSpec::uniform(200, 1.0 / 100, 101), 10, 1), PreconditionError);
}

TEST_CASE("trial generators are reproducible and distinct") {
    auto a = trial_rng(5, 0), b = trial_rng(5, 0), c = trial_rng(5, 1);
    CHECK(a() == b());
    CHECK(trial_rng(5, 0)() != c());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <emhash/bench.hpp>
#include <emhash/errors.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace emhash;

namespace {

RunConfig config(const std::string& sub) {
    RunConfig c;
    c.subcommand = sub;
    c.params.b = 32;
    c.params.m = 256;
    c.params.u_bits = 31;
    c.params.n = 1u << 12;
    c.snapshots = 4;
    c.trials = 500;
    return c;
}

std::size_t column(const CsvTable& t, const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    REQUIRE(it != t.header.end());
    return static_cast<std::size_t>(it - t.header.begin());
}

} // namespace

TEST_CASE("snapshot plans") {
    auto every = SnapshotPlan::every(1600, 16);
    CHECK(every.at.size() == 16);
    CHECK(every.at.front() == 100);
    CHECK(every.at.back() == 1600);
    auto uneven = SnapshotPlan::every(1000, 3);
    CHECK(uneven.at.back() == 1000);
    CHECK(std::is_sorted(uneven.at.begin(), uneven.at.end()));

    auto strat = SnapshotPlan::stratified(200, 1000, 8, 17);
    CHECK(strat.at.size() == 8);
    CHECK(strat.at.front() >= 200);
    CHECK(strat.at.back() <= 1000);
    CHECK(std::adjacent_find(strat.at.begin(), strat.at.end(), std::greater_equal<>()) == strat.at.end());
    CHECK(SnapshotPlan::stratified(200, 1000, 8, 17).at == strat.at);
}

TEST_CASE("buckets_for_load") {
    CHECK(buckets_for_load(1u << 14, 32, 0.5) == 1024);
    CHECK(buckets_for_load(100, 32, 0.5) == 8);
}

TEST_CASE("config validation") {
    auto c = config("baseline");
    CHECK_NOTHROW(validate(c));
    c.params.n = 0;
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("empty workload"), ParameterError);
    CHECK_THROWS_WITH_AS(cmd_baseline(c), doctest::Contains("empty workload"), ParameterError);
    c = config("baseline");
    c.seeds.clear();
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = config("nope");
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = config("structure");
    c.gamma = 3;
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = config("structure");
    c.betas = {64};
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = config("binball");
    c.lemma = "5";
    CHECK_THROWS_AS(validate(c), ParameterError);
}

TEST_CASE("apply_config reads the extra keys") {
    auto c = config("structure");
    apply_config(c, parse_key_values("b=16\nbeta=2,4\nseeds=3,4,5\nstructure=logmethod\ngamma=4\n"));
    CHECK(c.params.b == 16);
    CHECK(c.betas == std::vector<std::uint32_t>{2, 4});
    CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(c.structure == StructureKind::logmethod);
    CHECK(c.gamma == 4);
    CHECK_THROWS_AS(apply_config(c, {{"gamma", "x"}}), ParameterError);
}

TEST_CASE("baseline at b=32, alpha=0.5, n=2^14") {
    auto c = config("baseline");
    c.params.n = 1u << 14;
    c.seeds = {1, 2, 3, 4, 5};
    auto table = cmd_baseline(c);
    REQUIRE(table.rows.size() == 5);
    for (const auto& row : table.rows) {
        double t_u = std::stod(row[column(table, "t_u")]);
        double t_q = std::stod(row[column(table, "avg_query")]);
        CHECK(t_u >= 1.0);
        CHECK(t_u <= 1.05);
        CHECK(t_q <= 1.01);
    }
}

TEST_CASE("baseline insertion cost ignores measurement snapshots") {
    auto p = config("baseline").params;
    auto quiet = run_baseline(p, 0.5, 0);
    auto probed = run_baseline(p, 0.5, 16);
    CHECK(probed.snapshot_queries.size() == 16);
    CHECK(quiet.ledger.charged == probed.ledger.charged);
    CHECK(quiet.ledger.reads == probed.ledger.reads);
    CHECK(quiet.t_u == probed.t_u);
}

TEST_CASE("structure time series") {
    auto c = config("structure");
    c.structure = StructureKind::logmethod;
    auto table = cmd_structure(c);
    CHECK(table.rows.size() == 5);
    std::uint64_t last = 0;
    for (const auto& row : table.rows) {
        auto inserted = std::stoull(row[column(table, "inserted")]);
        CHECK(inserted >= last);
        last = inserted;
    }
    const auto& final_row = table.rows.back();
    CHECK(final_row[column(table, "kind")] == "final");
    double t_q = std::stod(final_row[column(table, "t_q")]);
    double levels = std::stod(final_row[column(table, "levels_nonempty")]);
    CHECK(t_q >= 1.0 - 0.5 * c.params.m / c.params.n);
    CHECK(t_q <= std::max(levels, 1.0));

    c.structure = StructureKind::bootstrap;
    c.c_preset = 1.0;
    table = cmd_structure(c);
    CHECK(table.rows.back()[column(table, "beta")] == "32");
}

TEST_CASE("bootstrap at beta=b meets an epsilon target through the pinned constant") {
    auto c = config("structure");
    c.params.b = 64;
    c.params.u_bits = 60;
    c.params.m = 1024;
    c.params.n = 1u << 15;
    const double epsilon = 1.0;
    c.epsilon = epsilon;
    auto betas = resolve_betas(c);
    REQUIRE(betas.size() == 1);
    const double log_ratio = std::log2(static_cast<double>(c.params.n) / c.params.m);
    auto run = run_bootstrap(c.params, betas[0], 2, {});
    CHECK(run.final.t_u <= bootstrap_insert_constant * (betas[0] + 2 * log_ratio) / c.params.b);

    auto full = run_bootstrap(c.params, c.params.b, 2, {});
    CHECK(full.final.t_u <= bootstrap_insert_constant * (c.params.b + 2 * log_ratio) / c.params.b);
}

TEST_CASE("tradeoff rows are sorted by beta and deduplicated") {
    auto c = config("tradeoff");
    c.params.m = 64;
    c.params.n = 1u << 12;
    c.betas = {8, 2, 8};
    c.seeds = {1, 2};
    auto table = cmd_tradeoff(c);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][column(table, "beta")] == "2");
    CHECK(table.rows[1][column(table, "beta")] == "8");
    CHECK(table.rows[0][column(table, "seeds")] == "2");
    c.betas = {4};
    CHECK(cmd_tradeoff(c).rows.size() == 1);
    c.params.n = c.params.m;
    CHECK_THROWS_AS(cmd_tradeoff(c), ParameterError);
}

TEST_CASE("tradeoff_slope") {
    std::vector<TradeoffPoint> pts;
    for (std::uint32_t beta : {2u, 4u, 8u, 16u}) {
        TradeoffPoint p;
        p.beta = beta;
        p.t_q = 1 + 0.5 / beta;
        pts.push_back(p);
    }
    CHECK(tradeoff_slope(pts) == doctest::Approx(1.0));
    pts[0].t_q = 1.0;
    CHECK(std::isnan(tradeoff_slope(pts)));
}

TEST_CASE("binball command") {
    auto c = config("binball");
    auto table = cmd_binball(c);
    REQUIRE(table.rows.size() == 2);
    for (const auto& row : table.rows)
        CHECK(row.back() == "PASS");
    c.lemma = "3";
    c.game_p = 1.0 / 1000;
    CHECK_THROWS_WITH_AS(cmd_binball(c), doctest::Contains("s*p <= 1/3"), PreconditionError);
}

TEST_CASE("reruns give byte-identical CSV") {
    for (const char* sub : {"baseline", "structure", "tradeoff", "binball"}) {
        auto c = config(sub);
        c.seeds = {1, 9};
        if (std::string(sub) == "tradeoff")
            c.params.m = 64;
        auto a = run_command(c).str();
        c.jobs = 2;
        auto b = run_command(c).str();
        CHECK(strip_csv_comments(a) == strip_csv_comments(b));
        CHECK(a.rfind("schema_version,", 0) == 0);
    }
}

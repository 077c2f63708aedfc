#pragma once

#include <emhash/binball.hpp>
#include <emhash/csv.hpp>
#include <emhash/io_sim.hpp>
#include <emhash/params.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emhash {

enum class StructureKind { logmethod, bootstrap };

std::string_view to_string(StructureKind kind);
StructureKind parse_structure(std::string_view text);

/// Everything a benchmark subcommand needs.
struct RunConfig {
    std::string subcommand;
    Params params;
    StructureKind structure = StructureKind::bootstrap;
    std::uint32_t gamma = 2;
    std::vector<std::uint32_t> betas;
    double alpha = 0.5;
    std::optional<double> c_preset;
    std::optional<double> epsilon;
    std::uint64_t trials = 10000;
    std::vector<std::uint64_t> seeds{1};
    std::uint32_t snapshots = 16;
    std::string out;
    // binball: "3", "4" or "both".
    std::string lemma = "both";
    std::optional<std::uint64_t> game_s;
    std::optional<double> game_p;
    std::optional<std::uint64_t> game_t;
    std::optional<double> game_mu;
    unsigned jobs = 1;
};

// Config-file keys on top of the Params keys: structure, gamma, beta (comma
// list), alpha, c, epsilon, trials, seeds (comma list), snapshots, lemma,
// and the game knobs s, p, t, mu.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& kv);

// Throws ParameterError on the first violation.
void validate(const RunConfig& config);

// Insertion counts at which a structure is measured, ascending.
struct SnapshotPlan {
    std::vector<std::uint64_t> at;

    // Every n/k inserts: n/k, 2n/k, ..., n.
    static SnapshotPlan every(std::uint64_t n, std::uint32_t k);
    // One uniformly drawn point in each of k equal strata of [lo, hi].
    static SnapshotPlan stratified(std::uint64_t lo, std::uint64_t hi, std::uint32_t k,
                                   std::uint64_t seed);
};

struct Snapshot {
    std::uint64_t inserted = 0;
    double t_u = 0;
    double t_q = 0;
    std::uint64_t charged = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint32_t round = 0;
    std::uint64_t levels_nonempty = 0;
    std::uint64_t big_size = 0;
    std::uint64_t in_flight = 0;
    double frac_big = 0;
    std::uint64_t memory_in_use = 0;
};

struct StructureRun {
    std::vector<Snapshot> snapshots;
    Snapshot final;
    std::uint64_t memory_peak = 0;
};

struct BaselineRun {
    std::uint64_t d = 0;
    std::uint64_t item_count = 0;
    double load_factor = 0;
    double t_u = 0;
    double avg_query = 0;
    std::uint64_t max_chain_len = 0;
    IoLedger ledger;
    std::vector<double> snapshot_queries;
};

// Smallest power-of-two bucket count whose load n/(d*b) is at most alpha.
std::uint64_t buckets_for_load(std::uint64_t n, std::uint32_t b, double alpha);

BaselineRun run_baseline(const Params& params, double alpha, std::uint32_t snapshots = 0);
StructureRun run_logmethod(const Params& params, std::uint32_t gamma, const SnapshotPlan& plan);
StructureRun run_bootstrap(const Params& params, std::uint32_t beta, std::uint32_t gamma,
                           const SnapshotPlan& plan);

struct TradeoffPoint {
    std::uint32_t beta = 0;
    double c = 0;
    double t_u = 0;
    double t_u_std = 0;
    double t_q = 0;
    double t_q_std = 0;
    std::uint64_t seeds = 0;
};

/// One bootstrap run per (beta, seed). t_u is the final amortized insertion
/// cost; t_q is the mean exhaustive query cost over `snapshots` stratified
/// random instants in [2m, n]. Averaged over seeds, sorted by beta.
std::vector<TradeoffPoint> run_tradeoff(const Params& params, std::vector<std::uint32_t> betas,
                                        std::uint32_t gamma, const std::vector<std::uint64_t>& seeds,
                                        std::uint32_t snapshots, unsigned jobs = 1);

// Least-squares slope of log(t_q - 1) against log(1/beta). NaN if any t_q <= 1.
double tradeoff_slope(const std::vector<TradeoffPoint>& points);

// Betas used when none are given: the presets b^c for c in {1/4, 1/2, 3/4, 1}.
std::vector<std::uint32_t> default_betas(std::uint32_t b);
std::vector<std::uint32_t> resolve_betas(const RunConfig& config);

// Default game specs for the two lemma checks.
GameSpec default_lemma3_spec();
GameSpec default_lemma4_spec();

CsvTable cmd_baseline(const RunConfig& config);
CsvTable cmd_structure(const RunConfig& config);
CsvTable cmd_tradeoff(const RunConfig& config);
CsvTable cmd_binball(const RunConfig& config);

// Dispatches on config.subcommand.
CsvTable run_command(const RunConfig& config);

// Pinned insertion-cost constants, checked by the acceptance suite.
inline constexpr double logmethod_insert_constant = 6.0;
inline constexpr double bootstrap_insert_constant = 4.5;

} // namespace emhash

#include <emhash/bench.hpp>

#include <emhash/bootstrap_table.hpp>
#include <emhash/chained_table.hpp>
#include <emhash/errors.hpp>
#include <emhash/hashing.hpp>
#include <emhash/log_series.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace emhash {

std::string_view to_string(StructureKind kind) {
    return kind == StructureKind::logmethod ? "logmethod" : "bootstrap";
}

StructureKind parse_structure(std::string_view text) {
    if (text == "logmethod")
        return StructureKind::logmethod;
    if (text == "bootstrap")
        return StructureKind::bootstrap;
    throw ParameterError("unknown structure '" + std::string(text) +
                         "' (expected logmethod or bootstrap)");
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (!in || !in.eof())
        throw ParameterError("bad value for " + key + ": '" + value + "'");
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(parse_number<T>(key, item));
    return out;
}

template <typename F>
void parallel_for(std::size_t count, unsigned jobs, F&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    const unsigned n = std::min<std::size_t>(jobs, count);
    for (unsigned w = 0; w < n; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers)
        w.join();
    if (failure)
        std::rethrow_exception(failure);
}

std::string u64(std::uint64_t x) { return std::to_string(x); }
std::string num(double x) { return format_number(x); }

} // namespace

void apply_config(RunConfig& c, const std::map<std::string, std::string>& kv) {
    c.params = apply_params(c.params, kv);
    for (const auto& [key, value] : kv) {
        if (key == "structure")
            c.structure = parse_structure(value);
        else if (key == "gamma")
            c.gamma = parse_number<std::uint32_t>(key, value);
        else if (key == "beta")
            c.betas = parse_list<std::uint32_t>(key, value);
        else if (key == "alpha")
            c.alpha = parse_number<double>(key, value);
        else if (key == "c")
            c.c_preset = parse_number<double>(key, value);
        else if (key == "epsilon")
            c.epsilon = parse_number<double>(key, value);
        else if (key == "trials")
            c.trials = parse_number<std::uint64_t>(key, value);
        else if (key == "seeds")
            c.seeds = parse_list<std::uint64_t>(key, value);
        else if (key == "snapshots")
            c.snapshots = parse_number<std::uint32_t>(key, value);
        else if (key == "lemma")
            c.lemma = value;
        else if (key == "s")
            c.game_s = parse_number<std::uint64_t>(key, value);
        else if (key == "p")
            c.game_p = parse_number<double>(key, value);
        else if (key == "t")
            c.game_t = parse_number<std::uint64_t>(key, value);
        else if (key == "mu")
            c.game_mu = parse_number<double>(key, value);
    }
}

void validate(const RunConfig& c) {
    static const std::set<std::string> commands = {"baseline", "structure", "tradeoff", "binball"};
    if (!commands.contains(c.subcommand))
        throw ParameterError("unknown subcommand '" + c.subcommand + "'");
    if (c.seeds.empty())
        throw ParameterError("at least one seed is required");
    if (c.subcommand == "binball") {
        if (c.trials == 0)
            throw ParameterError("trials must be positive");
        if (c.lemma != "3" && c.lemma != "4" && c.lemma != "both")
            throw ParameterError("lemma must be 3, 4 or both");
        return;
    }
    require_valid(c.params);
    if (c.params.n == 0)
        throw ParameterError("empty workload (n = 0)");
    if (c.gamma < 2 || !is_power_of_two(c.gamma))
        throw ParameterError("gamma must be a power of two >= 2");
    if (!(c.alpha > 0 && c.alpha <= 1))
        throw ParameterError("alpha must lie in (0, 1]");
    for (auto beta : c.betas)
        if (beta < 2 || beta > c.params.b)
            throw ParameterError("beta " + std::to_string(beta) + " outside [2, b]");
    if (c.subcommand == "tradeoff" && c.params.n < 2 * c.params.m)
        throw ParameterError("tradeoff needs n >= 2m");
}

SnapshotPlan SnapshotPlan::every(std::uint64_t n, std::uint32_t k) {
    SnapshotPlan plan;
    if (k == 0 || n == 0)
        return plan;
    const std::uint64_t step = std::max<std::uint64_t>(1, n / k);
    for (std::uint64_t at = step; at <= n; at += step)
        plan.at.push_back(at);
    if (plan.at.back() != n)
        plan.at.push_back(n);
    return plan;
}

SnapshotPlan SnapshotPlan::stratified(std::uint64_t lo, std::uint64_t hi, std::uint32_t k,
                                      std::uint64_t seed) {
    SnapshotPlan plan;
    if (k == 0 || hi < lo)
        return plan;
    std::mt19937_64 rng(mix64(seed ^ 0x5eedULL));
    const double width = static_cast<double>(hi - lo) / k;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto at = lo + static_cast<std::uint64_t>(width * (i + u(rng)));
        at = std::clamp(at, lo, hi);
        if (plan.at.empty() || at > plan.at.back())
            plan.at.push_back(at);
    }
    return plan;
}

std::uint64_t buckets_for_load(std::uint64_t n, std::uint32_t b, double alpha) {
    std::uint64_t d = 1;
    while (static_cast<double>(n) > alpha * static_cast<double>(d) * b)
        d *= 2;
    return d;
}

BaselineRun run_baseline(const Params& params, double alpha, std::uint32_t snapshots) {
    require_valid(params);
    if (params.n == 0)
        throw ParameterError("empty workload (n = 0)");
    BlockDevice dev(params);
    BaselineRun run;
    run.d = buckets_for_load(params.n, params.b, alpha);
    ChainedTable table(dev, run.d, params.u_bits);
    auto plan = SnapshotPlan::every(params.n, snapshots);
    std::size_t next = 0;
    std::uint64_t inserted = 0;
    for (HashValue h : distinct_workload(params, params.n)) {
        table.insert(h);
        ++inserted;
        if (next < plan.at.size() && plan.at[next] == inserted) {
            run.snapshot_queries.push_back(table.avg_successful_query());
            ++next;
        }
    }
    run.ledger = dev.ledger();
    run.item_count = table.item_count();
    run.load_factor = table.load_factor();
    run.t_u = static_cast<double>(dev.ledger().charged) / static_cast<double>(params.n);
    run.avg_query = table.avg_successful_query();
    run.max_chain_len = table.max_chain_len();
    return run;
}

namespace {

Snapshot snapshot_of(LogSeries& s, const BlockDevice& dev) {
    Snapshot snap;
    snap.inserted = s.inserted();
    snap.charged = s.charged();
    snap.reads = dev.ledger().reads;
    snap.writes = dev.ledger().writes;
    snap.t_u = static_cast<double>(snap.charged) / static_cast<double>(snap.inserted);
    snap.t_q = s.avg_successful_query();
    snap.levels_nonempty = s.levels_nonempty();
    snap.in_flight = s.memory_size();
    snap.memory_in_use = dev.memory_in_use();
    return snap;
}

Snapshot snapshot_of(BootstrapTable& t, const BlockDevice& dev) {
    Snapshot snap;
    snap.inserted = t.size();
    snap.charged = t.charged();
    snap.reads = dev.ledger().reads;
    snap.writes = dev.ledger().writes;
    snap.t_u = static_cast<double>(snap.charged) / static_cast<double>(snap.inserted);
    snap.t_q = t.avg_successful_query();
    snap.round = t.round();
    snap.levels_nonempty = t.series().levels_nonempty();
    snap.big_size = t.big_size();
    snap.in_flight = t.in_flight();
    snap.frac_big = t.frac_big();
    snap.memory_in_use = dev.memory_in_use();
    return snap;
}

template <typename Structure>
StructureRun drive(Structure& structure, BlockDevice& dev, const Params& params,
                   const SnapshotPlan& plan) {
    StructureRun run;
    std::size_t next = 0;
    std::uint64_t inserted = 0;
    for (HashValue h : distinct_workload(params, params.n)) {
        structure.insert(h);
        ++inserted;
        while (next < plan.at.size() && plan.at[next] == inserted) {
            run.snapshots.push_back(snapshot_of(structure, dev));
            ++next;
        }
    }
    run.final = snapshot_of(structure, dev);
    run.memory_peak = dev.ledger().memory_words_peak;
    return run;
}

} // namespace

StructureRun run_logmethod(const Params& params, std::uint32_t gamma, const SnapshotPlan& plan) {
    require_valid(params);
    if (params.n == 0)
        throw ParameterError("empty workload (n = 0)");
    BlockDevice dev(params);
    LogSeries series(dev, params, gamma);
    return drive(series, dev, params, plan);
}

StructureRun run_bootstrap(const Params& params, std::uint32_t beta, std::uint32_t gamma,
                           const SnapshotPlan& plan) {
    require_valid(params);
    if (params.n == 0)
        throw ParameterError("empty workload (n = 0)");
    BlockDevice dev(params);
    BootstrapTable table(dev, params, beta, gamma);
    return drive(table, dev, params, plan);
}

std::vector<TradeoffPoint> run_tradeoff(const Params& params, std::vector<std::uint32_t> betas,
                                        std::uint32_t gamma, const std::vector<std::uint64_t>& seeds,
                                        std::uint32_t snapshots, unsigned jobs) {
    if (betas.empty())
        throw ParameterError("beta grid is empty");
    if (seeds.empty())
        throw ParameterError("at least one seed is required");
    if (params.n < 2 * params.m)
        throw ParameterError("tradeoff needs n >= 2m");
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

    const std::size_t tasks = betas.size() * seeds.size();
    std::vector<double> t_u(tasks), t_q(tasks);
    parallel_for(tasks, jobs, [&](std::size_t task) {
        const auto beta = betas[task / seeds.size()];
        Params p = params;
        p.seed = seeds[task % seeds.size()];
        // Same instants for every beta at a given seed.
        auto plan = SnapshotPlan::stratified(2 * p.m, p.n, std::max<std::uint32_t>(1, snapshots), p.seed);
        auto run = run_bootstrap(p, beta, gamma, plan);
        double sum = 0;
        for (const auto& s : run.snapshots)
            sum += s.t_q;
        t_u[task] = run.final.t_u;
        t_q[task] = sum / static_cast<double>(run.snapshots.size());
    });

    auto mean_std = [](const double* xs, std::size_t k) {
        double mean = 0;
        for (std::size_t i = 0; i < k; ++i)
            mean += xs[i];
        mean /= static_cast<double>(k);
        double var = 0;
        for (std::size_t i = 0; i < k; ++i)
            var += (xs[i] - mean) * (xs[i] - mean);
        double sd = k > 1 ? std::sqrt(var / static_cast<double>(k - 1)) : 0.0;
        return std::pair{mean, sd};
    };

    std::vector<TradeoffPoint> points;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        TradeoffPoint pt;
        pt.beta = betas[i];
        pt.c = std::log(static_cast<double>(betas[i])) / std::log(static_cast<double>(params.b));
        std::tie(pt.t_u, pt.t_u_std) = mean_std(&t_u[i * seeds.size()], seeds.size());
        std::tie(pt.t_q, pt.t_q_std) = mean_std(&t_q[i * seeds.size()], seeds.size());
        pt.seeds = seeds.size();
        points.push_back(pt);
    }
    return points;
}

double tradeoff_slope(const std::vector<TradeoffPoint>& points) {
    if (points.size() < 2)
        return std::nan("");
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.t_q <= 1.0)
            return std::nan("");
        xs.push_back(std::log(1.0 / p.beta));
        ys.push_back(std::log(p.t_q - 1.0));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

std::vector<std::uint32_t> default_betas(std::uint32_t b) {
    std::vector<std::uint32_t> out;
    for (double c : {0.25, 0.5, 0.75, 1.0})
        out.push_back(beta_for_exponent(b, c));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::uint32_t> resolve_betas(const RunConfig& c) {
    if (!c.betas.empty())
        return c.betas;
    if (c.c_preset)
        return {beta_for_exponent(c.params.b, *c.c_preset)};
    if (c.epsilon)
        return {beta_for_epsilon(c.params.b, *c.epsilon, bootstrap_insert_constant)};
    return default_betas(c.params.b);
}

GameSpec default_lemma3_spec() { return GameSpec::uniform(1000, 1.0 / 3000, 0, 0.3); }
GameSpec default_lemma4_spec() { return GameSpec::uniform(200, 1.0 / 100, 100, 0.3); }

namespace {

std::vector<std::string> header_with_version(std::initializer_list<const char*> cols) {
    std::vector<std::string> out{"schema_version"};
    out.insert(out.end(), cols.begin(), cols.end());
    return out;
}

std::string version() { return std::to_string(csv_schema_version); }

RunConfig with_seed(const RunConfig& c, std::uint64_t seed) {
    RunConfig out = c;
    out.params.seed = seed;
    return out;
}

} // namespace

CsvTable cmd_baseline(const RunConfig& config) {
    validate(config);
    CsvTable table;
    table.header = header_with_version({"seed", "policy", "b", "m", "u_bits", "n", "alpha", "d",
                                        "item_count", "load_factor", "avg_query", "max_chain_len",
                                        "t_u", "reads", "writes", "charged"});
    std::vector<BaselineRun> runs(config.seeds.size());
    parallel_for(runs.size(), config.jobs, [&](std::size_t i) {
        runs[i] = run_baseline(with_seed(config, config.seeds[i]).params, config.alpha, config.snapshots);
    });
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& p = config.params;
        const auto& r = runs[i];
        table.rows.push_back({version(), u64(config.seeds[i]), std::string(to_string(p.policy)),
                              u64(p.b), u64(p.m), u64(p.u_bits), u64(p.n), num(config.alpha),
                              u64(r.d), u64(r.item_count), num(r.load_factor), num(r.avg_query),
                              u64(r.max_chain_len), num(r.t_u), u64(r.ledger.reads),
                              u64(r.ledger.writes), u64(r.ledger.charged)});
    }
    return table;
}

CsvTable cmd_structure(const RunConfig& config) {
    validate(config);
    const bool boot = config.structure == StructureKind::bootstrap;
    const bool preset = !config.betas.empty() || config.c_preset || config.epsilon;
    std::vector<std::uint32_t> betas{0};
    if (boot)
        betas = preset ? resolve_betas(config) : std::vector{beta_for_exponent(config.params.b, 0.5)};

    CsvTable table;
    table.header = header_with_version({"structure", "seed", "policy", "b", "m", "n", "gamma", "beta",
                                        "kind", "inserted", "round", "levels_nonempty", "t_u", "t_q",
                                        "frac_big", "charged", "reads", "writes"});
    const std::size_t tasks = betas.size() * config.seeds.size();
    std::vector<StructureRun> runs(tasks);
    parallel_for(tasks, config.jobs, [&](std::size_t task) {
        auto p = with_seed(config, config.seeds[task % config.seeds.size()]).params;
        auto plan = SnapshotPlan::every(p.n, config.snapshots);
        runs[task] = boot ? run_bootstrap(p, betas[task / config.seeds.size()], config.gamma, plan)
                          : run_logmethod(p, config.gamma, plan);
    });
    for (std::size_t task = 0; task < tasks; ++task) {
        const auto& p = config.params;
        const auto seed = config.seeds[task % config.seeds.size()];
        const auto beta = betas[task / config.seeds.size()];
        auto emit = [&](const Snapshot& s, const char* kind) {
            table.rows.push_back({version(), std::string(to_string(config.structure)), u64(seed),
                                  std::string(to_string(p.policy)), u64(p.b), u64(p.m), u64(p.n),
                                  u64(config.gamma), boot ? u64(beta) : "", kind, u64(s.inserted),
                                  boot ? u64(s.round) : "", u64(s.levels_nonempty), num(s.t_u),
                                  num(s.t_q), boot ? num(s.frac_big) : "", u64(s.charged),
                                  u64(s.reads), u64(s.writes)});
        };
        for (const auto& s : runs[task].snapshots)
            emit(s, "snapshot");
        emit(runs[task].final, "final");
    }
    return table;
}

CsvTable cmd_tradeoff(const RunConfig& config) {
    validate(config);
    auto points = run_tradeoff(config.params, resolve_betas(config), config.gamma, config.seeds, config.snapshots,
                               config.jobs);
    CsvTable table;
    table.header = header_with_version({"beta", "c", "gamma", "b", "m", "n", "policy", "seeds", "t_u",
                                        "t_u_std", "t_q", "t_q_std"});
    const auto& p = config.params;
    for (const auto& pt : points)
        table.rows.push_back({version(), u64(pt.beta), num(pt.c), u64(config.gamma), u64(p.b), u64(p.m),
                              u64(p.n), std::string(to_string(p.policy)), u64(pt.seeds), num(pt.t_u),
                              num(pt.t_u_std), num(pt.t_q), num(pt.t_q_std)});
    table.comments.push_back("tradeoff_slope=" + num(tradeoff_slope(points)));
    return table;
}

CsvTable cmd_binball(const RunConfig& config) {
    validate(config);
    auto customise = [&](GameSpec spec) {
        double p = config.game_p.value_or(spec.p);
        spec = GameSpec::uniform(config.game_s.value_or(spec.s), p, config.game_t.value_or(spec.t),
                                 config.game_mu.value_or(spec.mu));
        return spec;
    };
    CsvTable table;
    table.header = header_with_version({"seed", "lemma", "s", "p", "t", "mu", "trials", "threshold",
                                        "frequency", "required", "pass"});
    for (auto seed : config.seeds) {
        std::vector<LemmaCheck> checks;
        if (config.lemma == "3" || config.lemma == "both")
            checks.push_back(verify_lemma3(customise(default_lemma3_spec()), config.trials, seed));
        if (config.lemma == "4" || config.lemma == "both")
            checks.push_back(verify_lemma4(customise(default_lemma4_spec()), config.trials, seed));
        for (const auto& c : checks)
            table.rows.push_back({version(), u64(seed), c.lemma, u64(c.s), num(c.p), u64(c.t), num(c.mu),
                                  u64(c.trials), num(c.threshold), num(c.frequency), num(c.required),
                                  c.pass ? "PASS" : "FAIL"});
    }
    if (config.lemma == "4" || config.lemma == "both")
        table.comments.push_back("lemma4 pass bar 0.99 is a calibration choice");
    return table;
}

CsvTable run_command(const RunConfig& config) {
    if (config.subcommand == "baseline")
        return cmd_baseline(config);
    if (config.subcommand == "structure")
        return cmd_structure(config);
    if (config.subcommand == "tradeoff")
        return cmd_tradeoff(config);
    if (config.subcommand == "binball")
        return cmd_binball(config);
    throw ParameterError("unknown subcommand '" + config.subcommand + "'");
}

} // namespace emhash

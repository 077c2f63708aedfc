// emhash: benchmark front end. Writes CSV to stdout or --out.

#include <emhash/bench.hpp>
#include <emhash/errors.hpp>
#include <emhash/params.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
    std::optional<std::uint32_t> b;
    std::optional<std::uint64_t> m;
    std::optional<std::uint32_t> u_bits;
    std::optional<std::uint64_t> n;
    std::optional<std::uint32_t> gamma;
    std::vector<std::uint32_t> betas;
    std::optional<double> alpha;
    std::optional<std::string> policy;
    std::vector<std::uint64_t> seeds;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint32_t> snapshots;
    std::optional<std::string> structure;
    std::optional<double> c;
    std::optional<double> epsilon;
    std::optional<std::string> lemma;
    std::optional<std::uint64_t> s;
    std::optional<double> p;
    std::optional<std::uint64_t> t;
    std::optional<double> mu;
    unsigned jobs = 1;
    std::string out;
    std::string config;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--b", f.b, "block capacity in items");
    cmd->add_option("--m", f.m, "memory capacity in words");
    cmd->add_option("--u-bits", f.u_bits, "universe bit width (default min(b-1, 60))");
    cmd->add_option("--n", f.n, "number of insertions");
    cmd->add_option("--policy", f.policy, "charging policy")->check(CLI::IsMember({"combined", "split"}));
    cmd->add_option("--seed", f.seeds, "seed (repeatable)");
    cmd->add_option("--out", f.out, "output file (default stdout)");
    cmd->add_option("--config", f.config, "key=value file; its values override flags");
    cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void add_structure_knobs(CLI::App* cmd, Flags& f) {
    cmd->add_option("--gamma", f.gamma, "log-method growth factor");
    cmd->add_option("--beta", f.betas, "bootstrap batch parameter (repeatable)");
    cmd->add_option("--c", f.c, "beta = b^c preset");
    cmd->add_option("--epsilon", f.epsilon, "beta from an insertion-cost target");
    cmd->add_option("--snapshots", f.snapshots, "query snapshots per run");
}

emhash::RunConfig build_config(const std::string& subcommand, const Flags& f) {
    emhash::RunConfig rc;
    rc.subcommand = subcommand;
    auto& p = rc.params;
    if (f.b) p.b = *f.b;
    if (f.m) p.m = *f.m;
    if (f.n) p.n = *f.n;
    if (f.policy) p.policy = emhash::parse_policy(*f.policy);
    if (f.gamma) rc.gamma = *f.gamma;
    if (!f.betas.empty()) rc.betas = f.betas;
    if (f.alpha) rc.alpha = *f.alpha;
    if (!f.seeds.empty()) rc.seeds = f.seeds;
    if (f.trials) rc.trials = *f.trials;
    if (f.snapshots) rc.snapshots = *f.snapshots;
    if (f.structure) rc.structure = emhash::parse_structure(*f.structure);
    rc.c_preset = f.c;
    rc.epsilon = f.epsilon;
    if (f.lemma) rc.lemma = *f.lemma;
    rc.game_s = f.s;
    rc.game_p = f.p;
    rc.game_t = f.t;
    rc.game_mu = f.mu;
    rc.jobs = f.jobs;
    rc.out = f.out;

    bool u_given = f.u_bits.has_value();
    if (f.u_bits) p.u_bits = *f.u_bits;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in)
            throw emhash::ParameterError("cannot read config file " + f.config);
        std::stringstream text;
        text << in.rdbuf();
        auto kv = emhash::parse_key_values(text.str());
        emhash::apply_config(rc, kv);
        u_given = u_given || kv.contains("u_bits");
    }
    if (!u_given)
        p.u_bits = std::min<std::uint32_t>(p.b > 1 ? p.b - 1 : 1, 60);
    return rc;
}

std::string timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"External-memory hashing benchmarks"};
    app.require_subcommand(1);
    Flags f;

    auto* baseline = app.add_subcommand("baseline", "chained table at a target load factor");
    add_common(baseline, f);
    baseline->add_option("--alpha", f.alpha, "target load factor");
    baseline->add_option("--snapshots", f.snapshots, "query snapshots (measurement only)");

    auto* structure = app.add_subcommand("structure", "log-method or bootstrap time series");
    add_common(structure, f);
    add_structure_knobs(structure, f);
    structure->add_option("--structure", f.structure, "logmethod or bootstrap")
        ->check(CLI::IsMember({"logmethod", "bootstrap"}));

    auto* tradeoff = app.add_subcommand("tradeoff", "beta sweep of the bootstrap table");
    add_common(tradeoff, f);
    add_structure_knobs(tradeoff, f);

    auto* binball = app.add_subcommand("binball", "Monte-Carlo checks of the bin-ball bounds");
    add_common(binball, f);
    binball->add_option("--trials", f.trials, "games per check");
    binball->add_option("--lemma", f.lemma, "3, 4 or both")->check(CLI::IsMember({"3", "4", "both"}));
    binball->add_option("--s", f.s, "balls");
    binball->add_option("--p", f.p, "max bin probability");
    binball->add_option("--t", f.t, "balls removed");
    binball->add_option("--mu", f.mu, "deviation parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        auto rc = build_config(sub, f);
        for (const auto& w : emhash::validate(rc.params).warnings)
            std::cerr << "warning: " << w << '\n';
        auto table = emhash::run_command(rc);
        table.comments.insert(table.comments.begin(), "generated_at=" + timestamp());
        std::string cfg = emhash::to_config(rc.params);
        std::replace(cfg.begin(), cfg.end(), '\n', ' ');
        while (!cfg.empty() && cfg.back() == ' ')
            cfg.pop_back();
        table.comments.insert(table.comments.begin() + 1, "config " + cfg);

        if (rc.out.empty()) {
            table.write(std::cout);
        } else {
            std::ofstream out(rc.out);
            if (!out)
                throw emhash::ParameterError("cannot write " + rc.out);
            table.write(out);
        }
        if (sub == "binball")
            for (const auto& row : table.rows)
                if (row.back() == "FAIL")
                    return 1;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "emhash " << sub << ": " << e.what() << '\n';
        return 2;
    }
}

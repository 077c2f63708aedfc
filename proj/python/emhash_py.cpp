#include <emhash/bench.hpp>
#include <emhash/binball.hpp>
#include <emhash/bootstrap_table.hpp>
#include <emhash/chained_table.hpp>
#include <emhash/errors.hpp>
#include <emhash/hashing.hpp>
#include <emhash/io_sim.hpp>
#include <emhash/log_series.hpp>
#include <emhash/params.hpp>

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace emhash;

namespace {

py::tuple lookup_tuple(const LookupResult& r) { return py::make_tuple(r.found, r.ios); }

std::string as_config_value(const py::handle& v) {
    if (py::isinstance<py::bool_>(v))
        return v.cast<bool>() ? "1" : "0";
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
        std::string out;
        for (auto item : v) {
            if (!out.empty())
                out += ",";
            out += py::str(item).cast<std::string>();
        }
        return out;
    }
    return py::str(v).cast<std::string>();
}

} // namespace

PYBIND11_MODULE(_emhash, m) {
    m.doc() = "External-memory hashing simulator";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<DeviceError>(m, "DeviceError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<DuplicateError>(m, "DuplicateError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

    py::enum_<ChargingPolicy>(m, "ChargingPolicy")
        .value("combined", ChargingPolicy::combined)
        .value("split", ChargingPolicy::split);

    py::enum_<AccessKind>(m, "AccessKind")
        .value("read", AccessKind::read)
        .value("write", AccessKind::write)
        .value("read_modify_write", AccessKind::read_modify_write);

    py::class_<Params>(m, "Params")
        .def(py::init([](std::uint32_t b, std::uint64_t m, std::uint32_t u_bits, std::uint64_t n,
                         std::uint64_t seed, ChargingPolicy policy) {
                 return Params{b, m, u_bits, n, seed, policy};
             }),
             py::kw_only(), py::arg("b") = 64, py::arg("m") = 4096, py::arg("u_bits") = 60,
             py::arg("n") = 1u << 18, py::arg("seed") = 1, py::arg("policy") = ChargingPolicy::combined)
        .def_readwrite("b", &Params::b)
        .def_readwrite("m", &Params::m)
        .def_readwrite("u_bits", &Params::u_bits)
        .def_readwrite("n", &Params::n)
        .def_readwrite("seed", &Params::seed)
        .def_readwrite("policy", &Params::policy)
        .def("to_config", [](const Params& p) { return to_config(p); })
        .def_static("from_config", [](const std::string& text) { return parse_params(text); })
        .def(py::self == py::self)
        .def("__repr__", [](const Params& p) {
            return "Params(b=" + std::to_string(p.b) + ", m=" + std::to_string(p.m) +
                   ", u_bits=" + std::to_string(p.u_bits) + ", n=" + std::to_string(p.n) +
                   ", seed=" + std::to_string(p.seed) + ", policy=" + std::string(to_string(p.policy)) + ")";
        });

    m.def("validate", [](const Params& p) {
        auto r = validate(p);
        return py::make_tuple(r.errors, r.warnings);
    }, "Returns (errors, warnings).");
    m.def("ideal_hash", &ideal_hash, py::arg("item_id"), py::arg("params"));
    m.def("bucket_index", &bucket_index, py::arg("h"), py::arg("d"), py::arg("params"));
    m.def("distinct_workload", &distinct_workload, py::arg("params"), py::arg("count"));

    py::class_<IoLedger>(m, "IoLedger")
        .def_readonly("policy", &IoLedger::policy)
        .def_readonly("reads", &IoLedger::reads)
        .def_readonly("writes", &IoLedger::writes)
        .def_readonly("charged", &IoLedger::charged)
        .def_readonly("memory_words_in_use", &IoLedger::memory_words_in_use)
        .def_readonly("memory_words_peak", &IoLedger::memory_words_peak);

    py::class_<BlockDevice>(m, "BlockDevice")
        .def(py::init<const Params&>(), py::arg("params"))
        .def(py::init<std::uint32_t, std::uint64_t, ChargingPolicy>(), py::arg("b"), py::arg("m"),
             py::arg("policy") = ChargingPolicy::combined)
        .def_property_readonly("block_capacity", &BlockDevice::block_capacity)
        .def_property_readonly("memory_capacity", &BlockDevice::memory_capacity)
        .def_property_readonly("ledger", [](const BlockDevice& d) { return d.ledger(); })
        .def_property_readonly("measurement_ledger", [](const BlockDevice& d) { return d.measurement_ledger(); })
        .def_property_readonly("memory_in_use", &BlockDevice::memory_in_use)
        .def_property_readonly("allocated_blocks", &BlockDevice::allocated_blocks)
        .def("allocate", &BlockDevice::allocate, py::arg("count"))
        .def("release", &BlockDevice::release, py::arg("first"), py::arg("count") = 1)
        .def("read_block", [](BlockDevice& d, BlockIndex i) {
            auto s = d.read_block(i);
            return std::vector<HashValue>(s.begin(), s.end());
        })
        .def("write_block", [](BlockDevice& d, BlockIndex i, const std::vector<HashValue>& items) {
            d.write_block(i, items);
        })
        .def("read_modify_write", [](BlockDevice& d, BlockIndex i,
                                     const std::function<std::vector<HashValue>(std::vector<HashValue>)>& f) {
            d.read_modify_write(i, [&](std::vector<HashValue>& v) { v = f(v); });
        }, "f receives the block's items and returns the new contents.")
        .def("inspect", [](const BlockDevice& d, BlockIndex i) {
            auto s = d.inspect(i);
            return std::vector<HashValue>(s.begin(), s.end());
        })
        .def("reset_ledger", &BlockDevice::reset_ledger)
        .def("enable_trace", &BlockDevice::enable_trace, py::arg("on") = true)
        .def("trace", [](const BlockDevice& d) {
            py::list out;
            for (const auto& a : d.trace())
                out.append(py::make_tuple(a.kind, a.block, a.charge));
            return out;
        })
        .def("replay_trace", [](const BlockDevice& d) { return replay_charges(d.trace(), d.policy()); },
             "Recomputes the trace's total charge from the access kinds.");

    py::class_<ChainedTable>(m, "ChainedTable")
        .def(py::init<BlockDevice&, std::uint64_t, std::uint32_t>(), py::arg("device"), py::arg("buckets"),
             py::arg("u_bits"), py::keep_alive<1, 2>())
        .def("insert", &ChainedTable::insert)
        .def("lookup", [](ChainedTable& t, HashValue h) { return lookup_tuple(t.lookup(h)); })
        .def("merge_sorted", [](ChainedTable& t, const std::vector<HashValue>& items) { t.merge_sorted(items); })
        .def("avg_successful_query", py::overload_cast<>(&ChainedTable::avg_successful_query))
        .def("items", &ChainedTable::items)
        .def_property_readonly("buckets", &ChainedTable::buckets)
        .def_property_readonly("item_count", &ChainedTable::item_count)
        .def_property_readonly("load_factor", &ChainedTable::load_factor)
        .def_property_readonly("max_chain_len", &ChainedTable::max_chain_len)
        .def("chain_length", &ChainedTable::chain_length)
        .def("bucket_of", &ChainedTable::bucket_of);

    py::class_<LogSeries>(m, "LogSeries")
        .def(py::init<BlockDevice&, const Params&, std::uint32_t>(), py::arg("device"), py::arg("params"),
             py::arg("gamma") = 2, py::keep_alive<1, 2>())
        .def("insert", &LogSeries::insert)
        .def("lookup", [](LogSeries& s, HashValue h) { return lookup_tuple(s.lookup(h)); })
        .def("avg_successful_query", &LogSeries::avg_successful_query)
        .def("items", &LogSeries::items)
        .def("level_size", &LogSeries::level_size)
        .def("level_capacity", &LogSeries::level_capacity)
        .def_property_readonly("size", &LogSeries::size)
        .def_property_readonly("memory_size", &LogSeries::memory_size)
        .def_property_readonly("levels_nonempty", &LogSeries::levels_nonempty)
        .def_property_readonly("charged", &LogSeries::charged);

    py::class_<BootstrapTable>(m, "BootstrapTable")
        .def(py::init<BlockDevice&, const Params&, std::uint32_t, std::uint32_t>(), py::arg("device"),
             py::arg("params"), py::arg("beta"), py::arg("gamma") = 2, py::keep_alive<1, 2>())
        .def("insert", &BootstrapTable::insert)
        .def("lookup", [](BootstrapTable& t, HashValue h) { return lookup_tuple(t.lookup(h)); })
        .def("avg_successful_query", &BootstrapTable::avg_successful_query)
        .def("items", &BootstrapTable::items)
        .def_property_readonly("beta", &BootstrapTable::beta)
        .def_property_readonly("round", &BootstrapTable::round)
        .def_property_readonly("size", &BootstrapTable::size)
        .def_property_readonly("big_size", &BootstrapTable::big_size)
        .def_property_readonly("in_flight", &BootstrapTable::in_flight)
        .def_property_readonly("merges", &BootstrapTable::merges)
        .def_property_readonly("frac_big", &BootstrapTable::frac_big)
        .def_property_readonly("charged", &BootstrapTable::charged);

    py::class_<GameSpec>(m, "GameSpec")
        .def(py::init<>())
        .def_static("uniform", &GameSpec::uniform, py::arg("s"), py::arg("p"), py::arg("t"),
                    py::arg("mu") = 0.3)
        .def_readwrite("s", &GameSpec::s)
        .def_readwrite("r", &GameSpec::r)
        .def_readwrite("probs", &GameSpec::probs)
        .def_readwrite("p", &GameSpec::p)
        .def_readwrite("t", &GameSpec::t)
        .def_readwrite("mu", &GameSpec::mu);

    py::class_<LemmaCheck>(m, "LemmaCheck")
        .def_readonly("lemma", &LemmaCheck::lemma)
        .def_readonly("threshold", &LemmaCheck::threshold)
        .def_readonly("frequency", &LemmaCheck::frequency)
        .def_readonly("required", &LemmaCheck::required)
        .def_readonly("trials", &LemmaCheck::trials)
        .def_readonly("passed", &LemmaCheck::pass);

    m.def("play", [](const GameSpec& spec, std::uint64_t seed, std::uint64_t trial) {
        auto rng = trial_rng(seed, trial);
        auto out = play(spec, rng);
        return py::make_tuple(out.occupancy, out.cost);
    }, py::arg("spec"), py::arg("seed"), py::arg("trial") = 0, "Returns (occupancy, cost).");
    m.def("optimal_removal", [](const std::vector<std::uint64_t>& occ, std::uint64_t t) {
        return optimal_removal(occ, t);
    });
    m.def("exhaustive_removal", [](const std::vector<std::uint64_t>& occ, std::uint64_t t) {
        return exhaustive_removal(occ, t);
    });
    m.def("verify_lemma3", &verify_lemma3, py::arg("spec"), py::arg("trials"), py::arg("seed") = 1);
    m.def("verify_lemma4", &verify_lemma4, py::arg("spec"), py::arg("trials"), py::arg("seed") = 1);

    m.def("run", [](const std::string& subcommand, const Params& params, const py::kwargs& options) {
        RunConfig rc;
        rc.subcommand = subcommand;
        rc.params = params;
        std::map<std::string, std::string> kv;
        for (auto [key, value] : options) {
            auto k = key.cast<std::string>();
            if (k == "jobs")
                rc.jobs = value.cast<unsigned>();
            else
                kv[k] = as_config_value(value);
        }
        apply_config(rc, kv);
        py::gil_scoped_release release;
        return run_command(rc).str();
    }, py::arg("subcommand"), py::arg("params"),
       "Runs a benchmark subcommand and returns its CSV. Options use the config-file keys "
       "(structure, gamma, beta, alpha, c, epsilon, trials, seeds, snapshots, lemma, s, p, t, mu) plus jobs.");
}

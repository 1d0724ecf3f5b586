#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "probbits/arith.hpp"
#include "probbits/bench.hpp"
#include "probbits/compiler.hpp"
#include "probbits/inference.hpp"
#include "probbits/oracle.hpp"

namespace py = pybind11;
using namespace probbits;

namespace {

py::dict run_result_to_dict(const lang::RunResult& r) {
    py::dict out;
    out["evidence_probability"] = r.evidence_probability;
    out["decision_nodes"] = r.decision_nodes;
    out["flip_count"] = r.flip_count;
    py::list queries;
    for (const lang::QueryResult& q : r.queries) {
        py::dict item;
        item["expr"] = q.label;
        switch (q.kind) {
            case lang::Output::Kind::Probability:
                item["kind"] = "probability";
                item["probability"] = q.probability;
                break;
            case lang::Output::Kind::BetaPosterior:
                item["kind"] = "beta_posterior";
                item["beta_total"] = q.beta_total;
                [[fallthrough]];
            case lang::Output::Kind::Distribution: {
                if (q.kind == lang::Output::Kind::Distribution) item["kind"] = "distribution";
                py::dict dist;
                for (auto& [k, p] : q.distribution) dist[py::int_(k)] = p;
                item["distribution"] = std::move(dist);
                item["expectation"] = q.expectation;
                break;
            }
        }
        queries.append(std::move(item));
    }
    out["queries"] = std::move(queries);
    return out;
}

py::dict oracle_result_to_dict(const oracle::OracleResult& r) {
    py::dict out;
    out["evidence_probability"] = r.evidence_probability;
    out["rejected_mass"] = r.rejected_mass;
    py::list queries;
    for (const oracle::OracleQuery& q : r.queries) {
        py::dict item;
        item["expr"] = q.label;
        if (q.kind == oracle::OracleQuery::Kind::Probability) {
            item["kind"] = "probability";
            item["probability"] = q.probability;
        } else {
            item["kind"] = q.kind == oracle::OracleQuery::Kind::BetaPosterior
                               ? "beta_posterior"
                               : "distribution";
            py::dict dist;
            for (auto& [k, p] : q.distribution) dist[py::int_(k)] = p;
            item["distribution"] = std::move(dist);
            if (q.kind == oracle::OracleQuery::Kind::BetaPosterior) {
                item["beta_total"] = q.beta_total;
            }
        }
        queries.append(std::move(item));
    }
    out["queries"] = std::move(queries);
    return out;
}

lang::Encoding encoding_from(const std::string& name) {
    if (name == "bitwise") return lang::Encoding::Bitwise;
    if (name == "categ") return lang::Encoding::Categ;
    throw Error(ErrorKind::InvalidRange, "encoding must be 'bitwise' or 'categ'");
}

Evidence evidence_or_true(Manager& m, const Evidence* e) {
    return e ? *e : Evidence(m);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact inference for binary-encoded integer distributions over BDDs";

    py::register_exception<Error>(m, "ProbbitsError");

    py::class_<NodeRef>(m, "Node", "handle to a weighted Boolean formula")
        .def("is_true", &NodeRef::is_true)
        .def("is_false", &NodeRef::is_false)
        .def("__eq__", [](const NodeRef& a, const NodeRef& b) { return a == b; },
             py::is_operator());

    py::class_<ProbInt>(m, "ProbInt", "random unsigned integer as a tuple of bits")
        .def_property_readonly("width", &ProbInt::width)
        .def("bit", &ProbInt::bit, py::keep_alive<0, 1>())
        .def("zero_extended", &ProbInt::zero_extended, py::keep_alive<0, 1>());

    py::class_<Evidence>(m, "Evidence", "conjunction of observations")
        .def(py::init<Manager&>(), py::keep_alive<1, 2>())
        .def("observe", &Evidence::observe)
        .def("formula", &Evidence::formula, py::keep_alive<0, 1>());

    py::class_<Manager>(m, "Manager", "reduced ordered BDD manager with weighted variables")
        .def(py::init<>())
        .def("flip", &Manager::fresh_var, py::arg("weight"), py::keep_alive<0, 1>(),
             "fresh weighted variable; weights 0 and 1 fold to terminals")
        .def("true_node", &Manager::true_node, py::keep_alive<0, 1>())
        .def("false_node", &Manager::false_node, py::keep_alive<0, 1>())
        .def("ite", &Manager::ite, py::keep_alive<0, 1>())
        .def("land", &Manager::land, py::keep_alive<0, 1>())
        .def("lor", &Manager::lor, py::keep_alive<0, 1>())
        .def("lnot", &Manager::lnot, py::keep_alive<0, 1>())
        .def("lxor", &Manager::lxor, py::keep_alive<0, 1>())
        .def("lxnor", &Manager::lxnor, py::keep_alive<0, 1>())
        .def("wmc", &Manager::wmc, py::arg("root"), "weighted model count")
        .def("node_count",
             [](const Manager& m_, const std::vector<NodeRef>& roots) {
                 return m_.node_count(roots);
             })
        .def_property_readonly("var_count", &Manager::var_count)
        .def("weight", &Manager::weight, py::arg("var"))
        .def("dump_dot", [](const Manager& m_, const std::vector<NodeRef>& roots) {
            std::ostringstream out;
            m_.dump_dot(out, roots);
            return out.str();
        });

    m.def(
        "categ_int",
        [](Manager& m_, const std::vector<double>& v) { return categ_int(m_, v); },
        py::arg("manager"), py::arg("weights"), py::keep_alive<0, 1>(),
        "sequential if-else chain encoding of a categorical distribution");
    m.def(
        "bitwise_int",
        [](Manager& m_, const std::vector<double>& v) { return bitwise_int(m_, v); },
        py::arg("manager"), py::arg("weights"), py::keep_alive<0, 1>(),
        "divide-and-conquer per-bit encoding");
    m.def("uniform_int", &uniform_int, py::arg("manager"), py::arg("n"),
          py::keep_alive<0, 1>(), "uniform distribution over {0..n-1}");
    m.def("const_int", &const_int, py::arg("manager"), py::arg("value"), py::arg("width"),
          py::keep_alive<0, 1>());

    m.def("lt", &lt, py::keep_alive<0, 1>());
    m.def("le", &le, py::keep_alive<0, 1>());
    m.def("gt", &gt, py::keep_alive<0, 1>());
    m.def("ge", &ge, py::keep_alive<0, 1>());
    m.def("eq", &eq, py::keep_alive<0, 1>());
    m.def("ne", &ne, py::keep_alive<0, 1>());
    m.def("add", &add, py::keep_alive<0, 1>());
    m.def("add_wrap", &add_wrap, py::keep_alive<0, 1>());
    m.def("sub_wrap", &sub_wrap, py::keep_alive<0, 1>());
    m.def("mul", &mul, py::keep_alive<0, 1>());
    m.def(
        "int_div",
        [](const ProbInt& a, const ProbInt& b) { return divmod(a, b).quotient; },
        py::keep_alive<0, 1>());
    m.def(
        "int_mod",
        [](const ProbInt& a, const ProbInt& b) { return divmod(a, b).remainder; },
        py::keep_alive<0, 1>());
    m.def("mux_int", &mux_int, py::keep_alive<0, 2>());

    m.def(
        "probability",
        [](NodeRef f, const Evidence* e) {
            Manager& m_ = *f.manager();
            return prob(f, evidence_or_true(m_, e));
        },
        py::arg("formula"), py::arg("evidence") = nullptr);
    m.def(
        "marginal",
        [](const ProbInt& x, const Evidence* e) {
            Manager& m_ = *x.manager();
            return marginal_distribution(x, evidence_or_true(m_, e));
        },
        py::arg("value"), py::arg("evidence") = nullptr,
        "conditional distribution as a dict");
    m.def(
        "expectation",
        [](const ProbInt& x, const Evidence* e) {
            Manager& m_ = *x.manager();
            return expectation(x, evidence_or_true(m_, e));
        },
        py::arg("value"), py::arg("evidence") = nullptr);

    m.def(
        "run_program",
        [](const std::string& source, const std::string& encoding) {
            return run_result_to_dict(lang::run_program(source, encoding_from(encoding)));
        },
        py::arg("source"), py::arg("encoding") = "bitwise",
        "parse, compile, and answer every returned query");
    m.def(
        "oracle_enumerate",
        [](const std::string& source, uint64_t max_paths) {
            return oracle_result_to_dict(
                oracle::enumerate(lang::parse(source), max_paths));
        },
        py::arg("source"), py::arg("max_paths") = oracle::kDefaultPathCap,
        "brute-force enumeration of the same program (ground truth)");
    m.def(
        "parse_check",
        [](const std::string& source) { lang::parse(source); },
        py::arg("source"), "raise on syntax or name-resolution errors");
    m.def("luhn_source", &bench::luhn_source, py::arg("total_digits"),
          "source text of the student-ID checksum program");
}

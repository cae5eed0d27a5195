#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "idsolve/io.hpp"
#include "idsolve/solve.hpp"

namespace py = pybind11;
using namespace idsolve;

namespace {

SolveOptions options_for(const std::string& method, const std::optional<std::string>& mode, bool prune) {
    SolveOptions o;
    const auto m = parse_method(method);
    if (!m) throw Error(ErrorCode::invalid_argument, "unknown method " + method);
    o.method = *m;
    if (mode) {
        o.mode = parse_encoding(*mode);
        if (!o.mode) throw Error(ErrorCode::invalid_argument, "unknown mode " + *mode);
    }
    o.transform.prune = prune;
    return o;
}

py::list rules_to_py(const InfluenceDiagram& d, const Policy& p) {
    py::list out;
    for (const auto& r : p.rules) {
        const auto& labels = d.variable(d.index_of(r.decision)).outcomes;
        std::vector<std::string> choices;
        for (std::size_t c : r.choice) choices.push_back(labels[c]);
        py::dict rule;
        rule["decision"] = r.decision;
        rule["scope"] = r.scope;
        rule["choices"] = choices;
        out.append(rule);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_idsolve, m) {
    m.doc() = "Exact influence diagram solver";

    static py::exception<Error> error(m, "IdsolveError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<InfluenceDiagram>(m, "Diagram")
        .def_static("from_json", [](const std::string& text) { return parse_model(text); })
        .def_static("load", [](const std::filesystem::path& p) { return load_model(p); })
        .def("to_json", [](const InfluenceDiagram& d) { return dump_model(d); })
        .def("__len__", &InfluenceDiagram::size)
        .def_property_readonly("ids", [](const InfluenceDiagram& d) {
            std::vector<std::string> ids;
            for (VarId v = 0; v < d.size(); ++v) ids.push_back(d.variable(v).id);
            return ids;
        })
        .def("validate", [](const InfluenceDiagram& d) {
            // (code, message) pairs; empty means valid
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& i : validate(d).errors) out.emplace_back(std::string(to_string(i.code)), i.message);
            return out;
        })
        .def("relevant_information", [](const InfluenceDiagram& d, const std::string& decision) {
            std::vector<std::string> ids;
            for (VarId v : relevant_information(d, d.index_of(decision))) ids.push_back(d.variable(v).id);
            return ids;
        });

    m.def(
        "solve",
        [](const InfluenceDiagram& d, const std::string& method, const std::optional<std::string>& mode, bool prune) {
            const auto r = solve(d, options_for(method, mode, prune));
            py::dict out;
            out["mev"] = r.mev;
            out["meu"] = r.meu;
            out["evidence_probability"] = r.evidence_probability;
            out["backend"] = r.diagnostics.backend;
            out["policy"] = rules_to_py(d, r.policy);
            out["document"] = dump_solution(d, r);
            return out;
        },
        py::arg("diagram"), py::arg("method") = "onedir", py::arg("mode") = py::none(), py::arg("prune") = true);

    m.def(
        "expected_value",
        [](const InfluenceDiagram& d, const std::string& solution) { return expected_value(d, parse_policy(solution, d)).ev; },
        py::arg("diagram"), py::arg("solution"), "EV of the policy in a solution document, by enumeration.");
}

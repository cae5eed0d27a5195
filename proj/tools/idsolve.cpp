// idsolve: validate, solve and inspect influence diagrams stored as JSON.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idsolve/io.hpp"
#include "idsolve/solve.hpp"

using namespace idsolve;

namespace {

constexpr int kInvalid = 1;
constexpr int kSolverError = 2;

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string list(const InfluenceDiagram& d, const std::vector<VarId>& vs) {
    std::string out = "{";
    for (std::size_t k = 0; k < vs.size(); ++k) out += (k ? ", " : "") + d.variable(vs[k]).id;
    return out + "}";
}

void print_report(std::ostream& os, const ValidationReport& r) {
    for (const auto& e : r.errors) os << "error " << to_string(e.code) << ": " << e.message << "\n";
    for (const auto& w : r.warnings) os << "warning " << to_string(w.code) << ": " << w.message << "\n";
}

void print_policy(std::ostream& os, const InfluenceDiagram& d, const Policy& p) {
    for (const auto& rule : p.rules) {
        const Variable& dv = d.variable(d.index_of(rule.decision));
        os << "policy " << rule.decision << " | ";
        if (rule.scope.empty()) os << "(none)";
        for (std::size_t k = 0; k < rule.scope.size(); ++k) os << (k ? ", " : "") << rule.scope[k];
        os << "\n";
        std::size_t row = 0;
        for (ConfigCounter c(rule.scope_cards); !c.done(); c.next(), ++row) {
            os << "  ";
            if (rule.scope.empty()) os << "*";
            for (std::size_t k = 0; k < rule.scope.size(); ++k) {
                const Variable& sv = d.variable(d.index_of(rule.scope[k]));
                os << (k ? " " : "") << sv.outcomes[c.digits()[k]];
            }
            os << " -> " << dv.outcomes.at(rule.choice.at(row));
            if (std::find(rule.zero_probability_rows.begin(), rule.zero_probability_rows.end(), row) !=
                rule.zero_probability_rows.end()) {
                os << "  (unreachable)";
            }
            os << "\n";
        }
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
    out << text;
}

struct Loaded {
    InfluenceDiagram diagram;
    bool ok = false;
};

Loaded load(const std::string& path, const std::vector<std::string>& evidence, bool complete) {
    Loaded l;
    l.diagram = load_model(path);
    for (const auto& item : evidence) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::parse_error, "evidence must be VAR=OUTCOME: " + item);
        const VarId v = l.diagram.index_of(item.substr(0, eq));
        const auto& outs = l.diagram.variable(v).outcomes;
        auto it = std::find(outs.begin(), outs.end(), item.substr(eq + 1));
        if (it == outs.end()) {
            throw Error(ErrorCode::evidence_out_of_range, item.substr(0, eq) + " has no outcome '" + item.substr(eq + 1) + "'");
        }
        l.diagram.set_evidence(v, static_cast<std::size_t>(it - outs.begin()));
    }
    if (complete) l.diagram = complete_no_forgetting(l.diagram);
    return l;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact influence diagram solver"};
    app.require_subcommand(1);

    std::string model;
    std::vector<std::string> evidence;
    bool complete = false;

    auto* validate_cmd = app.add_subcommand("validate", "check a model and print the report");
    validate_cmd->add_option("model", model, "model file")->required();
    validate_cmd->add_flag("--complete-no-forgetting", complete, "add missing memory arcs first");

    std::string method = "onedir", mode, out_path, dot_path;
    bool full_info = false, no_prune = false, everywhere = false;
    auto* solve_cmd = app.add_subcommand("solve", "solve a model");
    solve_cmd->add_option("model", model, "model file")->required();
    solve_cmd->add_option("--method", method, "queries | cluster | onedir | oracle")
        ->check(CLI::IsMember({"queries", "cluster", "onedir", "oracle"}));
    solve_cmd->add_option("--mode", mode, "rescaled | valuation | likelihood")
        ->check(CLI::IsMember({"rescaled", "valuation", "likelihood"}));
    solve_cmd->add_option("--evidence", evidence, "VAR=OUTCOME (repeatable)");
    solve_cmd->add_option("--out", out_path, "write the solution as JSON");
    solve_cmd->add_option("--dot", dot_path, "write the cluster tree in DOT");
    solve_cmd->add_flag("--complete-no-forgetting", complete, "add missing memory arcs first");
    solve_cmd->add_flag("--full-information", full_info, "decide over all observed parents, not just the relevant ones");
    solve_cmd->add_flag("--no-prune", no_prune, "keep barren and irrelevant nodes");
    solve_cmd->add_flag("--value-everywhere", everywhere, "onedir: keep Value in the elimination graph");

    auto* info_cmd = app.add_subcommand("info", "summarize a model");
    info_cmd->add_option("model", model, "model file")->required();
    info_cmd->add_flag("--complete-no-forgetting", complete, "add missing memory arcs first");

    CLI11_PARSE(app, argc, argv);

    Loaded l;
    try {
        l = load(model, evidence, complete);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kInvalid;
    }
    const InfluenceDiagram& d = l.diagram;
    const ValidationReport report = validate(d);

    if (validate_cmd->parsed()) {
        print_report(std::cout, report);
        std::cout << (report.ok() ? "ok" : std::to_string(report.errors.size()) + " error(s)") << "\n";
        return report.ok() ? 0 : kInvalid;
    }
    if (!report.ok()) {
        print_report(std::cerr, report);
        return kInvalid;
    }

    if (info_cmd->parsed()) {
        std::size_t counts[3] = {0, 0, 0};
        for (const auto& v : d.variables()) ++counts[static_cast<int>(v.kind)];
        std::cout << "chance " << counts[0] << "\ndecision " << counts[1] << "\nvalue " << counts[2] << "\narcs "
                  << d.arcs().size() << "\ncombination " << to_string(d.combination()) << "\n";
        std::cout << "decision order " << list(d, d.decision_order()) << "\n";
        std::vector<VarId> ev;
        for (const auto& [v, o] : d.evidence()) ev.push_back(v);
        std::cout << "evidence " << list(d, ev) << "\n";
        for (const auto& rel : relevance_analysis(d)) {
            std::cout << d.variable(rel.decision).id << ": I = " << list(d, information_set(d, rel.decision))
                      << ", R = " << list(d, rel.relevant) << ", W = " << list(d, rel.values) << "\n";
        }
        print_report(std::cout, report);
        return 0;
    }

    try {
        SolveOptions opts;
        opts.method = *parse_method(method);
        if (!mode.empty()) opts.mode = parse_encoding(mode);
        opts.transform.full_information = full_info;
        opts.transform.prune = !no_prune;
        opts.tree.value_everywhere = everywhere;
        const EvaluationResult r = solve(d, opts);

        std::cout << "backend " << r.diagnostics.backend << "\nMEV " << num(r.mev) << "\n";
        if (r.meu) std::cout << "MEU " << num(*r.meu) << "\n";
        std::cout << "P(E=e) " << num(r.evidence_probability) << "\n";
        print_policy(std::cout, d, r.policy);
        for (const auto& n : r.diagnostics.notes) std::cout << "note " << n << "\n";

        if (!out_path.empty()) write_text(out_path, dump_solution(d, r));
        if (!dot_path.empty()) {
            if (opts.method == Method::onedir) {
                SinglePassOptions so;
                so.mode = opts.mode.value_or(Encoding::valuation);
                so.transform = opts.transform;
                so.tree = opts.tree;
                const auto run = run_one_directional(d, so);
                if (run.result.diagnostics.degenerate) {
                    throw Error(ErrorCode::degenerate_value, "no tree is built for a constant value table");
                }
                write_text(dot_path, to_dot(run.tree, run.net));
            } else {
                const Network net = to_valuation_network(d, opts.transform);
                std::vector<std::vector<VarId>> fams;
                for (std::size_t i = 0; i < net.decisions.size(); ++i) {
                    fams.push_back(net.decision_scopes[i]);
                    fams.back().push_back(net.decisions[i]);
                }
                const ClusterTree tree = build_cluster_tree(net, fams);
                write_text(dot_path, to_dot(tree, [&](VarId v) { return net.variables[v].id; }));
            }
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kSolverError;
    }
    return 0;
}

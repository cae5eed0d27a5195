#include "idsolve/solve.hpp"

namespace idsolve {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::queries: return "queries";
        case Method::cluster: return "cluster";
        case Method::onedir: return "onedir";
        case Method::oracle: return "oracle";
    }
    return "onedir";
}

std::optional<Method> parse_method(std::string_view s) {
    for (Method m : {Method::queries, Method::cluster, Method::onedir, Method::oracle}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

std::optional<Encoding> parse_encoding(std::string_view s) {
    for (Encoding e : {Encoding::rescaled_utility, Encoding::valuation, Encoding::likelihood}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

EvaluationResult solve(const InfluenceDiagram& diagram, const SolveOptions& options) {
    switch (options.method) {
        case Method::queries: {
            if (options.mode && *options.mode != Encoding::rescaled_utility) {
                throw Error(ErrorCode::invalid_argument, "queries only support the rescaled mode");
            }
            return solve_by_queries(diagram, QueryOptions{options.transform, options.evidence_mode});
        }
        case Method::cluster: {
            ClusterOptions opts;
            opts.mode = options.mode.value_or(Encoding::rescaled_utility);
            opts.transform = options.transform;
            opts.evidence_mode = options.evidence_mode;
            return solve_by_clustering(diagram, opts);
        }
        case Method::onedir: {
            SinglePassOptions opts;
            opts.mode = options.mode.value_or(Encoding::valuation);
            if (opts.mode == Encoding::likelihood) {
                throw Error(ErrorCode::invalid_argument, "onedir supports the valuation and rescaled modes");
            }
            opts.transform = options.transform;
            opts.tree = options.tree;
            return solve_one_directional(diagram, opts);
        }
        case Method::oracle: {
            const OracleResult r = brute_solve(diagram, options.oracle_scope);
            EvaluationResult out;
            out.policy = r.optimal.front();
            out.mev = r.mev;
            out.evidence_probability = r.evidence_probability;
            out.diagnostics.backend = "oracle";
            out.diagnostics.notes.push_back("policies evaluated: " + std::to_string(r.evaluated));
            out.diagnostics.notes.push_back("optimal policies: " + std::to_string(r.optimal.size()));
            return out;
        }
    }
    throw Error(ErrorCode::invalid_argument, "unknown method");
}

}  // namespace idsolve

#include "idsolve/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace idsolve {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::parse_error, msg); }

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

template <typename T>
T as(const json& j, const std::string& what) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail("bad " + what);
    }
}

std::vector<VarId> ids(const InfluenceDiagram& d, const json& list, const std::string& what) {
    std::vector<VarId> out;
    for (const auto& id : as<std::vector<std::string>>(list, what)) out.push_back(d.index_of(id));
    return out;
}

std::size_t outcome_index(const Variable& v, const std::string& label) {
    auto it = std::find(v.outcomes.begin(), v.outcomes.end(), label);
    if (it == v.outcomes.end()) {
        throw Error(ErrorCode::evidence_out_of_range, v.id + " has no outcome '" + label + "'");
    }
    return static_cast<std::size_t>(it - v.outcomes.begin());
}

}  // namespace

InfluenceDiagram parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    if (!doc.is_object()) fail("model must be an object");

    InfluenceDiagram d;
    for (const auto& v : field(doc, "variables")) {
        const auto id = as<std::string>(field(v, "id"), "variable id");
        const auto kind = as<std::string>(field(v, "kind"), "kind of " + id);
        const auto name = v.contains("name") ? as<std::string>(v.at("name"), "name of " + id) : std::string{};
        if (kind == "chance") {
            d.add_chance(id, as<std::vector<std::string>>(field(v, "outcomes"), "outcomes of " + id), name);
        } else if (kind == "decision") {
            d.add_decision(id, as<std::vector<std::string>>(field(v, "outcomes"), "outcomes of " + id), name);
        } else if (kind == "value") {
            d.add_value(id, name);
        } else {
            fail("unknown kind '" + kind + "' for " + id);
        }
    }
    if (doc.contains("arcs")) {
        for (const auto& a : doc.at("arcs")) {
            const auto pair = as<std::vector<std::string>>(a, "arc");
            if (pair.size() != 2) fail("an arc needs two ids");
            d.add_arc(pair[0], pair[1]);
        }
    }
    if (doc.contains("cpts")) {
        for (const auto& c : doc.at("cpts")) {
            const VarId v = d.index_of(as<std::string>(field(c, "variable"), "cpt variable"));
            const auto parents = c.contains("parents") ? ids(d, c.at("parents"), "cpt parents") : std::vector<VarId>{};
            d.set_cpt(v, parents, as<std::vector<double>>(field(c, "probabilities"), "probabilities"));
        }
    }
    if (doc.contains("values")) {
        const json& vals = doc.at("values");
        const auto comb = vals.contains("combination") ? as<std::string>(vals.at("combination"), "combination")
                                                       : std::string("none");
        if (comb == "none") {
            d.set_combination(Combination::none);
        } else if (comb == "sum") {
            d.set_combination(Combination::sum);
        } else if (comb == "product") {
            d.set_combination(Combination::product);
        } else {
            fail("unknown combination '" + comb + "'");
        }
        for (const auto& t : field(vals, "tables")) {
            const VarId v = d.index_of(as<std::string>(field(t, "variable"), "value variable"));
            const auto attrs = t.contains("attributes") ? ids(d, t.at("attributes"), "attributes") : std::vector<VarId>{};
            d.set_value_table(v, attrs, as<std::vector<double>>(field(t, "values"), "values"));
        }
    }
    if (doc.contains("decision_order")) d.set_decision_order(ids(d, doc.at("decision_order"), "decision order"));
    if (doc.contains("evidence")) {
        const json& ev = doc.at("evidence");
        if (!ev.is_object()) fail("evidence must be an object");
        for (const auto& [id, label] : ev.items()) {
            const VarId v = d.index_of(id);
            d.set_evidence(v, outcome_index(d.variable(v), as<std::string>(label, "evidence outcome")));
        }
    }
    return d;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

InfluenceDiagram load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

std::string dump_model(const InfluenceDiagram& d) {
    json doc;
    doc["variables"] = json::array();
    for (const auto& v : d.variables()) {
        json j;
        j["id"] = v.id;
        if (v.name != v.id) j["name"] = v.name;
        j["kind"] = std::string(to_string(v.kind));
        if (v.kind != VarKind::value) j["outcomes"] = v.outcomes;
        doc["variables"].push_back(std::move(j));
    }
    doc["arcs"] = json::array();
    for (const auto& [p, c] : d.arcs()) doc["arcs"].push_back({d.variable(p).id, d.variable(c).id});
    doc["cpts"] = json::array();
    for (const auto& [v, f] : d.cpts()) {
        json j;
        j["variable"] = d.variable(v).id;
        j["parents"] = json::array();
        for (std::size_t k = 0; k + 1 < f.scope().size(); ++k) j["parents"].push_back(d.variable(f.scope()[k]).id);
        j["probabilities"] = f.values();
        doc["cpts"].push_back(std::move(j));
    }
    json vals;
    vals["combination"] = std::string(to_string(d.combination()));
    vals["tables"] = json::array();
    for (const auto& [v, f] : d.value_tables()) {
        json j;
        j["variable"] = d.variable(v).id;
        j["attributes"] = json::array();
        for (VarId a : f.scope()) j["attributes"].push_back(d.variable(a).id);
        j["values"] = f.values();
        vals["tables"].push_back(std::move(j));
    }
    doc["values"] = std::move(vals);
    doc["decision_order"] = json::array();
    for (VarId v : d.decision_order()) doc["decision_order"].push_back(d.variable(v).id);
    doc["evidence"] = json::object();
    for (const auto& [v, o] : d.evidence()) doc["evidence"][d.variable(v).id] = d.variable(v).outcomes.at(o);
    return doc.dump(2) + "\n";
}

std::string dump_solution(const InfluenceDiagram& d, const EvaluationResult& result) {
    json doc;
    doc["mev"] = result.mev;
    if (result.meu) doc["meu"] = *result.meu;
    doc["evidence_probability"] = result.evidence_probability;
    doc["policy"] = json::array();
    for (const auto& r : result.policy.rules) {
        const Variable& dv = d.variable(d.index_of(r.decision));
        json j;
        j["decision"] = r.decision;
        j["scope"] = r.scope;
        j["choices"] = json::array();
        for (std::size_t c : r.choice) j["choices"].push_back(dv.outcomes.at(c));
        doc["policy"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

Policy parse_policy(std::string_view text, const InfluenceDiagram& d) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    Policy out;
    for (const auto& j : field(doc, "policy")) {
        DecisionRule r;
        r.decision = as<std::string>(field(j, "decision"), "decision");
        const VarId dv = d.index_of(r.decision);
        if (d.variable(dv).kind != VarKind::decision) {
            throw Error(ErrorCode::not_a_decision, r.decision + " is not a decision");
        }
        r.scope = as<std::vector<std::string>>(field(j, "scope"), "scope of " + r.decision);
        std::size_t rows = 1;
        for (const auto& id : r.scope) {
            r.scope_cards.push_back(d.variable(d.index_of(id)).cardinality());
            rows *= r.scope_cards.back();
        }
        const auto labels = as<std::vector<std::string>>(field(j, "choices"), "choices of " + r.decision);
        if (labels.size() != rows) {
            fail(r.decision + " has " + std::to_string(labels.size()) + " choices for " + std::to_string(rows) +
                 " configurations");
        }
        for (const auto& l : labels) {
            const auto& alts = d.variable(dv).outcomes;
            auto it = std::find(alts.begin(), alts.end(), l);
            if (it == alts.end()) fail(r.decision + " has no alternative '" + l + "'");
            r.choice.push_back(static_cast<std::size_t>(it - alts.begin()));
        }
        out.rules.push_back(std::move(r));
    }
    return out;
}

Policy load_policy(const std::filesystem::path& path, const InfluenceDiagram& d) {
    return parse_policy(read_file(path), d);
}

}  // namespace idsolve

// JSON import/export for the file interfaces: bipartite states and branch
// trees.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mwi/branching.hpp"
#include "mwi/errors.hpp"
#include "mwi/schmidt.hpp"

namespace mwi::io {

using nlohmann::json;

// {"d1": int, "d2": int, "re": [...], "im": [...]} with row-major ordering.
inline json state_to_json(const schmidt::BipartiteState& s) {
    json j;
    j["d1"] = s.d1();
    j["d2"] = s.d2();
    std::vector<double> re, im;
    re.reserve(s.d1() * s.d2());
    im.reserve(s.d1() * s.d2());
    for (const auto& z : s.coeffs().data()) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

inline schmidt::BipartiteState state_from_json(const json& j) {
    if (!j.is_object() || !j.contains("d1") || !j.contains("d2") || !j.contains("re") ||
        !j.contains("im"))
        throw ContractViolation("state json: need d1, d2, re, im");
    const auto d1 = j.at("d1").get<std::size_t>();
    const auto d2 = j.at("d2").get<std::size_t>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw ShapeError("state json: re/im length mismatch");
    std::vector<schmidt::Complex> v(re.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = schmidt::Complex(re[i], im[i]);
    return schmidt::make_bipartite(v, d1, d2);
}

// Adjacency-list export: per node {id, parent, label, lam, log_weight, S_i}.
inline json tree_to_json(const branching::BranchTree& tree) {
    json nodes = json::array();
    for (branching::NodeId id = 0; id < tree.size(); ++id) {
        const auto& n = tree.node(id);
        json jn;
        jn["id"] = n.id;
        if (n.parent)
            jn["parent"] = *n.parent;
        else
            jn["parent"] = nullptr;
        if (n.parent)
            jn["label"] = n.label;
        else
            jn["label"] = nullptr;
        jn["lam"] = n.lam;
        jn["log_weight"] = n.log_weight;
        jn["S_i"] = n.rel_entropy;
        nodes.push_back(jn);
    }
    json j;
    j["root"] = tree.root();
    j["nodes"] = nodes;
    return j;
}

} // namespace mwi::io

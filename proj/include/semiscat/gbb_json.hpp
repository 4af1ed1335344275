#pragma once

#include <string>

#include <json.hpp>

#include "semiscat/raytrace.hpp"

namespace semiscat {

/// GBBTree document: {"spec": {name, alpha, energy}, "nodes": [...]} with one
/// samples row per trace point, laid out [s, x, y.., xi, eta..].
inline nlohmann::json gbb_to_json(const GBBTree& tree) {
    nlohmann::json doc;
    doc["spec"] = {{"name", tree.spec_name}, {"alpha", tree.alpha}, {"energy", tree.energy}};
    doc["nodes"] = nlohmann::json::array();
    for (const GBBNode& n : tree.nodes) {
        nlohmann::json jn;
        jn["id"] = n.id;
        if (n.parent < 0)
            jn["parent"] = nullptr;
        else
            jn["parent"] = n.parent;
        jn["branch_kind"] = to_string(n.kind);
        jn["strength"] = n.strength;
        jn["reflect_count"] = n.reflect_count;
        jn["status"] = to_string(n.segment.status);
        nlohmann::json samples = nlohmann::json::array();
        for (std::size_t i = 0; i < n.segment.points.size(); ++i) {
            const PhasePoint& p = n.segment.points[i];
            nlohmann::json row = nlohmann::json::array();
            row.push_back(n.segment.s[i]);
            row.push_back(p.x);
            for (double v : p.y) row.push_back(v);
            row.push_back(p.xi);
            for (double v : p.eta) row.push_back(v);
            samples.push_back(std::move(row));
        }
        jn["samples"] = std::move(samples);
        doc["nodes"].push_back(std::move(jn));
    }
    return doc;
}

inline BranchKind branch_kind_from_string(const std::string& s) {
    if (s == "incident") return BranchKind::incident;
    if (s == "transmitted") return BranchKind::transmitted;
    if (s == "reflected") return BranchKind::reflected;
    if (s == "stuck") return BranchKind::stuck;
    throw ConfigError("unknown branch kind: " + s);
}

inline SegmentStatus segment_status_from_string(const std::string& s) {
    if (s == "completed") return SegmentStatus::completed;
    if (s == "hit_interface") return SegmentStatus::hit_interface;
    if (s == "glancing_nonunique") return SegmentStatus::glancing_nonunique;
    if (s == "step_underflow") return SegmentStatus::step_underflow;
    throw ConfigError("unknown segment status: " + s);
}

inline GBBTree gbb_from_json(const nlohmann::json& doc) {
    GBBTree tree;
    tree.spec_name = doc.at("spec").at("name").get<std::string>();
    tree.alpha = doc.at("spec").at("alpha").get<double>();
    tree.energy = doc.at("spec").at("energy").get<double>();
    for (const auto& jn : doc.at("nodes")) {
        GBBNode n;
        n.id = jn.at("id").get<int>();
        n.parent = jn.at("parent").is_null() ? -1 : jn.at("parent").get<int>();
        n.kind = branch_kind_from_string(jn.at("branch_kind").get<std::string>());
        n.strength = jn.at("strength").get<double>();
        n.reflect_count = jn.value("reflect_count", 0);
        n.segment.status = segment_status_from_string(jn.at("status").get<std::string>());
        for (const auto& row : jn.at("samples")) {
            const std::size_t width = row.size();
            const int m = static_cast<int>((width - 3) / 2);
            PhasePoint p;
            n.segment.s.push_back(row.at(0).get<double>());
            p.x = row.at(1).get<double>();
            for (int i = 0; i < m; ++i) p.y.push_back(row.at(2 + i).get<double>());
            p.xi = row.at(2 + m).get<double>();
            for (int i = 0; i < m; ++i) p.eta.push_back(row.at(3 + m + i).get<double>());
            n.segment.points.push_back(std::move(p));
        }
        tree.nodes.push_back(std::move(n));
    }
    return tree;
}

}  // namespace semiscat

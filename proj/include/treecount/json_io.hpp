#pragma once

// JSON views of the library types (debug dumps and CLI output). Kept apart
// from the core headers so only JSON-speaking targets pull in the library.

#include <json.hpp>

#include "treecount/cost_model.hpp"
#include "treecount/estimator.hpp"
#include "treecount/templates.hpp"

namespace treecount {

inline nlohmann::json to_json(const PlanNode& node) {
    nlohmann::json j{
        {"id", node.id},
        {"vertices", node.vertices},
        {"root", node.root},
        {"size", node.size},
    };
    if (!node.is_leaf()) {
        j["active_child"] = node.active_child;
        j["passive_child"] = node.passive_child;
        j["cut_edge"] = {node.cut_edge.first, node.cut_edge.second};
    }
    return j;
}

inline nlohmann::json to_json(const PartitionPlan& plan) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const PlanNode& node : plan.nodes) nodes.push_back(to_json(node));
    return {{"k", plan.k}, {"root", plan.root}, {"nodes", nodes}, {"dp_order", plan.dp_order}};
}

inline nlohmann::json to_json(const EstimateResult& r) {
    return {
        {"iterations", r.iterations},
        {"rooted_totals", r.rooted_totals},
        {"colorful_probability", r.colorful_probability},
        {"aut", r.aut},
        {"estimate", r.estimate},
        {"stderr", r.stderr_of_mean},
    };
}

inline nlohmann::json to_json(const ModelParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}};
}

}  // namespace treecount

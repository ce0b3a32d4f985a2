#pragma once

#include <json.hpp>

#include "relab/core.hpp"

// JSON forms: distributions as {"axis_sizes":[..],"probs":[[..],..]} with
// row-major nesting; FiniteDist as a flat array.

namespace relab {

using nlohmann::json;

inline json to_json(const FiniteDist& d) { return json(d.p); }

inline FiniteDist finite_dist_from_json(const json& j) {
    return FiniteDist(j.get<std::vector<double>>());
}

json to_json(const JointDist& j);
JointDist joint_from_json(const json& j);

inline json to_json(const CondDist& c) {
    json rows = json::array();
    for (const auto& r : c.rows) rows.push_back(r.p);
    return json{{"rows", rows}};
}

inline CondDist cond_from_json(const json& j) {
    std::vector<FiniteDist> rows;
    for (const auto& r : j.at("rows")) rows.emplace_back(r.get<std::vector<double>>());
    return CondDist(std::move(rows));
}

}  // namespace relab

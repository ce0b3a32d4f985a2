#include "relab/json_io.hpp"

namespace relab {

json to_json(const JointDist& d) {
    json probs;
    if (d.axes() == 2) {
        probs = json::array();
        for (int i = 0; i < d.axis_sizes[0]; ++i) {
            json row = json::array();
            for (int j = 0; j < d.axis_sizes[1]; ++j) row.push_back(d.at2(i, j));
            probs.push_back(row);
        }
    } else {
        probs = json::array();
        for (int i = 0; i < d.axis_sizes[0]; ++i) {
            json plane = json::array();
            for (int j = 0; j < d.axis_sizes[1]; ++j) {
                json row = json::array();
                for (int k = 0; k < d.axis_sizes[2]; ++k) row.push_back(d.at3(i, j, k));
                plane.push_back(row);
            }
            probs.push_back(plane);
        }
    }
    return json{{"axis_sizes", d.axis_sizes}, {"probs", probs}};
}

JointDist joint_from_json(const json& j) {
    auto sizes = j.at("axis_sizes").get<std::vector<int>>();
    std::vector<double> flat;
    const json& probs = j.at("probs");
    if (sizes.size() == 2) {
        for (const auto& row : probs)
            for (const auto& x : row) flat.push_back(x.get<double>());
    } else {
        for (const auto& plane : probs)
            for (const auto& row : plane)
                for (const auto& x : row) flat.push_back(x.get<double>());
    }
    return JointDist(sizes, std::move(flat));
}

}  // namespace relab

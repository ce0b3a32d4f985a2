#pragma once

#include "relab/core.hpp"

// SCCSI (one-helper) error-exponent bounds as nested grid games:
// achievable bound eta_lower, converse eta_upper, sphere-packing eta_sp.

namespace relab {

struct SccsiProblem {
    JointDist p_xy;  // axes (X, Y)
    double r1 = 0.0;
    double r2 = 0.0;
    int s_size = 1;  // helper auxiliary alphabet (cap for eta_upper/eta_sp)
};

struct SccsiReport {
    ExtReal value;
    FiniteDist q_y;
    CondDist q_s_given_y;
    // Inner optimizer rows q_{X|Y,S} (eta_lower) or q_{X|Y} (eta_upper), row index y*ns+s / y.
    std::vector<std::vector<double>> inner_rows;
    GridSpec grid;
    bool refined = false;
};

struct SpReport {
    ExtReal value;
    JointDist q_xy;
    GridSpec grid;
};

// |S| <= |X||Y| + |Y| + 2
int eta_upper_s_bound(int x_size, int y_size);

SccsiReport eta_lower(const SccsiProblem& prob, const GridSpec& grid);
SccsiReport eta_upper(const SccsiProblem& prob, const GridSpec& grid);
SpReport eta_sp(const SccsiProblem& prob, const GridSpec& grid);

ExtReal point_to_point_exponent(const FiniteDist& p_x, double r1);

// Objective re-evaluation at stored witnesses (report invariant checks).
ExtReal eta_lower_objective(const SccsiProblem& prob,
                            const std::vector<double>& q_y,
                            const std::vector<std::vector<double>>& w_s_given_y,
                            const std::vector<std::vector<double>>& q_x_given_ys);

}  // namespace relab

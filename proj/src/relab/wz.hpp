#pragma once

#include "relab/core.hpp"

// Discrete-memoryless Wyner-Ziv exponents: the G_D branch functional, the
// five-level achievable game, R_WZ, the change-of-measure upper bound, and the
// functional source coding exponents.

namespace relab {

struct DistortionTable {
    int x_size = 0;
    int xhat_size = 0;
    std::vector<double> d;  // row-major (x, xhat)

    DistortionTable() = default;
    DistortionTable(int xs, int xh, std::vector<double> table);
    double operator()(int x, int xhat) const { return d[x * xhat_size + xhat]; }
    double max_entry() const;
};

struct ReproductionFn {
    int y_size = 0;
    int z_size = 0;
    int xhat_size = 0;
    std::vector<int> f;  // row-major (y, z) -> xhat

    ReproductionFn() = default;
    ReproductionFn(int ys, int zs, int xh, std::vector<int> table);
    int operator()(int y, int z) const { return f[y * z_size + z]; }
};

struct WzProblem {
    JointDist p_xy;  // axes (X, Y)
    double rate = 0.0;
    double delta = 0.0;
    DistortionTable dist;
    int z_size = 0;  // 0 -> default |X|+1
    int xhat_size = 0;
};

struct FunctionalProblem {
    JointDist p_xy;
    std::vector<int> g;  // x -> function value
    double rate = 0.0;
};

struct WzReport {
    ExtReal value;
    FiniteDist q_x;
    CondDist q_z_given_x;
    FiniteDist q_y;
    ReproductionFn f;
    GridSpec grid;
};

ExtReal g_d(const JointDist& q_xyz, const JointDist& p_xy, const CondDist& q_zx,
            const ReproductionFn& f, const DistortionTable& dist, double delta, double rate);

WzReport theta_lower(const WzProblem& prob, const GridSpec& grid);

ExtReal marton_binary_hamming(const FiniteDist& p_x, double rate, double delta);

double rwz(const JointDist& q_xy, double delta, const DistortionTable& dist, int z_size,
           const GridSpec& grid);

ExtReal theta_upper(const WzProblem& prob, const GridSpec& grid);

struct XiReport {
    ExtReal xi_lower;
    ExtReal xi_upper;
};

// `unconstrained` drops the H_Q(g(X)|Y) >= rate constraint from xi_lower
// (the printed Eq-16 form makes its own bracket vanish on the constraint set).
XiReport xi_exponents(const FunctionalProblem& prob, const GridSpec& grid,
                      bool unconstrained = false);

}  // namespace relab

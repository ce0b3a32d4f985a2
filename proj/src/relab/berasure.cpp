#include "relab/berasure.hpp"

#include <algorithm>
#include <cmath>

namespace relab {

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

ReproductionFn be_natural_f() {
    // index 1 is the erasure symbol on Y, Z and Xhat
    std::vector<int> tab(9);
    for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 3; ++z) tab[y * 3 + z] = (z != 1) ? z : y;
    return ReproductionFn(3, 3, 3, tab);
}

DistortionTable be_distortion(double kappa) {
    // x rows (-1, +1); xhat columns (-1, 0, +1)
    return DistortionTable(2, 3, {0.0, 1.0, kappa, kappa, 1.0, 0.0});
}

ExtReal be_g1(const BeConfig& cfg, double delta_z) {
    if (delta_z < 0.0 || delta_z > 1.0) throw std::invalid_argument("delta_z in [0,1]");
    if (cfg.p * delta_z >= cfg.delta - 1e-15) return ExtReal(0.0);
    if (delta_z < cfg.delta) return ExtReal::inf();
    // Distortion only accrues in the Z-erased cells (sign errors cost infinite
    // divergence, matched cells cost zero distortion). The optimal tilt is the
    // I-projection of P_{Y|x} onto {q(erase) = delta/delta_z} in each such cell.
    const double t = cfg.delta / delta_z;  // in (p, 1]
    return ExtReal(delta_z * binary_kl(t, cfg.p));
}

namespace {

// Symmetric two-parameter evaluation for the binning-failure exponent:
// a0 / b0 are the Y-erasure weights in the Z-matched / Z-erased cells.
double g2_value(const BeConfig& cfg, double dz, double a0, double b0) {
    if (dz * b0 > cfg.delta - cfg.grid.strict_eps) return kInf;
    const double d = (1.0 - dz) * binary_kl(a0, cfg.p) + dz * binary_kl(b0, cfg.p);
    const double m0 = (1.0 - dz) * a0 + dz * b0;  // P(Y erased)
    const double h_y = binary_entropy(m0) + (1.0 - m0);
    const double h_y_given_z =
        (1.0 - dz) * binary_entropy(a0) + dz * (binary_entropy(b0) + (1.0 - b0));
    const double i_yz = std::max(0.0, h_y - h_y_given_z);
    return d + std::max(0.0, cfg.rate - (1.0 - dz) + i_yz);
}

}  // namespace

ExtReal be_g2(const BeConfig& cfg, double delta_z) {
    if (delta_z < 0.0 || delta_z > 1.0) throw std::invalid_argument("delta_z in [0,1]");
    if (1.0 - delta_z < cfg.rate - 1e-12) return ExtReal::inf();

    const int n = 400;
    double best = kInf, ba = cfg.p, bb = cfg.p;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double v = g2_value(cfg, delta_z, double(i) / n, double(j) / n);
            if (v < best) {
                best = v;
                ba = double(i) / n;
                bb = double(j) / n;
            }
        }
    double step = 1.0 / n;
    for (int round = 0; round < 6; ++round) {
        const double w = step;
        step /= 10.0;
        const double a_lo = std::max(0.0, ba - w), a_hi = std::min(1.0, ba + w);
        const double b_lo = std::max(0.0, bb - w), b_hi = std::min(1.0, bb + w);
        for (double a = a_lo; a <= a_hi + 1e-15; a += step)
            for (double b = b_lo; b <= b_hi + 1e-15; b += step) {
                const double v = g2_value(cfg, delta_z, a, b);
                if (v < best) {
                    best = v;
                    ba = a;
                    bb = b;
                }
            }
    }
    return std::isinf(best) ? ExtReal::inf() : ExtReal(best);
}

BeCurve be_exponent(const BeConfig& cfg) {
    BeCurve curve;
    curve.value = ExtReal(-kInf);
    const int steps = static_cast<int>(std::llround(1.0 / cfg.dgrid));
    for (int i = 0; i <= steps; ++i) {
        const double dz = std::min(1.0, double(i) * cfg.dgrid);
        BePoint pt{dz, be_g1(cfg, dz), be_g2(cfg, dz)};
        curve.points.push_back(pt);
        const ExtReal m = ext_min(pt.g1, pt.g2);
        if (curve.value < m) {
            curve.value = m;
            curve.best_delta_z = dz;
        }
    }
    return curve;
}

ExtReal two_sided_exponent(double p, double rate, double delta) {
    const double q = rate + delta;
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("rate + delta outside [0,1]");
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("p in (0,1) required");
    return ExtReal(binary_kl(q, p));
}

double be_rd_function(double p, double delta) { return std::max(0.0, p - delta); }

}  // namespace relab

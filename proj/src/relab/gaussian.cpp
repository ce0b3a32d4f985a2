#include "relab/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace relab {

namespace {
const double kInf = std::numeric_limits<double>::infinity();

bool corr_psd(double rxy, double rxz, double ryz) {
    if (std::abs(rxy) > 1.0 || std::abs(rxz) > 1.0 || std::abs(ryz) > 1.0) return false;
    return 1.0 + 2.0 * rxy * rxz * ryz - rxy * rxy - rxz * rxz - ryz * ryz >= -1e-10;
}

// 1-D scan over [lo, hi] at `step` plus `extras`, then `rounds` passes of
// window +-prev_step around the incumbent with the step shrunk by `shrink`.
template <typename F>
std::pair<double, double> line_search(double lo, double hi, double step,
                                      const std::vector<double>& extras, int rounds,
                                      double shrink, bool maximize, F&& f) {
    double best_x = lo, best_v = maximize ? -kInf : kInf;
    auto consider = [&](double x) {
        const double v = f(x);
        if (maximize ? v > best_v : v < best_v) {
            best_v = v;
            best_x = x;
        }
    };
    for (double x = lo; x <= hi + 1e-12; x += step) consider(std::min(x, hi));
    for (double x : extras)
        if (x >= lo - 1e-12 && x <= hi + 1e-12) consider(std::clamp(x, lo, hi));
    for (int r = 0; r < rounds; ++r) {
        const double w = step;
        step *= shrink;
        const double a = std::max(lo, best_x - w), b = std::min(hi, best_x + w);
        for (double x = a; x <= b + 1e-12; x += step) consider(std::min(x, b));
    }
    return {best_x, best_v};
}

}  // namespace

double gauss_kl(const Eigen::MatrixXd& k, const Eigen::MatrixXd& kbar) {
    if (k.rows() != k.cols() || kbar.rows() != kbar.cols() || k.rows() != kbar.rows())
        throw std::invalid_argument("covariance dimensions mismatch");
    const double dk = k.determinant(), dkb = kbar.determinant();
    if (!(dk > 0.0) || !(dkb > 0.0))
        throw std::invalid_argument("covariances must be positive definite");
    const double tr = (kbar.inverse() * k).trace();
    return 0.5 * (std::log(dkb / dk) + tr - k.rows());
}

Eigen::Matrix3d gauss_cov3(double sigma_x2, double sigma_y2, double rho_xy, double rho_xz,
                           double rho_yz) {
    const double sx = std::sqrt(sigma_x2), sy = std::sqrt(sigma_y2);
    Eigen::Matrix3d k;
    k << sigma_x2, sx * sy * rho_xy, sx * rho_xz,
         sx * sy * rho_xy, sigma_y2, sy * rho_yz,
         sx * rho_xz, sy * rho_yz, 1.0;
    return k;
}

Eigen::Matrix3d gauss_kbar(double sigma_x2, double rho_xz, double zeta) {
    const double c = rho_xz / std::sqrt(sigma_x2);
    Eigen::Matrix3d k;
    k << 1.0, zeta, c,
         zeta, 1.0, zeta * c,
         c, zeta * c, rho_xz * rho_xz / sigma_x2 + 1.0 - rho_xz * rho_xz;
    return k;
}

double gauss_mi(double rho) { return -0.5 * std::log1p(-rho * rho); }

double gauss_mse(double sigma_x2, double sigma_y2, double rho_xy, double rho_xz, double rho_yz,
                 double alpha, double beta) {
    const double sx = std::sqrt(sigma_x2), sy = std::sqrt(sigma_y2);
    return sigma_x2 + alpha * alpha * sigma_y2 + beta * beta -
           2.0 * alpha * sx * sy * rho_xy - 2.0 * beta * sx * rho_xz +
           2.0 * alpha * beta * sy * rho_yz;
}

ExtReal g_g(double sigma_x2, double sigma_y2, double rho_xy, double rho_xz, double rho_yz,
            double zeta, double alpha, double beta, double rate, double delta) {
    if (!corr_psd(rho_xy, rho_xz, rho_yz))
        throw std::invalid_argument("correlation triple not positive semidefinite");
    const double div =
        gauss_kl(gauss_cov3(sigma_x2, sigma_y2, rho_xy, rho_xz, rho_yz),
                 gauss_kbar(sigma_x2, rho_xz, zeta));
    const double mse = gauss_mse(sigma_x2, sigma_y2, rho_xy, rho_xz, rho_yz, alpha, beta);
    if (mse >= delta) return ExtReal(div);
    const double ixz = gauss_mi(rho_xz);
    if (ixz >= rate) return ExtReal(div + std::max(0.0, rate - ixz + gauss_mi(rho_yz)));
    return ExtReal::inf();
}

namespace {

struct CorrPoint {
    double rxy, ryz, div, iyz;
};

// Fixed (sigma_x2, rho_xz, sigma_y2) slice of the inner game. The adversary's
// remaining freedom (rho_xy, rho_yz) is tabulated once; estimator scans then
// cost O(#points) because mse is affine in the tabulated correlations.
struct InnerCtx {
    double s, sy, rho, zeta, rate, delta;
    double sx, syr, ixz;
    bool bin_on;
    double log_detkb;
    Eigen::Matrix3d minv;
    std::vector<CorrPoint> pts;

    double div_at(double rxy, double ryz) const {
        const double cd = 1.0 + 2.0 * rxy * rho * ryz - rxy * rxy - rho * rho - ryz * ryz;
        if (cd <= 1e-12) return kInf;
        const Eigen::Matrix3d k = gauss_cov3(s, sy, rxy, rho, ryz);
        double tr = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tr += minv(i, j) * k(j, i);
        return 0.5 * (log_detkb - std::log(s * sy * cd) + tr - 3.0);
    }

    double branch_value(double div, double mse, double ryz) const {
        if (mse >= delta) return div;
        if (!bin_on) return kInf;
        return div + std::max(0.0, rate - ixz + gauss_mi(ryz));
    }

    double exact_value(double rxy, double ryz, double a, double b) const {
        if (!corr_psd(rxy, rho, ryz)) return kInf;
        const double div = div_at(rxy, ryz);
        if (std::isinf(div)) return kInf;
        const double mse = gauss_mse(s, sy, rxy, rho, ryz, a, b);
        return branch_value(div, mse, ryz);
    }

    // Adversary value at estimator (a, b) over the tabulated points.
    double table_value(double a, double b) const {
        const double t0 = s + a * a * sy + b * b - 2.0 * b * sx * rho;
        const double u = -2.0 * a * sx * syr;
        const double v = 2.0 * a * b * syr;
        double best = kInf;
        for (const auto& p : pts) {
            const double mse = t0 + u * p.rxy + v * p.ryz;
            double val;
            if (mse >= delta)
                val = p.div;
            else if (bin_on)
                val = p.div + std::max(0.0, rate - ixz + p.iyz);
            else
                continue;
            if (val < best) best = val;
        }
        return best;
    }
};

InnerCtx make_ctx(double s, double rho, double sy, double zeta, double rate, double delta,
                  const GaussGrids& g) {
    InnerCtx c;
    c.s = s;
    c.sy = sy;
    c.rho = rho;
    c.zeta = zeta;
    c.rate = rate;
    c.delta = delta;
    c.sx = std::sqrt(s);
    c.syr = std::sqrt(sy);
    c.ixz = gauss_mi(rho);
    c.bin_on = c.ixz >= rate;
    const Eigen::Matrix3d kb = gauss_kbar(s, rho, zeta);
    c.log_detkb = std::log(kb.determinant());
    c.minv = kb.inverse();

    std::vector<std::pair<double, double>> corrs;
    for (double rxy = -g.corr_max; rxy <= g.corr_max + 1e-12; rxy += g.corr_step)
        for (double ryz = -g.corr_max; ryz <= g.corr_max + 1e-12; ryz += g.corr_step)
            corrs.emplace_back(rxy, ryz);
    corrs.emplace_back(0.0, 0.0);
    corrs.emplace_back(zeta, zeta * rho);
    corrs.emplace_back(zeta, 0.0);
    for (auto [rxy, ryz] : corrs) {
        if (!corr_psd(rxy, rho, ryz)) continue;
        const double div = c.div_at(rxy, ryz);
        if (std::isinf(div)) continue;
        c.pts.push_back({rxy, ryz, div, gauss_mi(ryz)});
    }
    return c;
}

// Pattern-search refinement of the adversary correlations at a fixed estimator.
double corr_refine(const InnerCtx& c, double a, double b, double rxy0, double ryz0,
                   const GaussGrids& g) {
    double best = c.exact_value(rxy0, ryz0, a, b);
    double bx = rxy0, by = ryz0, step = g.corr_step;
    for (int r = 0; r < g.inner_refine_rounds + 1; ++r) {
        const double w = step;
        step *= g.refine_shrink;
        for (double x = bx - w; x <= bx + w + 1e-12; x += step)
            for (double y = by - w; y <= by + w + 1e-12; y += step) {
                const double v = c.exact_value(std::clamp(x, -0.999, 0.999),
                                               std::clamp(y, -0.999, 0.999), a, b);
                if (v < best) {
                    best = v;
                    bx = std::clamp(x, -0.999, 0.999);
                    by = std::clamp(y, -0.999, 0.999);
                }
            }
    }
    return best;
}

struct G3Result {
    double value;
    double a, b;
};

G3Result g3_slice(double s, double rho, double sy, double zeta, double rate, double delta,
                  const GaussGrids& g) {
    const InnerCtx c = make_ctx(s, rho, sy, zeta, rate, delta, g);
    if (c.pts.empty()) return {kInf, 0.0, 0.0};

    double best = -kInf, ba = 0.0, bb = 0.0;
    auto consider = [&](double a, double b) {
        const double v = c.table_value(a, b);
        if (v > best) {
            best = v;
            ba = a;
            bb = b;
        }
    };
    for (double a = -g.lambda_max; a <= g.lambda_max + 1e-12; a += g.lambda_step)
        for (double b = -g.lambda_max; b <= g.lambda_max + 1e-12; b += g.lambda_step)
            consider(a, b);
    consider(0.0, c.sx * rho);  // pure-Z regression; mse independent of the table
    consider(0.0, 0.0);
    double step = g.lambda_step;
    for (int r = 0; r < g.inner_refine_rounds; ++r) {
        const double w = step;
        step *= g.refine_shrink;
        const double a0 = ba, b0 = bb;
        for (double a = a0 - w; a <= a0 + w + 1e-12; a += step)
            for (double b = b0 - w; b <= b0 + w + 1e-12; b += step) consider(a, b);
    }

    if (std::isinf(best) && best > 0) {
        // Error-free estimator on the table; let the adversary look off-grid.
        double v = std::min(corr_refine(c, ba, bb, 0.0, 0.0, g),
                            corr_refine(c, ba, bb, zeta, zeta * rho, g));
        return {v, ba, bb};
    }
    // The adversary gets the last word at the chosen estimator.
    double start_x = 0.0, start_y = 0.0, start_v = kInf;
    for (const auto& p : c.pts) {
        const double mse = gauss_mse(s, sy, p.rxy, rho, p.ryz, ba, bb);
        const double v = c.branch_value(p.div, mse, p.ryz);
        if (v < start_v) {
            start_v = v;
            start_x = p.rxy;
            start_y = p.ryz;
        }
    }
    const double refined = corr_refine(c, ba, bb, start_x, start_y, g);
    return {std::min(best, refined), ba, bb};
}

std::vector<double> rho_candidates(double s, double rate, double delta, double rho_max) {
    std::vector<double> cands;
    const double r_bin = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * rate)));
    cands.push_back(r_bin - 1e-6);
    cands.push_back(r_bin + 1e-6);
    if (s > delta) {
        const double r_mse = std::sqrt(1.0 - delta / s);
        cands.push_back(r_mse - 1e-6);
        cands.push_back(r_mse + 1e-6);
        cands.push_back(0.5 * (r_mse + r_bin));
    }
    for (double& x : cands) x = std::clamp(x, 0.0, rho_max);
    return cands;
}

}  // namespace

GaussReport theta_gauss_lower(double rate, double delta, double zeta, const GaussGrids& g) {
    if (!(rate > 0.0) || !(delta > 0.0) || std::abs(zeta) >= 1.0)
        throw std::invalid_argument("need rate > 0, delta > 0, |zeta| < 1");

    auto inner_sy = [&](double s, double rho) {
        return line_search(g.s_min, g.s_max, g.s_step, {1.0}, g.sigma_refine_rounds,
                           g.refine_shrink, false,
                           [&](double sy) { return g3_slice(s, rho, sy, zeta, rate, delta, g).value; });
    };
    auto val_s = [&](double s) {
        return line_search(0.0, g.rho_xz_max, g.rho_xz_step,
                           rho_candidates(s, rate, delta, g.rho_xz_max), g.inner_refine_rounds,
                           g.refine_shrink, true,
                           [&](double rho) { return inner_sy(s, rho).second; });
    };

    const double s_knee = delta * std::exp(2.0 * rate);
    auto [s_best, value] =
        line_search(g.s_min, g.s_max, g.s_step, {1.0, s_knee, s_knee + 1e-4},
                    g.sigma_refine_rounds, g.refine_shrink, false,
                    [&](double s) { return val_s(s).second; });

    GaussReport rep;
    rep.value = std::isinf(value) ? ExtReal::inf() : ExtReal(std::max(0.0, value));
    rep.sigma_x2 = s_best;
    rep.rho_xz = val_s(s_best).first;
    rep.sigma_y2 = inner_sy(s_best, rep.rho_xz).first;
    const auto g3 = g3_slice(s_best, rep.rho_xz, rep.sigma_y2, zeta, rate, delta, g);
    rep.alpha = g3.a;
    rep.beta = g3.b;
    return rep;
}

std::vector<std::pair<double, double>> g3_profile(double sigma_x2, double rate, double delta,
                                                  double zeta, const GaussGrids& g,
                                                  double rho_step) {
    std::vector<std::pair<double, double>> out;
    for (double rho = 0.0; rho <= g.rho_xz_max + 1e-12; rho += rho_step) {
        const double r = std::min(rho, g.rho_xz_max);
        auto [sy, v] =
            line_search(g.s_min, g.s_max, g.s_step, {1.0}, g.sigma_refine_rounds,
                        g.refine_shrink, false, [&](double sy_) {
                            return g3_slice(sigma_x2, r, sy_, zeta, rate, delta, g).value;
                        });
        (void)sy;
        out.emplace_back(r, v);
    }
    return out;
}

double marton_gauss(double rate, double delta) {
    const double t = delta * std::exp(2.0 * rate);
    if (t <= 1.0) return 0.0;
    return 0.5 * (t - std::log(t) - 1.0);
}

Eigen::Matrix2d gauss_kstar(double zeta, double delta, double rate) {
    Eigen::Matrix2d k;
    k << zeta * zeta + delta * std::exp(2.0 * rate), zeta, zeta, 1.0;
    return k;
}

double two_sided_gauss(double zeta, double delta, double rate) {
    const double u = delta * std::exp(2.0 * rate) / (1.0 - zeta * zeta);
    return 0.5 * (u - std::log(u) - 1.0);
}

double cond_rd(const Eigen::Matrix2d& sigma, double delta) {
    if (!(sigma(1, 1) > 0.0) || !(delta > 0.0)) throw std::invalid_argument("cond_rd arguments");
    const double cv = sigma(0, 0) - sigma(0, 1) * sigma(0, 1) / sigma(1, 1);
    if (!(cv > 0.0)) return 0.0;
    return 0.5 * std::max(0.0, std::log(cv / delta));
}

ExtReal theta_gauss_upper(double rate, double delta, double zeta, const GaussUpperGrids& g) {
    Eigen::Matrix2d sigma;
    sigma << 1.0, zeta, zeta, 1.0;
    if (!(rate > cond_rd(sigma, delta)))
        throw std::invalid_argument("rate must exceed the nominal conditional rate-distortion");

    const Eigen::Matrix2d sinv = sigma.inverse();
    const double log_dets = std::log(sigma.determinant());
    auto objective = [&](double sx, double sy, double rho) {
        const double c = rho * std::sqrt(sx * sy);
        const double cv = sx - c * c / sy;
        if (!(cv > 0.0) || 0.5 * std::log(cv / delta) < rate) return kInf;
        const double det = sx * sy - c * c;
        if (det <= 0.0) return kInf;
        const double tr = sinv(0, 0) * sx + 2.0 * sinv(0, 1) * c + sinv(1, 1) * sy;
        return 0.5 * (log_dets - std::log(det) + tr - 2.0);
    };

    double best = kInf, bx = 1.0, by = 1.0, br = 0.0;
    for (double sx = g.s_min; sx <= g.s_max + 1e-12; sx += g.s_step)
        for (double sy = g.s_min; sy <= g.s_max + 1e-12; sy += g.s_step)
            for (double rho = -g.rho_max; rho <= g.rho_max + 1e-12; rho += g.rho_step) {
                const double v = objective(sx, sy, rho);
                if (v < best) {
                    best = v;
                    bx = sx;
                    by = sy;
                    br = rho;
                }
            }
    double ws = g.s_step, wr = g.rho_step;
    for (int r = 0; r < g.refine_rounds; ++r) {
        const double pws = ws, pwr = wr;
        ws *= g.refine_shrink;
        wr *= g.refine_shrink;
        for (double sx = std::max(1e-3, bx - pws); sx <= bx + pws + 1e-12; sx += ws)
            for (double sy = std::max(1e-3, by - pws); sy <= by + pws + 1e-12; sy += ws)
                for (double rho = std::max(-g.rho_max, br - pwr);
                     rho <= std::min(g.rho_max, br + pwr) + 1e-12; rho += wr) {
                    const double v = objective(sx, sy, rho);
                    if (v < best) {
                        best = v;
                        bx = sx;
                        by = sy;
                        br = rho;
                    }
                }
    }
    return std::isinf(best) ? ExtReal::inf() : ExtReal(best);
}

}  // namespace relab

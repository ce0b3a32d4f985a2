#include "relab/wz.hpp"

#include <algorithm>
#include <cmath>

namespace relab {

namespace {
const double kInf = std::numeric_limits<double>::infinity();

double row_kl(const std::vector<double>& q, const std::vector<double>& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) {
            if (p[i] <= 0.0) return kInf;
            d += q[i] * std::log2(q[i] / p[i]);
        }
    }
    return std::max(0.0, d);
}
}  // namespace

DistortionTable::DistortionTable(int xs, int xh, std::vector<double> table)
    : x_size(xs), xhat_size(xh), d(std::move(table)) {
    if (static_cast<int>(d.size()) != xs * xh) throw std::invalid_argument("distortion table size");
    for (double v : d)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("distortion entries must be finite and >= 0");
}

double DistortionTable::max_entry() const { return *std::max_element(d.begin(), d.end()); }

ReproductionFn::ReproductionFn(int ys, int zs, int xh, std::vector<int> table)
    : y_size(ys), z_size(zs), xhat_size(xh), f(std::move(table)) {
    if (static_cast<int>(f.size()) != ys * zs) throw std::invalid_argument("reproduction table size");
    for (int v : f)
        if (v < 0 || v >= xh) throw std::invalid_argument("reproduction symbol out of range");
}

ExtReal g_d(const JointDist& q_xyz, const JointDist& p_xy, const CondDist& q_zx,
            const ReproductionFn& f, const DistortionTable& dist, double delta, double rate) {
    if (q_xyz.axes() != 3) throw std::invalid_argument("g_d expects a 3-axis joint");
    const int nx = q_xyz.axis_sizes[0], ny = q_xyz.axis_sizes[1], nz = q_xyz.axis_sizes[2];

    std::vector<double> qx(nx, 0.0), m_xz(nx * nz, 0.0), m_yz(ny * nz, 0.0), qy(ny, 0.0),
        qz(nz, 0.0);
    double e_d = 0.0;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                const double q = q_xyz.at3(x, y, z);
                qx[x] += q;
                qy[y] += q;
                qz[z] += q;
                m_xz[x * nz + z] += q;
                m_yz[y * nz + z] += q;
                e_d += q * dist(x, f(y, z));
            }
    for (int x = 0; x < nx; ++x) {
        if (qx[x] <= 0.0) continue;
        for (int z = 0; z < nz; ++z)
            if (std::abs(m_xz[x * nz + z] / qx[x] - q_zx(z, x)) > 1e-9)
                throw std::invalid_argument("q_xyz inconsistent with q_zx");
    }

    ExtReal div(0.0);
    for (int x = 0; x < nx && !div.is_inf(); ++x)
        for (int y = 0; y < ny && !div.is_inf(); ++y)
            for (int z = 0; z < nz; ++z) {
                const double q = q_xyz.at3(x, y, z);
                if (q <= 0.0) continue;
                const double ref = p_xy.at2(x, y) * q_zx(z, x);
                if (ref <= 0.0) { div = ExtReal::inf(); break; }
                div += ExtReal(q * std::log2(q / ref));
            }

    if (e_d >= delta) return div;

    double i_xz = 0.0, i_yz = 0.0;
    for (int x = 0; x < nx; ++x)
        for (int z = 0; z < nz; ++z) {
            const double q = m_xz[x * nz + z];
            if (q > 0.0) i_xz += q * std::log2(q / (qx[x] * qz[z]));
        }
    for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) {
            const double q = m_yz[y * nz + z];
            if (q > 0.0) i_yz += q * std::log2(q / (qy[y] * qz[z]));
        }
    if (i_xz >= rate) return div + ExtReal(std::max(0.0, rate - i_xz + i_yz));
    return ExtReal::inf();
}

namespace {

// Inner transportation-polytope problem of Thm 3: rows q_{Y|x,z} with the
// (X,Z) marginal fixed by the outer players and the Y marginal pinned to the
// target within 1/k.
struct CouplingCtx {
    int nx, ny, nz;
    std::vector<double> w;   // (x,z) cell weights
    std::vector<double> qz;  // fixed Z marginal
    const std::vector<std::vector<double>>* pygx;
    double d_x;  // D(Q_X || P_X)
    const std::vector<double>* qy_target;
    double marg_tol;
    std::vector<std::vector<double>> cost;  // cost[x*nz+z][y] = d(x, f(y,z))
    double i_xz;

    struct Eval {
        double marg_dev, e_d, div, i_yz;
    };

    Eval eval(const std::vector<std::vector<double>>& rows) const {
        Eval e{0.0, 0.0, d_x, 0.0};
        std::vector<double> ymarg(ny, 0.0), yz(ny * nz, 0.0);
        for (int x = 0; x < nx; ++x)
            for (int z = 0; z < nz; ++z) {
                const int c = x * nz + z;
                const double wc = w[c];
                if (wc <= 0.0) continue;
                for (int y = 0; y < ny; ++y) {
                    ymarg[y] += wc * rows[c][y];
                    yz[y * nz + z] += wc * rows[c][y];
                    e.e_d += wc * rows[c][y] * cost[c][y];
                }
                e.div += wc * row_kl(rows[c], (*pygx)[x]);
            }
        for (int y = 0; y < ny; ++y)
            e.marg_dev = std::max(e.marg_dev, std::abs(ymarg[y] - (*qy_target)[y]));
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                const double q = yz[y * nz + z];
                if (q > 0.0) e.i_yz += q * std::log2(q / (ymarg[y] * qz[z]));
            }
        e.i_yz = std::max(0.0, e.i_yz);
        return e;
    }
};

// Derivative-free local search: a feasibility-restoration pass followed by
// descent over feasible single-cell mass moves.
template <typename ViolFn, typename ValueFn>
double local_solve(std::vector<std::vector<double>>& rows, const CouplingCtx& ctx,
                   const ViolFn& viol, const ValueFn& value, const GridSpec& grid) {
    auto total_viol = [&](const std::vector<std::vector<double>>& r) { return viol(ctx.eval(r)); };

    double v = total_viol(rows);
    for (double step : {0.25, 0.1, 0.04, 0.015, 0.005, 0.002}) {
        if (v <= 0.0) break;
        for (int sweep = 0; sweep < 40 && v > 0.0; ++sweep) {
            bool changed = false;
            for (std::size_t c = 0; c < rows.size(); ++c) {
                if (ctx.w[c] <= 0.0) continue;
                auto& row = rows[c];
                for (int i = 0; i < ctx.ny; ++i)
                    for (int j = 0; j < ctx.ny; ++j) {
                        if (i == j) continue;
                        const double move = std::min(step, row[j]);
                        if (move < 1e-14) continue;
                        row[j] -= move;
                        row[i] += move;
                        const double nv = total_viol(rows);
                        if (nv < v - 1e-15) {
                            v = nv;
                            changed = true;
                        } else {
                            row[i] -= move;
                            row[j] += move;
                        }
                    }
            }
            if (!changed) break;
        }
    }
    if (v > 0.0) return kInf;

    auto feasible_value = [&](const std::vector<std::vector<double>>& r) {
        const auto e = ctx.eval(r);
        return viol(e) <= 0.0 ? value(e) : kInf;
    };
    double best = feasible_value(rows);
    double step = 0.25;
    for (int round = 0; round < grid.refine_rounds; ++round) {
        for (int sweep = 0; sweep < 40; ++sweep) {
            bool changed = false;
            for (std::size_t c = 0; c < rows.size(); ++c) {
                if (ctx.w[c] <= 0.0) continue;
                auto& row = rows[c];
                for (int i = 0; i < ctx.ny; ++i)
                    for (int j = 0; j < ctx.ny; ++j) {
                        if (i == j) continue;
                        const double move = std::min(step, row[j]);
                        if (move < 1e-14) continue;
                        row[j] -= move;
                        row[i] += move;
                        const double nv = feasible_value(rows);
                        if (nv < best - 1e-15) {
                            best = nv;
                            changed = true;
                        } else {
                            row[i] -= move;
                            row[j] += move;
                        }
                    }
            }
            if (!changed) break;
        }
        step *= grid.refine_shrink;
    }
    return best;
}

double inner_coupling_min(const CouplingCtx& ctx, const DistortionTable&, double delta,
                          double rate, const GridSpec& grid) {
    std::vector<std::vector<std::vector<double>>> seeds;
    seeds.emplace_back(ctx.nx * ctx.nz, *ctx.qy_target);  // exact Y marginal
    {
        std::vector<std::vector<double>> nominal(ctx.nx * ctx.nz);
        for (int x = 0; x < ctx.nx; ++x)
            for (int z = 0; z < ctx.nz; ++z) nominal[x * ctx.nz + z] = (*ctx.pygx)[x];
        seeds.push_back(std::move(nominal));
    }

    double best = kInf;
    // Distortion-violation branch: E d >= delta, pay the divergence.
    for (const auto& seed : seeds) {
        auto rows = seed;
        auto viol = [&](const CouplingCtx::Eval& e) {
            return std::max(0.0, e.marg_dev - ctx.marg_tol) + std::max(0.0, delta - e.e_d);
        };
        auto value = [](const CouplingCtx::Eval& e) { return e.div; };
        best = std::min(best, local_solve(rows, ctx, viol, value, grid));
    }
    // Binning-error branch: E d < delta and I(X;Z) >= R.
    if (ctx.i_xz >= rate) {
        for (const auto& seed : seeds) {
            auto rows = seed;
            auto viol = [&](const CouplingCtx::Eval& e) {
                return std::max(0.0, e.marg_dev - ctx.marg_tol) +
                       std::max(0.0, e.e_d - (delta - 1e-12));
            };
            auto value = [&](const CouplingCtx::Eval& e) {
                return e.div + std::max(0.0, rate - ctx.i_xz + e.i_yz);
            };
            best = std::min(best, local_solve(rows, ctx, viol, value, grid));
        }
    }
    return best;
}

}  // namespace

WzReport theta_lower(const WzProblem& prob, const GridSpec& grid) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    const int nz = prob.z_size > 0 ? prob.z_size : nx + 1;
    const int nxh = prob.xhat_size > 0 ? prob.xhat_size : prob.dist.xhat_size;
    if (ny * nz * std::log2(static_cast<double>(nxh)) > 12.0 + 1e-9)
        throw BudgetError("reproduction-function enumeration exceeds the 12-bit budget");

    auto [px, pygx_cd] = decompose(prob.p_xy, 0);
    std::vector<std::vector<double>> pygx;
    for (const auto& r : pygx_cd.rows) pygx.push_back(r.p);

    const auto qx_grid = enumerate_simplex(nx, grid.k_outer);
    const auto qy_grid = enumerate_simplex(ny, grid.k_outer);
    const auto row_choices = enumerate_simplex(nz, grid.k);

    // Full enumeration of f: Y x Z -> Xhat.
    std::vector<ReproductionFn> fs;
    {
        std::vector<int> tab(ny * nz, 0);
        while (true) {
            fs.emplace_back(ny, nz, nxh, tab);
            int a = ny * nz - 1;
            while (a >= 0 && ++tab[a] == nxh) tab[a--] = 0;
            if (a < 0) break;
        }
    }

    WzReport rep;
    rep.grid = grid;
    rep.value = ExtReal::inf();

    for (const auto& qx_fd : qx_grid) {
        const auto& qx = qx_fd.p;
        double d_x = 0.0;
        bool dead = false;
        for (int x = 0; x < nx; ++x) {
            if (qx[x] > 0.0) {
                if (px[x] <= 0.0) { dead = true; break; }
                d_x += qx[x] * std::log2(qx[x] / px[x]);
            }
        }
        if (dead) continue;

        double sup_w = -kInf;
        CondDist sup_w_witness;
        FiniteDist sup_qy_witness;
        ReproductionFn sup_f_witness;
        std::vector<int> ch_idx(nx, 0);
        bool ch_done = false;
        while (!ch_done) {
            CouplingCtx ctx;
            ctx.nx = nx;
            ctx.ny = ny;
            ctx.nz = nz;
            ctx.pygx = &pygx;
            ctx.d_x = d_x;
            ctx.marg_tol = 1.0 / grid.k;
            ctx.w.assign(nx * nz, 0.0);
            ctx.qz.assign(nz, 0.0);
            std::vector<std::vector<double>> w_rows;
            for (int x = 0; x < nx; ++x) {
                const auto& row = row_choices[ch_idx[x]].p;
                w_rows.push_back(row);
                for (int z = 0; z < nz; ++z) {
                    ctx.w[x * nz + z] = qx[x] * row[z];
                    ctx.qz[z] += qx[x] * row[z];
                }
            }
            ctx.i_xz = 0.0;
            for (int x = 0; x < nx; ++x)
                for (int z = 0; z < nz; ++z) {
                    const double q = ctx.w[x * nz + z];
                    if (q > 0.0) ctx.i_xz += q * std::log2(q / (qx[x] * ctx.qz[z]));
                }
            ctx.i_xz = std::max(0.0, ctx.i_xz);

            double inf_qy = kInf;
            FiniteDist inf_qy_w;
            ReproductionFn inf_f_w;
            for (const auto& qy_fd : qy_grid) {
                ctx.qy_target = &qy_fd.p;
                double sup_f = -kInf;
                ReproductionFn f_w;
                for (const auto& f : fs) {
                    ctx.cost.assign(nx * nz, std::vector<double>(ny));
                    for (int x = 0; x < nx; ++x)
                        for (int z = 0; z < nz; ++z)
                            for (int y = 0; y < ny; ++y)
                                ctx.cost[x * nz + z][y] = prob.dist(x, f(y, z));
                    const double v = inner_coupling_min(ctx, prob.dist, prob.delta, prob.rate, grid);
                    if (v > sup_f) {
                        sup_f = v;
                        f_w = f;
                    }
                    if (std::isinf(sup_f)) break;
                }
                if (sup_f < inf_qy) {
                    inf_qy = sup_f;
                    inf_qy_w = qy_fd;
                    inf_f_w = f_w;
                }
            }
            if (inf_qy > sup_w) {
                sup_w = inf_qy;
                std::vector<FiniteDist> wr;
                for (auto& r : w_rows) wr.emplace_back(r);
                sup_w_witness = CondDist(std::move(wr));
                sup_qy_witness = inf_qy_w;
                sup_f_witness = inf_f_w;
            }

            int a = nx - 1;
            while (a >= 0 && ++ch_idx[a] == static_cast<int>(row_choices.size())) ch_idx[a--] = 0;
            if (a < 0) ch_done = true;
        }
        if (sup_w < rep.value.v) {
            rep.value = ExtReal(sup_w);
            rep.q_x = qx_fd;
            rep.q_z_given_x = sup_w_witness;
            rep.q_y = sup_qy_witness;
            rep.f = sup_f_witness;
        }
    }
    return rep;
}

ExtReal marton_binary_hamming(const FiniteDist& p_x, double rate, double delta) {
    if (p_x.size() != 2) throw std::invalid_argument("binary source required");
    if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta in (0, 0.5) required");
    const double target = rate + binary_entropy(delta);
    if (target >= 1.0) return ExtReal::inf();
    const double pl = std::min(p_x[0], p_x[1]);
    if (binary_entropy(pl) > target) return ExtReal(0.0);
    double lo = pl, hi = 0.5;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (binary_entropy(mid) >= target ? hi : lo) = mid;
    }
    return ExtReal(binary_kl(hi, pl));
}

double rwz(const JointDist& q_xy, double delta, const DistortionTable& dist, int z_size,
           const GridSpec& grid) {
    const int nx = q_xy.axis_sizes[0], ny = q_xy.axis_sizes[1];
    const int nz = z_size > 0 ? z_size : nx + 1;
    const int nxh = dist.xhat_size;
    const auto row_choices = enumerate_simplex(nz, grid.k);
    const auto qx = marginal(q_xy, 0);
    const auto qy = marginal(q_xy, 1);

    double best = kInf;
    std::vector<int> ch_idx(nx, 0);
    bool done = false;
    while (!done) {
        // Joint (X,Y,Z) = Q_XY * Q_{Z|X}; the estimator is chosen greedily per
        // (y,z) cell, which minimizes E d without touching the objective.
        std::vector<double> qz(nz, 0.0), yz(ny * nz, 0.0), xz(nx * nz, 0.0);
        for (int x = 0; x < nx; ++x) {
            const auto& row = row_choices[ch_idx[x]].p;
            for (int z = 0; z < nz; ++z) {
                xz[x * nz + z] = qx[x] * row[z];
                qz[z] += qx[x] * row[z];
                for (int y = 0; y < ny; ++y) yz[y * nz + z] += q_xy.at2(x, y) * row[z];
            }
        }
        double e_d = 0.0;
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double cell_best = kInf;
                for (int xh = 0; xh < nxh; ++xh) {
                    double c = 0.0;
                    for (int x = 0; x < nx; ++x)
                        c += q_xy.at2(x, y) * row_choices[ch_idx[x]].p[z] * dist(x, xh);
                    cell_best = std::min(cell_best, c);
                }
                e_d += cell_best;
            }
        if (e_d <= delta + 1e-12) {
            double i_xz = 0.0, i_yz = 0.0;
            for (int x = 0; x < nx; ++x)
                for (int z = 0; z < nz; ++z) {
                    const double q = xz[x * nz + z];
                    if (q > 0.0) i_xz += q * std::log2(q / (qx[x] * qz[z]));
                }
            for (int y = 0; y < ny; ++y)
                for (int z = 0; z < nz; ++z) {
                    const double q = yz[y * nz + z];
                    if (q > 0.0) i_yz += q * std::log2(q / (qy[y] * qz[z]));
                }
            best = std::min(best, std::max(0.0, i_xz - i_yz));
        }
        int a = nx - 1;
        while (a >= 0 && ++ch_idx[a] == static_cast<int>(row_choices.size())) ch_idx[a--] = 0;
        if (a < 0) done = true;
    }
    return best;
}

ExtReal theta_upper(const WzProblem& prob, const GridSpec& grid) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    ExtReal best = ExtReal::inf();
    for (const auto& q : enumerate_simplex(nx * ny, grid.k_outer)) {
        JointDist qj({nx, ny}, q.p);
        if (rwz(qj, prob.delta, prob.dist, prob.z_size, grid) > prob.rate + grid.strict_eps) {
            const ExtReal d = kl_divergence_raw(q.p, prob.p_xy.p);
            best = ext_min(best, d);
        }
    }
    return best;
}

XiReport xi_exponents(const FunctionalProblem& prob, const GridSpec& grid, bool unconstrained) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    int nv = 0;
    for (int x = 0; x < nx; ++x) nv = std::max(nv, prob.g[x] + 1);

    auto h_g_given_y = [&](const std::vector<double>& q) {
        std::vector<double> vy(nv * ny, 0.0), ym(ny, 0.0);
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                vy[prob.g[x] * ny + y] += q[x * ny + y];
                ym[y] += q[x * ny + y];
            }
        return std::max(0.0, entropy(vy) - entropy(ym));
    };

    XiReport rep{ExtReal::inf(), ExtReal::inf()};
    std::vector<double> best_upper_q, best_lower_q;
    for (const auto& q : enumerate_simplex(nx * ny, grid.k_outer)) {
        const double hg = h_g_given_y(q.p);
        const ExtReal d = kl_divergence_raw(q.p, prob.p_xy.p);
        if (d.is_inf()) continue;
        if (hg >= prob.rate && d.v < rep.xi_upper.v) {
            rep.xi_upper = d;
            best_upper_q = q.p;
        }
        const double lower_cand =
            unconstrained ? d.v + std::max(0.0, prob.rate - hg)
                          : (hg >= prob.rate ? d.v + std::max(0.0, prob.rate - hg) : kInf);
        if (lower_cand < rep.xi_lower.v) {
            rep.xi_lower = ExtReal(lower_cand);
            best_lower_q = q.p;
        }
    }

    // The nominal law itself is the optimum whenever it meets the constraint.
    {
        const auto& q = prob.p_xy.p;
        const double hg = h_g_given_y(q);
        if (hg >= prob.rate && rep.xi_upper.v > 0.0) {
            rep.xi_upper = ExtReal(0.0);
            best_upper_q = q;
        }
        const double lower_cand = (unconstrained || hg >= prob.rate)
                                      ? std::max(0.0, prob.rate - hg)
                                      : kInf;
        if (lower_cand < rep.xi_lower.v) {
            rep.xi_lower = ExtReal(lower_cand);
            best_lower_q = q;
        }
    }

    // Refinement: the whole joint table is one simplex row.
    auto refine = [&](std::vector<double> seed, bool constrain, bool add_penalty) -> double {
        if (seed.empty()) return kInf;
        double best = kInf;
        auto value = [&](const std::vector<double>& q) {
            const double hg = h_g_given_y(q);
            if (constrain && hg < prob.rate) return kInf;
            const double d = row_kl(q, prob.p_xy.p);
            return add_penalty ? d + std::max(0.0, prob.rate - hg) : d;
        };
        best = value(seed);
        double step = 0.25;
        const int n = nx * ny;
        for (int round = 0; round < grid.refine_rounds; ++round) {
            for (int sweep = 0; sweep < 40; ++sweep) {
                bool changed = false;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (i == j) continue;
                        const double move = std::min(step, seed[j]);
                        if (move < 1e-14) continue;
                        seed[j] -= move;
                        seed[i] += move;
                        const double v = value(seed);
                        if (v < best - 1e-15) {
                            best = v;
                            changed = true;
                        } else {
                            seed[i] -= move;
                            seed[j] += move;
                        }
                    }
                if (!changed) break;
            }
            step *= grid.refine_shrink;
        }
        return best;
    };
    if (rep.xi_upper.finite())
        rep.xi_upper = ExtReal(std::min(rep.xi_upper.v, refine(best_upper_q, true, false)));
    if (rep.xi_lower.finite())
        rep.xi_lower = ExtReal(std::min(
            rep.xi_lower.v, refine(best_lower_q, !unconstrained, true)));
    return rep;
}

}  // namespace relab

#include "relab/sccsi.hpp"

#include <algorithm>
#include <cmath>

namespace relab {

int eta_upper_s_bound(int x_size, int y_size) { return x_size * y_size + y_size + 2; }

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

double channel_mi(const std::vector<double>& qy, const std::vector<std::vector<double>>& w) {
    const int ns = static_cast<int>(w[0].size());
    std::vector<double> qs(ns, 0.0);
    double hsy = 0.0;
    for (std::size_t y = 0; y < qy.size(); ++y) {
        if (qy[y] <= 0.0) continue;
        hsy += qy[y] * entropy(w[y]);
        for (int s = 0; s < ns; ++s) qs[s] += qy[y] * w[y][s];
    }
    return std::max(0.0, entropy(qs) - hsy);
}

// Shared predicates so eta_upper and eta_sp treat the strict R1/R2 comparisons
// identically (keeps the grid-level ordering eta_upper <= eta_sp structural).
bool rate2_ok(double mi, double r2) { return mi <= r2 + 1e-12; }
bool sp_violates(double hxs, double r1, double eps) { return hxs <= r1 + eps; }
bool upper_feasible(double hxs, double r1, double eps) { return hxs >= r1 + eps; }

// Enumerates product channels: one simplex row per input symbol.
struct ChannelIter {
    const std::vector<FiniteDist>& choices;
    std::vector<int> idx;
    bool done = false;
    ChannelIter(const std::vector<FiniteDist>& c, int inputs) : choices(c), idx(inputs, 0) {}
    std::vector<std::vector<double>> current() const {
        std::vector<std::vector<double>> w;
        w.reserve(idx.size());
        for (int i : idx) w.push_back(choices[i].p);
        return w;
    }
    void next() {
        for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
            if (++idx[a] < static_cast<int>(choices.size())) return;
            idx[a] = 0;
        }
        done = true;
    }
};

// Eq 3 inner problem: divergence + branch penalty over the per-cell rows
// q_{X|y,s}, constrained to H(Q_X) >= r1. Convex, so grid seeds plus
// coordinate descent converge to the global value up to the step floor.
struct LowerInner {
    int nx, ny, ns;
    double r1, c0, d_y;
    std::vector<double> w;  // cell weights q_y(y)*W(s|y), index y*ns+s
    const std::vector<std::vector<double>>* pxgy;

    double objective(const std::vector<std::vector<double>>& rows, bool* feasible) const {
        std::vector<double> qx(nx, 0.0);
        double div = d_y;
        for (int y = 0; y < ny; ++y)
            for (int s = 0; s < ns; ++s) {
                const double wc = w[y * ns + s];
                if (wc <= 0.0) continue;
                const auto& row = rows[y * ns + s];
                for (int x = 0; x < nx; ++x) qx[x] += wc * row[x];
                div += wc * row_kl(row, (*pxgy)[y]);
            }
        *feasible = entropy(qx) >= r1 - 1e-12;
        if (std::isinf(div)) return kInf;
        double hxs = 0.0;
        for (int s = 0; s < ns; ++s) {
            std::vector<double> qxs(nx, 0.0);
            double qs = 0.0;
            for (int y = 0; y < ny; ++y) {
                const double wc = w[y * ns + s];
                qs += wc;
                if (wc <= 0.0) continue;
                for (int x = 0; x < nx; ++x) qxs[x] += wc * rows[y * ns + s][x];
            }
            if (qs <= 0.0) continue;
            for (double& v : qxs) v /= qs;
            hxs += qs * entropy(qxs);
        }
        return div + std::max(0.0, c0 - hxs);
    }
};

template <typename Objective>
double coordinate_descent(std::vector<std::vector<double>>& rows, const Objective& obj,
                          const GridSpec& grid, double step0) {
    bool feasible = false;
    double best = obj(rows, &feasible);
    if (!feasible) best = kInf;
    double step = step0;
    for (int round = 0; round < grid.refine_rounds; ++round) {
        for (int sweep = 0; sweep < 50; ++sweep) {
            bool changed = false;
            for (std::size_t c = 0; c < rows.size(); ++c) {
                auto& row = rows[c];
                const int n = static_cast<int>(row.size());
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (i == j) continue;
                        const double move = std::min(step, row[j]);
                        if (move < 1e-14) continue;
                        row[j] -= move;
                        row[i] += move;
                        const double val = obj(rows, &feasible);
                        if (feasible && val < best - 1e-15) {
                            best = val;
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

}  // namespace

ExtReal eta_lower_objective(const SccsiProblem& prob, const std::vector<double>& q_y,
                            const std::vector<std::vector<double>>& w_s_given_y,
                            const std::vector<std::vector<double>>& q_x_given_ys) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    const int ns = static_cast<int>(w_s_given_y[0].size());
    auto [py, pxgy_cd] = decompose(prob.p_xy, 1);
    std::vector<std::vector<double>> pxgy;
    for (const auto& r : pxgy_cd.rows) pxgy.push_back(r.p);

    double d_y = 0.0;
    for (int y = 0; y < ny; ++y) {
        if (q_y[y] > 0.0) {
            if (py[y] <= 0.0) return ExtReal::inf();
            d_y += q_y[y] * std::log2(q_y[y] / py[y]);
        }
    }
    const double mi = channel_mi(q_y, w_s_given_y);
    LowerInner inner;
    inner.nx = nx;
    inner.ny = ny;
    inner.ns = ns;
    inner.r1 = prob.r1;
    inner.c0 = mi >= prob.r2 ? prob.r1 + prob.r2 - mi : prob.r1;
    inner.d_y = d_y;
    inner.pxgy = &pxgy;
    inner.w.assign(ny * ns, 0.0);
    for (int y = 0; y < ny; ++y)
        for (int s = 0; s < ns; ++s) inner.w[y * ns + s] = q_y[y] * w_s_given_y[y][s];
    bool feasible = false;
    auto rows = q_x_given_ys;
    const double val = inner.objective(rows, &feasible);
    return feasible ? ExtReal(val) : ExtReal::inf();
}

SccsiReport eta_lower(const SccsiProblem& prob, const GridSpec& grid) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    const int ns = std::max(1, prob.s_size);
    SccsiReport rep;
    rep.grid = grid;
    rep.value = ExtReal::inf();

    // App. A: with R1 at or above log2|X| the scheme never bins, so the
    // exponent is infinite.
    if (prob.r1 >= std::log2(static_cast<double>(nx)) - 1e-12) return rep;

    auto [py, pxgy_cd] = decompose(prob.p_xy, 1);
    std::vector<std::vector<double>> pxgy;
    for (const auto& r : pxgy_cd.rows) pxgy.push_back(r.p);

    const auto qy_grid = enumerate_simplex(ny, grid.k_outer);
    const auto row_choices = enumerate_simplex(ns, grid.k);
    const std::vector<double> unif(nx, 1.0 / nx);

    for (const auto& qy_fd : qy_grid) {
        const auto& qy = qy_fd.p;
        double d_y = 0.0;
        bool dead = false;
        for (int y = 0; y < ny; ++y) {
            if (qy[y] > 0.0) {
                if (py[y] <= 0.0) { dead = true; break; }
                d_y += qy[y] * std::log2(qy[y] / py[y]);
            }
        }
        if (dead) continue;  // infinite for every channel; never the infimum

        double worst = -kInf;
        std::vector<std::vector<double>> worst_w, worst_rows;
        for (ChannelIter it(row_choices, ny); !it.done; it.next()) {
            auto w = it.current();
            const double mi = channel_mi(qy, w);
            LowerInner inner;
            inner.nx = nx;
            inner.ny = ny;
            inner.ns = ns;
            inner.r1 = prob.r1;
            inner.c0 = mi >= prob.r2 ? prob.r1 + prob.r2 - mi : prob.r1;
            inner.d_y = d_y;
            inner.pxgy = &pxgy;
            inner.w.assign(ny * ns, 0.0);
            for (int y = 0; y < ny; ++y)
                for (int s = 0; s < ns; ++s) inner.w[y * ns + s] = qy[y] * w[y][s];

            // Seed on the feasibility boundary: mix P_{X|y} rows toward uniform
            // just far enough that H(Q_X) reaches r1.
            std::vector<double> qx0(nx, 0.0);
            for (int y = 0; y < ny; ++y)
                for (int s = 0; s < ns; ++s) {
                    const double wc = inner.w[y * ns + s];
                    for (int x = 0; x < nx; ++x) qx0[x] += wc * pxgy[y][x];
                }
            double t = 0.0;
            if (entropy(qx0) < prob.r1) {
                double lo = 0.0, hi = 1.0;
                for (int iter = 0; iter < 80; ++iter) {
                    const double mid = 0.5 * (lo + hi);
                    std::vector<double> qt(nx);
                    for (int x = 0; x < nx; ++x) qt[x] = (1.0 - mid) * qx0[x] + mid / nx;
                    (entropy(qt) >= prob.r1 ? hi : lo) = mid;
                }
                t = hi;
            }
            std::vector<std::vector<double>> rows(ny * ns, std::vector<double>(nx));
            for (int y = 0; y < ny; ++y)
                for (int s = 0; s < ns; ++s)
                    for (int x = 0; x < nx; ++x)
                        rows[y * ns + s][x] = (1.0 - t) * pxgy[y][x] + t / nx;

            auto obj = [&inner](const std::vector<std::vector<double>>& r, bool* f) {
                return inner.objective(r, f);
            };
            double val = coordinate_descent(rows, obj, grid, 0.25);

            // Second seed: all-uniform rows (always feasible below log2|X|).
            std::vector<std::vector<double>> rows_u(ny * ns, unif);
            const double val_u = coordinate_descent(rows_u, obj, grid, 0.25);
            if (val_u < val) {
                val = val_u;
                rows = rows_u;
            }

            if (val > worst) {
                worst = val;
                worst_w = w;
                worst_rows = rows;
            }
            if (std::isinf(worst)) break;
        }
        if (worst < rep.value.v) {
            rep.value = ExtReal(worst);
            rep.q_y = qy_fd;
            std::vector<FiniteDist> wr;
            for (auto& r : worst_w) wr.emplace_back(r);
            rep.q_s_given_y = CondDist(std::move(wr));
            rep.inner_rows = worst_rows;
            rep.refined = true;
        }
    }
    return rep;
}

namespace {

struct JointInfo {
    std::vector<double> qy;
    std::vector<std::vector<double>> rows;  // q_{X|y}
    double div;                             // D(Q_XY || P_XY), may be inf
    std::vector<int> ykey;                  // integer y-marginal counts at k_outer
};

std::vector<JointInfo> joint_grid_infos(const JointDist& p_xy, const GridSpec& grid) {
    const int nx = p_xy.axis_sizes[0], ny = p_xy.axis_sizes[1];
    std::vector<JointInfo> infos;
    for (const auto& q : enumerate_simplex(nx * ny, grid.k_outer)) {
        JointInfo ji;
        ji.qy.assign(ny, 0.0);
        ji.rows.assign(ny, std::vector<double>(nx, 1.0 / nx));
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) ji.qy[y] += q.p[x * ny + y];
        for (int y = 0; y < ny; ++y) {
            if (ji.qy[y] > 0.0)
                for (int x = 0; x < nx; ++x) ji.rows[y][x] = q.p[x * ny + y] / ji.qy[y];
        }
        ji.div = 0.0;
        for (int x = 0; x < nx && !std::isinf(ji.div); ++x)
            for (int y = 0; y < ny; ++y) {
                const double qv = q.p[x * ny + y];
                if (qv > 0.0) {
                    const double pv = p_xy.at2(x, y);
                    if (pv <= 0.0) { ji.div = kInf; break; }
                    ji.div += qv * std::log2(qv / pv);
                }
            }
        ji.ykey.resize(ny);
        for (int y = 0; y < ny; ++y)
            ji.ykey[y] = static_cast<int>(std::lround(ji.qy[y] * grid.k_outer));
        infos.push_back(std::move(ji));
    }
    return infos;
}

double markov_hxs(const std::vector<double>& qy, const std::vector<std::vector<double>>& w,
                  const std::vector<std::vector<double>>& qxgy) {
    const int ny = static_cast<int>(qy.size());
    const int ns = static_cast<int>(w[0].size());
    const int nx = static_cast<int>(qxgy[0].size());
    double hxs = 0.0;
    for (int s = 0; s < ns; ++s) {
        std::vector<double> qxs(nx, 0.0);
        double qs = 0.0;
        for (int y = 0; y < ny; ++y) {
            const double wc = qy[y] * w[y][s];
            qs += wc;
            if (wc <= 0.0) continue;
            for (int x = 0; x < nx; ++x) qxs[x] += wc * qxgy[y][x];
        }
        if (qs <= 0.0) continue;
        for (double& v : qxs) v /= qs;
        hxs += qs * entropy(qxs);
    }
    return hxs;
}

}  // namespace

SccsiReport eta_upper(const SccsiProblem& prob, const GridSpec& grid) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    for (double v : prob.p_xy.p)
        if (v <= 0.0) throw std::invalid_argument("eta_upper requires strictly positive P_XY");

    SccsiReport rep;
    rep.grid = grid;
    rep.value = ExtReal::inf();
    // H(X|S) <= log2|X|, so the inner constraint set is empty.
    if (prob.r1 >= std::log2(static_cast<double>(nx)) - 1e-12) return rep;

    const int ns = std::min(eta_upper_s_bound(nx, ny), std::max(1, prob.s_size));
    auto [py, pxgy_cd] = decompose(prob.p_xy, 1);
    std::vector<std::vector<double>> pxgy;
    for (const auto& r : pxgy_cd.rows) pxgy.push_back(r.p);

    const auto infos = joint_grid_infos(prob.p_xy, grid);
    const auto row_choices = enumerate_simplex(ns, grid.k);
    const double eps = grid.strict_eps;

    for (const auto& qy_fd : enumerate_simplex(ny, grid.k_outer)) {
        const auto& qy = qy_fd.p;
        std::vector<int> key(ny);
        for (int y = 0; y < ny; ++y) key[y] = static_cast<int>(std::lround(qy[y] * grid.k_outer));
        std::vector<const JointInfo*> bucket;
        for (const auto& ji : infos)
            if (ji.ykey == key) bucket.push_back(&ji);

        double d_y = 0.0;
        for (int y = 0; y < ny; ++y)
            if (qy[y] > 0.0) d_y += qy[y] * std::log2(qy[y] / py[y]);

        double worst = -kInf;
        std::vector<std::vector<double>> worst_w, worst_rows;
        for (ChannelIter it(row_choices, ny); !it.done; it.next()) {
            auto w = it.current();
            if (!rate2_ok(channel_mi(qy, w), prob.r2)) continue;

            double best = kInf;
            std::vector<std::vector<double>> best_rows;
            for (const JointInfo* ji : bucket) {
                if (std::isinf(ji->div)) continue;
                if (upper_feasible(markov_hxs(qy, w, ji->rows), prob.r1, eps) && ji->div < best) {
                    best = ji->div;
                    best_rows = ji->rows;
                }
            }
            // Feasibility-boundary seed, as in eta_lower.
            std::vector<double> qx0(nx, 0.0);
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) qx0[x] += qy[y] * pxgy[y][x];
            std::vector<std::vector<double>> seed(ny);
            double lo = 0.0, hi = 1.0;
            for (int iter = 0; iter < 80; ++iter) {
                const double mid = 0.5 * (lo + hi);
                std::vector<std::vector<double>> rows(ny, std::vector<double>(nx));
                for (int y = 0; y < ny; ++y)
                    for (int x = 0; x < nx; ++x) rows[y][x] = (1.0 - mid) * pxgy[y][x] + mid / nx;
                (upper_feasible(markov_hxs(qy, w, rows), prob.r1, eps) ? hi : lo) = mid;
            }
            seed.assign(ny, std::vector<double>(nx));
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) seed[y][x] = (1.0 - hi) * pxgy[y][x] + hi / nx;

            auto obj = [&](const std::vector<std::vector<double>>& rows, bool* f) {
                *f = upper_feasible(markov_hxs(qy, w, rows), prob.r1, eps);
                double div = d_y;
                for (int y = 0; y < ny; ++y) {
                    if (qy[y] <= 0.0) continue;
                    div += qy[y] * row_kl(rows[y], pxgy[y]);
                    if (std::isinf(div)) return kInf;
                }
                return div;
            };
            double val = best;
            std::vector<std::vector<double>> val_rows = best_rows.empty() ? seed : best_rows;
            for (auto start : {best_rows.empty() ? seed : best_rows, seed}) {
                const double v = coordinate_descent(start, obj, grid, 0.25);
                if (v < val) {
                    val = v;
                    val_rows = start;
                }
            }

            if (val > worst) {
                worst = val;
                worst_w = w;
                worst_rows = val_rows;
            }
            if (std::isinf(worst)) break;
        }
        if (worst < rep.value.v) {
            rep.value = ExtReal(worst);
            rep.q_y = qy_fd;
            std::vector<FiniteDist> wr;
            for (auto& r : worst_w) wr.emplace_back(r);
            rep.q_s_given_y = CondDist(std::move(wr));
            rep.inner_rows = worst_rows;
            rep.refined = true;
        }
    }
    return rep;
}

SpReport eta_sp(const SccsiProblem& prob, const GridSpec& grid) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    const int ns = std::min(eta_upper_s_bound(nx, ny), std::max(1, prob.s_size));

    SpReport rep;
    rep.grid = grid;
    rep.value = ExtReal::inf();
    const auto infos = joint_grid_infos(prob.p_xy, grid);
    const auto joints = enumerate_simplex(nx * ny, grid.k_outer);
    const auto row_choices = enumerate_simplex(ns, grid.k);
    const double eps = grid.strict_eps;

    for (std::size_t i = 0; i < infos.size(); ++i) {
        const auto& ji = infos[i];
        if (std::isinf(ji.div) || ji.div >= rep.value.v) continue;
        bool violated = false;
        for (ChannelIter it(row_choices, ny); !it.done && !violated; it.next()) {
            auto w = it.current();
            if (!rate2_ok(channel_mi(ji.qy, w), prob.r2)) continue;
            if (sp_violates(markov_hxs(ji.qy, w, ji.rows), prob.r1, eps)) violated = true;
        }
        if (!violated) {
            rep.value = ExtReal(ji.div);
            rep.q_xy = JointDist({nx, ny}, joints[i].p);
        }
    }
    return rep;
}

ExtReal point_to_point_exponent(const FiniteDist& p_x, double r1) {
    const int nx = p_x.size();
    const double hmax = std::log2(static_cast<double>(nx));
    if (r1 <= entropy(p_x)) return ExtReal(0.0);
    if (r1 > hmax + 1e-12) return ExtReal::inf();

    if (nx == 2) {
        const double pl = std::min(p_x[0], p_x[1]);
        double lo = pl, hi = 0.5;
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (binary_entropy(mid) >= r1 ? hi : lo) = mid;
        }
        return ExtReal(binary_kl(hi, pl));
    }

    // General alphabets: grid scan plus constrained coordinate refinement.
    double best = kInf;
    std::vector<double> best_q;
    for (const auto& q : enumerate_simplex(nx, 48)) {
        if (entropy(q.p) < r1) continue;
        const ExtReal d = kl_divergence(q, p_x);
        if (d.v < best) {
            best = d.v;
            best_q = q.p;
        }
    }
    if (best_q.empty()) best_q.assign(nx, 1.0 / nx);
    std::vector<std::vector<double>> rows{best_q};
    GridSpec g;
    g.refine_rounds = 18;
    auto obj = [&](const std::vector<std::vector<double>>& r, bool* f) {
        *f = entropy(r[0]) >= r1 - 1e-12;
        return row_kl(r[0], p_x.p);
    };
    return ExtReal(coordinate_descent(rows, obj, g, 0.25));
}

}  // namespace relab

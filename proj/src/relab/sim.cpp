#include "relab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace relab {

namespace {

std::string counts_key(const std::vector<int>& c) {
    std::string s;
    for (int v : c) {
        s += std::to_string(v);
        s += ',';
    }
    return s;
}

double unit_double(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

uint64_t binom(int a, int b) {
    if (b < 0 || b > a) return 0;
    uint64_t r = 1;
    b = std::min(b, a - b);
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

void check_budget(int n, const std::vector<int>& alphabet_sizes) {
    if (n < 1 || n > 16) throw BudgetError("blocklength outside [1, 16]");
    for (int a : alphabet_sizes)
        if (a < 1 || a > 3) throw BudgetError("alphabet size outside [1, 3]");
}

// Empirical joint entropy of two aligned sequences, in bits.
double pair_entropy(const std::vector<int>& a, const std::vector<int>& b, int na, int nb) {
    std::vector<double> c(na * nb, 0.0);
    const double inv = 1.0 / a.size();
    for (std::size_t i = 0; i < a.size(); ++i) c[a[i] * nb + b[i]] += inv;
    return entropy(c);
}

long long bin_count(int n, double rate) {
    return static_cast<long long>(std::ceil(std::exp2(n * rate) - 1e-9));
}

// Integer conditional type nearest to target * c_y (L1 rounding).
std::vector<int> nearest_conditional(const std::vector<double>& target, int cy) {
    const int ns = static_cast<int>(target.size());
    std::vector<int> row(ns, 0);
    std::vector<std::pair<double, int>> frac(ns);
    int total = 0;
    for (int s = 0; s < ns; ++s) {
        const double exact = target[s] * cy;
        row[s] = static_cast<int>(std::floor(exact));
        frac[s] = {exact - row[s], s};
        total += row[s];
    }
    std::sort(frac.begin(), frac.end(), std::greater<>());
    for (int i = 0; total < cy; ++i, ++total) row[frac[i].second]++;
    return row;
}

// All sequences whose pair type with `cond` equals the given per-symbol count
// rows. Empty result with ok=false means the class is larger than `cap`.
std::vector<std::vector<int>> conditional_class(const std::vector<int>& cond,
                                                const std::vector<std::vector<int>>& rows,
                                                int out_size, uint64_t cap, bool& ok) {
    const int nc = static_cast<int>(rows.size());
    uint64_t size = 1;
    for (const auto& r : rows) {
        int cy = 0;
        uint64_t m = 1, seen = 0;
        for (int v : r) {
            cy += v;
            for (int i = 1; i <= v; ++i) m = m * (seen + i) / i;
            seen += v;
        }
        (void)cy;
        size *= m;
        if (size > cap) {
            ok = false;
            return {};
        }
    }
    ok = true;

    std::vector<std::vector<int>> positions(nc);
    for (std::size_t i = 0; i < cond.size(); ++i) positions[cond[i]].push_back(i);
    std::vector<std::vector<std::vector<int>>> per_row(nc);
    for (int a = 0; a < nc; ++a) {
        std::vector<int> ms;
        for (int s = 0; s < out_size; ++s) ms.insert(ms.end(), rows[a][s], s);
        if (ms.empty()) {
            per_row[a].push_back({});
            continue;
        }
        std::sort(ms.begin(), ms.end());
        do {
            per_row[a].push_back(ms);
        } while (std::next_permutation(ms.begin(), ms.end()));
    }
    std::vector<std::vector<int>> out;
    std::vector<std::size_t> idx(nc, 0);
    while (true) {
        std::vector<int> seq(cond.size(), 0);
        for (int a = 0; a < nc; ++a)
            for (std::size_t i = 0; i < positions[a].size(); ++i)
                seq[positions[a][i]] = per_row[a][idx[a]][i];
        out.push_back(std::move(seq));
        int a = nc - 1;
        while (a >= 0 && ++idx[a] == per_row[a].size()) idx[a--] = 0;
        if (a < 0) break;
    }
    return out;
}

bool pair_type_matches(const std::vector<int>& cond, const std::vector<int>& seq,
                       const std::vector<std::vector<int>>& rows, int out_size) {
    std::vector<int> c(rows.size() * out_size, 0);
    for (std::size_t i = 0; i < cond.size(); ++i) c[cond[i] * out_size + seq[i]]++;
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (int s = 0; s < out_size; ++s)
            if (c[a * out_size + s] != rows[a][s]) return false;
    return true;
}

// Codeword indices whose pair type with `cond` matches `rows`: enumerate the
// conditional class when small, otherwise scan the codebook.
std::vector<int> matched_codewords(const std::vector<int>& cond,
                                   const std::vector<std::vector<int>>& rows, int out_size,
                                   const std::vector<std::vector<int>>& codebook,
                                   const std::map<std::vector<int>, std::vector<int>>& index) {
    bool ok = false;
    const auto cls = conditional_class(cond, rows, out_size, 4096, ok);
    std::vector<int> matches;
    if (ok) {
        for (const auto& seq : cls) {
            auto it = index.find(seq);
            if (it != index.end())
                matches.insert(matches.end(), it->second.begin(), it->second.end());
        }
        std::sort(matches.begin(), matches.end());
    } else {
        for (std::size_t i = 0; i < codebook.size(); ++i)
            if (pair_type_matches(cond, codebook[i], rows, out_size))
                matches.push_back(static_cast<int>(i));
    }
    return matches;
}

}  // namespace

uint64_t derive_seed(uint64_t master, const std::string& label, uint64_t index) {
    uint64_t h = 1469598103934665603ULL ^ master;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= index;
    h *= 1099511628211ULL;
    h += 0x9e3779b97f4a7c15ULL;
    uint64_t z = h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::pair<double, double> wilson_ci(long long errors, long long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double t = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / t;
    const double denom = 1.0 + z * z / t;
    const double center = (p + z * z / (2.0 * t)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / t + z * z / (4.0 * t * t)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<int> sequence_counts(const std::vector<int>& seq, int alphabet) {
    std::vector<int> c(alphabet, 0);
    for (int v : seq) {
        if (v < 0 || v >= alphabet) throw std::invalid_argument("symbol out of range");
        c[v]++;
    }
    return c;
}

uint64_t type_class_size(const std::vector<int>& counts) {
    uint64_t r = 1;
    int n = 0;
    for (int c : counts) {
        n += c;
        r *= binom(n, c);
    }
    return r;
}

uint64_t type_class_rank(const std::vector<int>& seq, int alphabet) {
    std::vector<int> counts = sequence_counts(seq, alphabet);
    uint64_t rank = 0;
    for (int v : seq) {
        for (int a = 0; a < v; ++a) {
            if (counts[a] == 0) continue;
            counts[a]--;
            rank += type_class_size(counts);
            counts[a]++;
        }
        counts[v]--;
    }
    return rank;
}

std::vector<std::vector<int>> enumerate_type_class(const std::vector<int>& counts,
                                                   uint64_t guard) {
    if (type_class_size(counts) > guard) throw BudgetError("type class larger than guard");
    std::vector<int> seq;
    for (std::size_t a = 0; a < counts.size(); ++a) seq.insert(seq.end(), counts[a], a);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));
    return out;
}

std::vector<int> sample_type_class(const std::vector<int>& counts, std::mt19937_64& rng) {
    std::vector<int> seq;
    for (std::size_t a = 0; a < counts.size(); ++a) seq.insert(seq.end(), counts[a], a);
    for (std::size_t i = seq.size(); i > 1; --i)
        std::swap(seq[i - 1], seq[rng() % i]);
    return seq;
}

std::pair<std::vector<int>, std::vector<int>> SimSource::sample(int n,
                                                                std::mt19937_64& rng) const {
    const int nx = p_xy.axis_sizes[0], ny = p_xy.axis_sizes[1];
    std::vector<int> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        double u = unit_double(rng);
        int cell = 0;
        for (; cell < nx * ny - 1; ++cell) {
            u -= p_xy.p[cell];
            if (u < 0.0) break;
        }
        xs[i] = cell / ny;
        ys[i] = cell % ny;
    }
    return {xs, ys};
}

SccsiCode build_sccsi_code(const SccsiProblem& prob, int n, uint64_t master_seed,
                           const STarget& target) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    const int ns = prob.s_size;
    check_budget(n, {nx, ny, ns});

    SccsiCode code;
    code.prob = prob;
    code.n = n;
    code.master = master_seed;
    code.u1_bins = bin_count(n, prob.r1);
    code.u2_bins = bin_count(n, prob.r2);

    STarget tgt = target;
    if (!tgt) tgt = [ns](int) { return std::vector<double>(ns, 1.0 / ns); };

    // One helper code per y-type, built eagerly and deterministically.
    std::vector<int> c(ny, 0);
    c[0] = n;
    while (true) {
        SccsiCode::HelperCode h;
        h.w_counts.resize(ny);
        std::vector<double> joint(ny * ns, 0.0);
        std::vector<int> s_counts(ns, 0);
        for (int y = 0; y < ny; ++y) {
            h.w_counts[y] = c[y] > 0 ? nearest_conditional(tgt(y), c[y]) : std::vector<int>(ns, 0);
            for (int s = 0; s < ns; ++s) {
                joint[y * ns + s] = static_cast<double>(h.w_counts[y][s]) / n;
                s_counts[s] += h.w_counts[y][s];
            }
        }
        h.i_ys_bits = mutual_information(JointDist({ny, ns}, joint));
        h.m = static_cast<long long>(
            std::ceil(std::exp2(n * h.i_ys_bits) + (ny * ns + 3) * std::log2(n + 1.0)));
        if (h.m > 2000000) throw BudgetError("codebook size exceeds guard");

        const std::string key = counts_key(c);
        std::mt19937_64 rng(derive_seed(master_seed, "codebook|" + key, 0));
        for (long long i = 0; i < h.m; ++i) h.codebook.push_back(sample_type_class(s_counts, rng));
        h.u2.resize(h.m);
        const bool inj = h.m <= code.u2_bins;
        for (long long i = 0; i < h.m; ++i)
            h.u2[i] = inj ? i
                          : static_cast<long long>(derive_seed(master_seed, "u2|" + key, i) %
                                                   static_cast<uint64_t>(code.u2_bins));
        for (long long i = 0; i < h.m; ++i) {
            h.index[h.codebook[i]].push_back(static_cast<int>(i));
            h.bin_members[h.u2[i]].push_back(static_cast<int>(i));
        }
        code.helpers.emplace(c, std::move(h));

        // next composition of n into ny parts
        int i = ny - 2;
        while (i >= 0 && c[i] == 0) --i;
        if (i < 0) break;
        c[i]--;
        int rest = c[ny - 1] + 1;
        c[ny - 1] = 0;
        c[i + 1] = rest;
    }
    return code;
}

namespace {

long long u1_value(const SccsiCode& code, const std::vector<int>& counts, uint64_t rank) {
    if (type_class_size(counts) <= static_cast<uint64_t>(code.u1_bins))
        return static_cast<long long>(rank);
    return static_cast<long long>(derive_seed(code.master, "u1|" + counts_key(counts), rank) %
                                  static_cast<uint64_t>(code.u1_bins));
}

const std::vector<std::vector<std::vector<int>>>& x_bin_lists(const SccsiCode& code,
                                                              const std::vector<int>& counts) {
    auto it = code.x_bins.find(counts);
    if (it != code.x_bins.end()) return it->second;
    const auto members = enumerate_type_class(counts);  // lexicographic = rank order
    const long long nbins =
        std::min<long long>(code.u1_bins, static_cast<long long>(members.size()));
    std::vector<std::vector<std::vector<int>>> lists(
        type_class_size(counts) <= static_cast<uint64_t>(code.u1_bins) ? members.size()
                                                                       : code.u1_bins);
    (void)nbins;
    for (uint64_t r = 0; r < members.size(); ++r)
        lists[u1_value(code, counts, r)].push_back(members[r]);
    return code.x_bins.emplace(counts, std::move(lists)).first->second;
}

}  // namespace

RoundResult sccsi_round(const SccsiCode& code, const std::vector<int>& x,
                        const std::vector<int>& y, uint64_t trial_seed) {
    const int nx = code.prob.p_xy.axis_sizes[0], ny = code.prob.p_xy.axis_sizes[1];
    const int ns = code.prob.s_size;
    std::mt19937_64 rng(trial_seed);

    // encoder 1
    const auto cx = sequence_counts(x, nx);
    const long long i = u1_value(code, cx, type_class_rank(x, nx));

    // encoder 2: quantize y inside the conditional type class
    const auto cy = sequence_counts(y, ny);
    const auto& helper = code.helpers.at(cy);
    const auto matches = matched_codewords(y, helper.w_counts, ns, helper.codebook, helper.index);
    int s_idx;
    if (!matches.empty())
        s_idx = matches[rng() % matches.size()];
    else
        s_idx = static_cast<int>(rng() % helper.codebook.size());
    const long long j = helper.u2[s_idx];

    // decoder: minimum joint empirical entropy over the two bins
    const auto& xlists = x_bin_lists(code, cx);
    const auto& xcands = xlists[i];
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<const std::vector<int>*, int>> ties;
    static const std::vector<int> kEmpty;
    auto bin_it = helper.bin_members.find(j);
    const auto& bin = bin_it != helper.bin_members.end() ? bin_it->second : kEmpty;
    for (int k : bin) {
        for (const auto& xc : xcands) {
            const double h = pair_entropy(xc, helper.codebook[k], nx, ns);
            if (h < best - 1e-12) {
                best = h;
                ties.clear();
                ties.emplace_back(&xc, static_cast<int>(k));
            } else if (h <= best + 1e-12) {
                ties.emplace_back(&xc, static_cast<int>(k));
            }
        }
    }
    RoundResult res;
    if (ties.empty()) {
        res.error = true;
        return res;
    }
    const auto& pick = ties[rng() % ties.size()];
    res.x_hat = *pick.first;
    res.error = res.x_hat != x;
    return res;
}

std::vector<TrialStats> run_sccsi_trials(const SccsiProblem& prob, const std::vector<int>& ns,
                                         long long trials, uint64_t master_seed,
                                         const STarget& target) {
    SimSource src{prob.p_xy};
    std::vector<TrialStats> out;
    for (int n : ns) {
        const SccsiCode code =
            build_sccsi_code(prob, n, derive_seed(master_seed, "code", n), target);
        TrialStats st;
        st.n = n;
        st.trials = trials;
        const std::string label = "trial|n=" + std::to_string(n);
        for (long long t = 0; t < trials; ++t) {
            std::mt19937_64 rng(derive_seed(master_seed, label, t));
            auto [x, y] = src.sample(n, rng);
            if (sccsi_round(code, x, y, derive_seed(master_seed, "round|" + std::to_string(n), t))
                    .error)
                st.errors++;
        }
        st.p_hat = static_cast<double>(st.errors) / trials;
        std::tie(st.ci_lo, st.ci_hi) = wilson_ci(st.errors, trials);
        out.push_back(st);
    }
    return out;
}

WzCode build_wz_code(const WzProblem& prob, const ReproductionFn& f, int n, uint64_t master_seed,
                     const ZTarget& target) {
    const int nx = prob.p_xy.axis_sizes[0], ny = prob.p_xy.axis_sizes[1];
    const int nz = prob.z_size > 0 ? prob.z_size : nx + 1;
    check_budget(n, {nx, ny, nz});
    if (!target) throw std::invalid_argument("quantizer target required");

    WzCode code;
    code.prob = prob;
    code.f = f;
    code.n = n;
    code.master = master_seed;
    code.u_bins = bin_count(n, prob.rate);

    std::vector<int> c(nx, 0);
    c[0] = n;
    while (true) {
        WzCode::QuantCode q;
        q.w_counts.resize(nx);
        std::vector<double> joint(nx * nz, 0.0);
        std::vector<int> z_counts(nz, 0);
        for (int x = 0; x < nx; ++x) {
            q.w_counts[x] = c[x] > 0 ? nearest_conditional(target(x), c[x]) : std::vector<int>(nz, 0);
            for (int z = 0; z < nz; ++z) {
                joint[x * nz + z] = static_cast<double>(q.w_counts[x][z]) / n;
                z_counts[z] += q.w_counts[x][z];
            }
        }
        q.i_xz_bits = mutual_information(JointDist({nx, nz}, joint));
        q.m = static_cast<long long>(
            std::ceil(std::exp2(n * q.i_xz_bits) + (nx * nz + 3) * std::log2(n + 1.0)));
        if (q.m > 2000000) throw BudgetError("codebook size exceeds guard");

        const std::string key = counts_key(c);
        std::mt19937_64 rng(derive_seed(master_seed, "wz-codebook|" + key, 0));
        for (long long i = 0; i < q.m; ++i) q.codebook.push_back(sample_type_class(z_counts, rng));
        q.u.resize(q.m);
        const bool inj = q.m <= code.u_bins;
        for (long long i = 0; i < q.m; ++i)
            q.u[i] = inj ? i
                         : static_cast<long long>(derive_seed(master_seed, "wz-u|" + key, i) %
                                                  static_cast<uint64_t>(code.u_bins));
        for (long long i = 0; i < q.m; ++i) {
            q.index[q.codebook[i]].push_back(static_cast<int>(i));
            q.bin_members[q.u[i]].push_back(static_cast<int>(i));
        }
        code.quantizers.emplace(c, std::move(q));

        int i = nx - 2;
        while (i >= 0 && c[i] == 0) --i;
        if (i < 0) break;
        c[i]--;
        int rest = c[nx - 1] + 1;
        c[nx - 1] = 0;
        c[i + 1] = rest;
    }
    return code;
}

WzRound wz_round(const WzCode& code, const std::vector<int>& x, const std::vector<int>& y,
                 uint64_t trial_seed) {
    const int nx = code.prob.p_xy.axis_sizes[0], ny = code.prob.p_xy.axis_sizes[1];
    const int nz = code.prob.z_size > 0 ? code.prob.z_size : nx + 1;
    std::mt19937_64 rng(trial_seed);

    const auto cx = sequence_counts(x, nx);
    const auto& quant = code.quantizers.at(cx);
    const auto matches = matched_codewords(x, quant.w_counts, nz, quant.codebook, quant.index);
    int z_idx;
    if (!matches.empty())
        z_idx = matches[rng() % matches.size()];
    else
        z_idx = static_cast<int>(rng() % quant.codebook.size());
    const long long u = quant.u[z_idx];

    // decoder: minimum H(z|y) over the bin; H(y) is common, so minimize H(z, y)
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> ties;
    static const std::vector<int> kEmpty;
    auto bin_it = quant.bin_members.find(u);
    const auto& bin = bin_it != quant.bin_members.end() ? bin_it->second : kEmpty;
    for (int k : bin) {
        const double h = pair_entropy(quant.codebook[k], y, nz, ny);
        if (h < best - 1e-12) {
            best = h;
            ties.assign(1, static_cast<int>(k));
        } else if (h <= best + 1e-12) {
            ties.push_back(static_cast<int>(k));
        }
    }
    const auto& zhat = quant.codebook[ties[rng() % ties.size()]];
    WzRound res;
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += code.prob.dist(x[i], code.f(y[i], zhat[i]));
    res.avg_distortion = total / x.size();
    res.violation = res.avg_distortion > code.prob.delta;
    return res;
}

std::vector<TrialStats> run_wz_trials(const WzProblem& prob, const ReproductionFn& f,
                                      const std::vector<int>& ns, long long trials,
                                      uint64_t master_seed, const ZTarget& target) {
    SimSource src{prob.p_xy};
    std::vector<TrialStats> out;
    for (int n : ns) {
        const WzCode code = build_wz_code(prob, f, n, derive_seed(master_seed, "code", n), target);
        TrialStats st;
        st.n = n;
        st.trials = trials;
        const std::string label = "trial|n=" + std::to_string(n);
        for (long long t = 0; t < trials; ++t) {
            std::mt19937_64 rng(derive_seed(master_seed, label, t));
            auto [x, y] = src.sample(n, rng);
            if (wz_round(code, x, y, derive_seed(master_seed, "round|" + std::to_string(n), t))
                    .violation)
                st.errors++;
        }
        st.p_hat = static_cast<double>(st.errors) / trials;
        std::tie(st.ci_lo, st.ci_hi) = wilson_ci(st.errors, trials);
        out.push_back(st);
    }
    return out;
}

ExponentFit empirical_exponent(const std::vector<TrialStats>& stats) {
    ExponentFit fit;
    std::vector<double> xs, ys;
    for (const auto& s : stats) {
        double p = s.p_hat;
        if (s.errors == 0) {
            p = 0.5 / s.trials;
            fit.floored = true;
        }
        xs.push_back(s.n);
        ys.push_back(-std::log(p));
    }
    const std::size_t m = xs.size();
    if (m < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = m * sxx - sx * sx;
    fit.slope_nats = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope_nats * sx) / m;
    return fit;
}

}  // namespace relab

#include "relab/core.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace relab {

namespace {
constexpr double kMassTol = 1e-12;

void check_mass(const std::vector<double>& p) {
    double sum = 0.0;
    for (double x : p) {
        if (x < 0.0) throw std::invalid_argument("negative probability entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");
}
}  // namespace

FiniteDist::FiniteDist(std::vector<double> probs) : p(std::move(probs)) {
    if (p.empty()) throw std::invalid_argument("empty distribution");
    check_mass(p);
}

JointDist::JointDist(std::vector<int> sizes, std::vector<double> probs)
    : axis_sizes(std::move(sizes)), p(std::move(probs)) {
    if (axis_sizes.size() < 2 || axis_sizes.size() > 3)
        throw std::invalid_argument("joint tables have 2 or 3 axes");
    std::size_t n = 1;
    for (int s : axis_sizes) {
        if (s < 1) throw std::invalid_argument("axis size < 1");
        n *= static_cast<std::size_t>(s);
    }
    if (p.size() != n) throw std::invalid_argument("table size mismatch");
    check_mass(p);
}

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

double entropy(const FiniteDist& d) { return entropy(d.p); }

ExtReal kl_divergence_raw(const std::vector<double>& q, const std::vector<double>& p) {
    if (q.size() != p.size()) throw std::invalid_argument("alphabet mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) {
            if (p[i] <= 0.0) return ExtReal::inf();
            d += q[i] * std::log2(q[i] / p[i]);
        }
    }
    return ExtReal(std::max(0.0, d));
}

ExtReal kl_divergence(const FiniteDist& q, const FiniteDist& p) {
    return kl_divergence_raw(q.p, p.p);
}

double binary_entropy(double q) {
    double h = 0.0;
    if (q > 0.0) h -= q * std::log2(q);
    if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
    return h;
}

double binary_kl(double q, double p) {
    double d = 0.0;
    if (q > 0.0) d += q * std::log2(q / p);
    if (q < 1.0) d += (1.0 - q) * std::log2((1.0 - q) / (1.0 - p));
    return d;
}

JointDist compose(const FiniteDist& p, const CondDist& v) {
    if (p.size() != v.input_size()) throw std::invalid_argument("compose size mismatch");
    const int nx = p.size(), ny = v.output_size();
    std::vector<double> table(static_cast<std::size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) table[x * ny + y] = p[x] * v(y, x);
    return JointDist({nx, ny}, std::move(table));
}

FiniteDist marginal(const JointDist& j, int axis) {
    std::vector<double> m(j.axis_sizes[axis], 0.0);
    std::vector<int> idx(j.axes(), 0);
    for (std::size_t flat = 0; flat < j.p.size(); ++flat) {
        m[idx[axis]] += j.p[flat];
        for (int a = j.axes() - 1; a >= 0; --a) {
            if (++idx[a] < j.axis_sizes[a]) break;
            idx[a] = 0;
        }
    }
    for (double& x : m) x = std::max(0.0, std::min(1.0, x));
    double s = std::accumulate(m.begin(), m.end(), 0.0);
    for (double& x : m) x /= s;
    return FiniteDist(std::move(m));
}

std::pair<FiniteDist, CondDist> decompose(const JointDist& j, int axis) {
    const int na = j.axis_sizes[axis];
    int rest = 1;
    for (int a = 0; a < j.axes(); ++a)
        if (a != axis) rest *= j.axis_sizes[a];

    std::vector<double> marg(na, 0.0);
    std::vector<std::vector<double>> rows(na, std::vector<double>(rest, 0.0));
    std::vector<int> idx(j.axes(), 0);
    for (std::size_t flat = 0; flat < j.p.size(); ++flat) {
        int r = 0;
        for (int a = 0; a < j.axes(); ++a)
            if (a != axis) r = r * j.axis_sizes[a] + idx[a];
        marg[idx[axis]] += j.p[flat];
        rows[idx[axis]][r] += j.p[flat];
        for (int a = j.axes() - 1; a >= 0; --a) {
            if (++idx[a] < j.axis_sizes[a]) break;
            idx[a] = 0;
        }
    }
    std::vector<FiniteDist> cond;
    cond.reserve(na);
    for (int i = 0; i < na; ++i) {
        if (marg[i] > 0.0) {
            for (double& x : rows[i]) x /= marg[i];
        } else {
            std::fill(rows[i].begin(), rows[i].end(), 1.0 / rest);
        }
        double s = std::accumulate(rows[i].begin(), rows[i].end(), 0.0);
        for (double& x : rows[i]) x /= s;
        cond.emplace_back(std::move(rows[i]));
    }
    double s = std::accumulate(marg.begin(), marg.end(), 0.0);
    for (double& x : marg) x /= s;
    return {FiniteDist(std::move(marg)), CondDist(std::move(cond))};
}

double joint_entropy(const JointDist& j) { return entropy(j.p); }

double mutual_information(const JointDist& j) {
    if (j.axes() != 2) throw std::invalid_argument("mutual_information needs 2 axes");
    return std::max(0.0, entropy(marginal(j, 0)) + entropy(marginal(j, 1)) - joint_entropy(j));
}

namespace {
double subset_entropy(const JointDist& j, const std::vector<int>& axes) {
    if (axes.empty()) return 0.0;
    int cells = 1;
    for (int a : axes) cells *= j.axis_sizes[a];
    std::vector<double> m(cells, 0.0);
    std::vector<int> idx(j.axes(), 0);
    for (std::size_t flat = 0; flat < j.p.size(); ++flat) {
        int r = 0;
        for (int a : axes) r = r * j.axis_sizes[a] + idx[a];
        m[r] += j.p[flat];
        for (int a = j.axes() - 1; a >= 0; --a) {
            if (++idx[a] < j.axis_sizes[a]) break;
            idx[a] = 0;
        }
    }
    return entropy(m);
}
}  // namespace

double conditional_entropy(const JointDist& j, int target, const std::vector<int>& given) {
    for (int g : given)
        if (g == target) throw std::invalid_argument("target axis appears in conditioning set");
    std::vector<int> both = given;
    both.push_back(target);
    std::sort(both.begin(), both.end());
    return std::max(0.0, subset_entropy(j, both) - subset_entropy(j, given));
}

std::vector<FiniteDist> enumerate_simplex(int size, int k) {
    if (size < 1 || k < 1) throw std::invalid_argument("enumerate_simplex: size, k >= 1");
    std::vector<FiniteDist> out;
    std::vector<int> comp(size, 0);
    // Lexicographic walk over integer compositions of k into `size` parts.
    std::vector<int> stack;
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == size - 1) {
            comp[pos] = remaining;
            std::vector<double> p(size);
            for (int i = 0; i < size; ++i) p[i] = static_cast<double>(comp[i]) / k;
            out.emplace_back(std::move(p));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            comp[pos] = c;
            rec(pos + 1, remaining - c);
        }
    };
    rec(0, k);
    return out;
}

JointDist empirical_joint_type(const std::vector<std::vector<int>>& sequences,
                               const std::vector<int>& alphabet_sizes) {
    if (sequences.empty() || sequences.size() != alphabet_sizes.size())
        throw std::invalid_argument("empirical_joint_type: sequence/alphabet mismatch");
    const std::size_t n = sequences[0].size();
    if (n == 0) throw std::invalid_argument("empty sequences");
    for (const auto& s : sequences)
        if (s.size() != n) throw std::invalid_argument("length mismatch");

    int cells = 1;
    for (int s : alphabet_sizes) cells *= s;
    std::vector<double> table(cells, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        int r = 0;
        for (std::size_t a = 0; a < sequences.size(); ++a) {
            int sym = sequences[a][i];
            if (sym < 0 || sym >= alphabet_sizes[a]) throw std::invalid_argument("symbol out of range");
            r = r * alphabet_sizes[a] + sym;
        }
        table[r] += 1.0 / static_cast<double>(n);
    }
    return JointDist(alphabet_sizes, std::move(table));
}

}  // namespace relab

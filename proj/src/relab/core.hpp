#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Finite-alphabet probability containers and information measures.
// Discrete quantities are in bits throughout; the gaussian module works in nats.

namespace relab {

// Extended real: a finite exponent value or +infinity (infeasible / error-free branch).
struct ExtReal {
    double v = 0.0;

    ExtReal() = default;
    ExtReal(double x) : v(x) {}

    static ExtReal inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
    bool is_inf() const { return std::isinf(v); }
    bool finite() const { return std::isfinite(v); }

    ExtReal operator+(const ExtReal& o) const { return ExtReal(v + o.v); }
    ExtReal& operator+=(const ExtReal& o) { v += o.v; return *this; }
    bool operator<(const ExtReal& o) const { return v < o.v; }
    bool operator<=(const ExtReal& o) const { return v <= o.v; }
    bool operator==(const ExtReal& o) const { return v == o.v; }
};

// Thrown when an enumeration would exceed a configured budget guard.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline ExtReal ext_min(ExtReal a, ExtReal b) { return a.v <= b.v ? a : b; }
inline ExtReal ext_max(ExtReal a, ExtReal b) { return a.v >= b.v ? a : b; }

struct FiniteDist {
    std::vector<double> p;

    FiniteDist() = default;
    explicit FiniteDist(std::vector<double> probs);

    int size() const { return static_cast<int>(p.size()); }
    double operator[](int i) const { return p[i]; }
};

struct CondDist {
    std::vector<FiniteDist> rows;

    CondDist() = default;
    explicit CondDist(std::vector<FiniteDist> r) : rows(std::move(r)) {}

    int input_size() const { return static_cast<int>(rows.size()); }
    int output_size() const { return rows.empty() ? 0 : rows[0].size(); }
    double operator()(int out, int in) const { return rows[in][out]; }
};

// Dense joint table over 2 or 3 axes, row-major.
struct JointDist {
    std::vector<int> axis_sizes;
    std::vector<double> p;

    JointDist() = default;
    JointDist(std::vector<int> sizes, std::vector<double> probs);

    int axes() const { return static_cast<int>(axis_sizes.size()); }
    double at2(int i, int j) const { return p[i * axis_sizes[1] + j]; }
    double at3(int i, int j, int k) const {
        return p[(i * axis_sizes[1] + j) * axis_sizes[2] + k];
    }
};

// Discretization resolution and refinement budget for the nested optimizations.
// k: denominator for conditional-row grids; k_outer: denominator for outer marginals.
struct GridSpec {
    int k = 8;
    int k_outer = 16;
    int refine_rounds = 14;
    double refine_shrink = 0.5;
    double strict_eps = 1e-9;
};

// All entropies/divergences in bits. 0*log 0 = 0 by continuity.
double entropy(const std::vector<double>& p);
double entropy(const FiniteDist& d);
ExtReal kl_divergence(const FiniteDist& q, const FiniteDist& p);
ExtReal kl_divergence_raw(const std::vector<double>& q, const std::vector<double>& p);
double binary_entropy(double q);
double binary_kl(double q, double p);

JointDist compose(const FiniteDist& p, const CondDist& v);
// Marginal on `axis` plus the conditional of the remaining axes (flattened
// row-major) given `axis`. Rows with zero conditioning mass are set uniform.
std::pair<FiniteDist, CondDist> decompose(const JointDist& j, int axis);
FiniteDist marginal(const JointDist& j, int axis);
double joint_entropy(const JointDist& j);
double mutual_information(const JointDist& j);
double conditional_entropy(const JointDist& j, int target, const std::vector<int>& given);

// All k-type distributions over `size` symbols in lexicographic order of the
// underlying integer compositions; count = C(k+size-1, size-1).
std::vector<FiniteDist> enumerate_simplex(int size, int k);

JointDist empirical_joint_type(const std::vector<std::vector<int>>& sequences,
                               const std::vector<int>& alphabet_sizes);

inline double log2_safe(double x) { return std::log2(x); }

}  // namespace relab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "relab/core.hpp"
#include "relab/json_io.hpp"

using namespace relab;

namespace {

// random rational distribution with strictly positive mass
std::vector<double> random_dist(std::mt19937& rng, int size, int denom = 64) {
    std::vector<int> c(size, 1);
    std::uniform_int_distribution<int> pick(0, size - 1);
    for (int i = 0; i < denom - size; ++i) c[pick(rng)]++;
    std::vector<double> p(size);
    for (int i = 0; i < size; ++i) p[i] = static_cast<double>(c[i]) / denom;
    return p;
}

}  // namespace

TEST_CASE("entropy basics") {
    CHECK(entropy({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(entropy({1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(entropy({0.25, 0.75}) == doctest::Approx(0.8112781244591328).epsilon(1e-13));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-13));
}

TEST_CASE("kl divergence") {
    FiniteDist q({0.3, 0.7}), p({0.3, 0.7});
    CHECK(kl_divergence(q, p).v == doctest::Approx(0.0));
    CHECK(binary_kl(0.575, 0.5) == doctest::Approx(0.016291737376814303).epsilon(1e-12));
    // unsupported reference
    CHECK(kl_divergence(FiniteDist({0.5, 0.5}), FiniteDist({1.0, 0.0})).is_inf());
    // nonnegative on random instances
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        FiniteDist a(random_dist(rng, 3)), b(random_dist(rng, 3));
        CHECK(kl_divergence(a, b).v >= 0.0);
    }
}

TEST_CASE("joint marginals and chain rule") {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        JointDist j({2, 3}, random_dist(rng, 6, 96));
        const double hxy = joint_entropy(j);
        const double hy = entropy(marginal(j, 1));
        const double hx_given_y = conditional_entropy(j, 0, {1});
        CHECK(hxy == doctest::Approx(hy + hx_given_y).epsilon(1e-10));
        CHECK(mutual_information(j) >= -1e-12);
    }
    // product law has zero mutual information
    JointDist prod({2, 2}, {0.12, 0.28, 0.18, 0.42});
    CHECK(mutual_information(prod) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("decompose and compose roundtrip") {
    JointDist j({2, 2}, {0.4, 0.1, 0.1, 0.4});
    auto [py, cond] = decompose(j, 1);
    CHECK(py[0] == doctest::Approx(0.5));
    JointDist back = compose(py, cond);
    // compose yields (axis, rest) order
    CHECK(back.at2(0, 0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(back.at2(1, 1) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("simplex enumeration") {
    const auto grid = enumerate_simplex(3, 4);
    CHECK(grid.size() == 15);  // C(4+2, 2)
    for (const auto& d : grid) {
        double sum = 0;
        for (int i = 0; i < d.size(); ++i) {
            sum += d[i];
            CHECK(std::abs(d[i] * 4 - std::lround(d[i] * 4)) < 1e-12);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("empirical joint type") {
    std::vector<std::vector<int>> seqs = {{0, 1, 1, 0}, {1, 1, 0, 0}};
    const auto t = empirical_joint_type(seqs, {2, 2});
    CHECK(t.at2(0, 1) == doctest::Approx(0.25));
    CHECK(t.at2(1, 1) == doctest::Approx(0.25));
    CHECK(t.at2(0, 0) == doctest::Approx(0.25));
    CHECK(t.at2(1, 0) == doctest::Approx(0.25));
}

TEST_CASE("validation rejects bad mass") {
    CHECK_THROWS_AS(FiniteDist({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDist({0.5, -0.1, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(JointDist({2, 2}, {0.5, 0.5, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("json roundtrip") {
    JointDist j({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const auto back = joint_from_json(to_json(j));
    REQUIRE(back.axis_sizes == j.axis_sizes);
    for (std::size_t i = 0; i < j.p.size(); ++i) CHECK(back.p[i] == doctest::Approx(j.p[i]));
    FiniteDist d({0.25, 0.75});
    CHECK(finite_dist_from_json(to_json(d))[1] == doctest::Approx(0.75));
}

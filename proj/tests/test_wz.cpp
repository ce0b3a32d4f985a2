#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relab/wz.hpp"

using namespace relab;

namespace {

DistortionTable hamming2() { return DistortionTable(2, 2, {0.0, 1.0, 1.0, 0.0}); }

JointDist q_with_identity_channel(const JointDist& q_xy) {
    // (x, y, z) with z = x
    std::vector<double> p(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) p[(x * 2 + y) * 2 + x] = q_xy.at2(x, y);
    return JointDist({2, 2, 2}, p);
}

CondDist identity_channel() {
    return CondDist({FiniteDist({1.0, 0.0}), FiniteDist({0.0, 1.0})});
}

}  // namespace

TEST_CASE("g_d branch values") {
    JointDist p_xy({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const auto q = q_with_identity_channel(p_xy);
    const auto w = identity_channel();
    const DistortionTable d = hamming2();

    // copy z: zero distortion, nominal law, binning penalty only
    ReproductionFn copy_z(2, 2, 2, {0, 1, 0, 1});
    const double i_xy = 0.2780719051126377;  // 1 - h(0.2), the doubly symmetric pair
    auto v = g_d(q, p_xy, w, copy_z, d, 0.3, 0.5);
    CHECK(v.v == doctest::Approx(std::max(0.0, 0.5 - 1.0 + i_xy)).epsilon(1e-9));

    // flip z: distortion 1 >= delta, pure divergence branch
    ReproductionFn flip_z(2, 2, 2, {1, 0, 1, 0});
    CHECK(g_d(q, p_xy, w, flip_z, d, 0.3, 0.5).v == doctest::Approx(0.0).epsilon(1e-12));

    // constant channel, low rate demand not met and distortion below target
    std::vector<double> pc(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) pc[(x * 2 + y) * 2 + 0] = p_xy.at2(x, y);
    JointDist q_const({2, 2, 2}, pc);
    CondDist w_const({FiniteDist({1.0, 0.0}), FiniteDist({1.0, 0.0})});
    CHECK(g_d(q_const, p_xy, w_const, copy_z, d, 0.7, 0.5).is_inf());
}

TEST_CASE("g_d rejects inconsistent channel") {
    JointDist p_xy({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const auto q = q_with_identity_channel(p_xy);
    CondDist wrong({FiniteDist({0.5, 0.5}), FiniteDist({0.5, 0.5})});
    ReproductionFn f(2, 2, 2, {0, 1, 0, 1});
    CHECK_THROWS_AS(g_d(q, p_xy, wrong, f, hamming2(), 0.3, 0.5), std::invalid_argument);
}

TEST_CASE("marton binary hamming") {
    FiniteDist p({0.8, 0.2});
    CHECK(marton_binary_hamming(p, 0.3, 0.1).v ==
          doctest::Approx(0.0027114756118454125).epsilon(1e-10));
    CHECK(marton_binary_hamming(p, 0.6, 0.1).is_inf());  // rate above 1 - h(delta)
    CHECK(marton_binary_hamming(FiniteDist({0.5, 0.5}), 0.3, 0.1).v == doctest::Approx(0.0));
}

TEST_CASE("rwz basic behavior") {
    JointDist q({2, 2}, {0.25, 0.25, 0.25, 0.25});
    GridSpec g;
    g.k = 6;
    CHECK(rwz(q, 0.5, hamming2(), 2, g) == doctest::Approx(0.0));
    double prev = 1e9;
    for (double delta : {0.05, 0.15, 0.3}) {
        const double v = rwz(q, delta, hamming2(), 2, g);
        CHECK(v <= prev + 1e-9);
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-9);
        prev = v;
    }
}

TEST_CASE("theta_lower budget guard") {
    WzProblem prob;
    prob.p_xy = JointDist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    prob.rate = 0.3;
    prob.delta = 0.2;
    prob.dist = DistortionTable(2, 3, {0.0, 1.0, 1.0, 1.0, 1.0, 0.0});
    prob.z_size = 4;
    prob.xhat_size = 3;  // 2*4*log2(3) > 12 bits of reproduction functions
    GridSpec g;
    CHECK_THROWS_AS(theta_lower(prob, g), BudgetError);
}

TEST_CASE("theta_lower small instance is finite and nonnegative") {
    WzProblem prob;
    prob.p_xy = JointDist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    prob.rate = 0.6;
    prob.delta = 0.05;
    prob.dist = hamming2();
    prob.z_size = 2;
    prob.xhat_size = 2;
    GridSpec g;
    g.k = 4;
    g.k_outer = 6;
    g.refine_rounds = 6;
    const auto rep = theta_lower(prob, g);
    CHECK(rep.value.v >= -1e-12);
    REQUIRE(rep.value.finite());
    CHECK(rep.q_x.size() == 2);
    CHECK(rep.f.f.size() == 4);
}

TEST_CASE("theta_upper infeasible set gives infinity") {
    WzProblem prob;
    prob.p_xy = JointDist({2, 2}, {0.25, 0.25, 0.25, 0.25});
    prob.rate = 2.0;  // no joint type demands more than one bit
    prob.delta = 0.05;
    prob.dist = hamming2();
    prob.z_size = 2;
    GridSpec g;
    g.k = 4;
    g.k_outer = 6;
    CHECK(theta_upper(prob, g).is_inf());
}

TEST_CASE("functional exponents") {
    FunctionalProblem prob;
    prob.p_xy = JointDist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    prob.g = {0, 1};  // identity
    prob.rate = 0.3;
    GridSpec g;
    g.k_outer = 12;
    g.refine_rounds = 10;
    const auto rep = xi_exponents(prob, g);
    // on the constraint set the lower-bound bracket vanishes
    CHECK(rep.xi_lower.v == doctest::Approx(rep.xi_upper.v).epsilon(1e-9));
    const auto uncon = xi_exponents(prob, g, true);
    CHECK(uncon.xi_lower.v <= rep.xi_upper.v + 1e-9);
    prob.rate = 0.0;
    CHECK(xi_exponents(prob, g).xi_upper.v == doctest::Approx(0.0).epsilon(1e-9));
}

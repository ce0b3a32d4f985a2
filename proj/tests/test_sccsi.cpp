#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "relab/sccsi.hpp"

using namespace relab;

namespace {

JointDist product_xy(double px1, double py1) {
    return JointDist({2, 2}, {(1 - px1) * (1 - py1), (1 - px1) * py1, px1 * (1 - py1), px1 * py1});
}

GridSpec quick_grid() {
    GridSpec g;
    g.k = 6;
    g.k_outer = 12;
    g.refine_rounds = 12;
    return g;
}

}  // namespace

TEST_CASE("point to point exponent") {
    FiniteDist p({0.89, 0.11});
    // below the source entropy the exponent vanishes
    CHECK(point_to_point_exponent(p, 0.3).v == doctest::Approx(0.0));
    CHECK(point_to_point_exponent(p, 0.75).v ==
          doctest::Approx(0.0651247605767826).epsilon(1e-9));
    CHECK(point_to_point_exponent(p, 0.6).v ==
          doctest::Approx(0.008811703005239126).epsilon(1e-9));
    CHECK(point_to_point_exponent(p, 1.5).is_inf());
    FiniteDist p3({0.7, 0.3});
    CHECK(point_to_point_exponent(p3, 0.9).v ==
          doctest::Approx(0.0008728267714344269).epsilon(1e-9));
}

TEST_CASE("eta_lower degenerate rate") {
    SccsiProblem prob{product_xy(0.11, 0.5), 1.0, 0.0, 1};
    CHECK(eta_lower(prob, quick_grid()).value.is_inf());
    prob.r1 = 1.2;
    CHECK(eta_lower(prob, quick_grid()).value.is_inf());
}

TEST_CASE("eta_lower reduces to point to point without a helper") {
    for (double r1 : {0.6, 0.75}) {
        SccsiProblem prob{product_xy(0.11, 0.5), r1, 0.0, 1};
        const auto rep = eta_lower(prob, quick_grid());
        const auto oracle = point_to_point_exponent(FiniteDist({0.89, 0.11}), r1);
        CHECK(rep.value.v == doctest::Approx(oracle.v).epsilon(0.05));
        CHECK(std::abs(rep.value.v - oracle.v) < 3e-3);
    }
}

TEST_CASE("eta_lower witness reevaluates to the reported value") {
    SccsiProblem prob{JointDist({2, 2}, {0.4, 0.1, 0.2, 0.3}), 0.8, 0.5, 2};
    const auto rep = eta_lower(prob, quick_grid());
    REQUIRE(rep.value.finite());
    std::vector<std::vector<double>> w;
    for (const auto& r : rep.q_s_given_y.rows) w.push_back(r.p);
    const auto again = eta_lower_objective(prob, rep.q_y.p, w, rep.inner_rows);
    CHECK(again.v == doctest::Approx(rep.value.v).epsilon(1e-9));
}

TEST_CASE("eta_upper requires strictly positive source") {
    SccsiProblem prob{JointDist({2, 2}, {0.5, 0.5, 0.0, 0.0}), 0.5, 0.2, 2};
    CHECK_THROWS_AS(eta_upper(prob, quick_grid()), std::invalid_argument);
}

TEST_CASE("eta_upper never exceeds the sphere packing bound") {
    std::mt19937 rng(21);
    GridSpec g;
    g.k = 6;
    g.k_outer = 12;
    g.refine_rounds = 10;
    for (int i = 0; i < 4; ++i) {
        std::vector<int> c(4, 1);
        std::uniform_int_distribution<int> pick(0, 3);
        for (int j = 0; j < 28; ++j) c[pick(rng)]++;
        std::vector<double> p(4);
        for (int j = 0; j < 4; ++j) p[j] = c[j] / 32.0;
        SccsiProblem prob{JointDist({2, 2}, p), 0.8, 0.4, 3};
        const auto up = eta_upper(prob, g);
        const auto sp = eta_sp(prob, g);
        CHECK(up.value.v <= sp.value.v + 1e-9);
    }
}

TEST_CASE("eta_lower monotone in both rates") {
    SccsiProblem prob{JointDist({2, 2}, {0.35, 0.15, 0.1, 0.4}), 0.7, 0.1, 2};
    const auto g = quick_grid();
    double prev = -1.0;
    for (double r1 : {0.6, 0.7, 0.8, 0.9}) {
        prob.r1 = r1;
        const double v = eta_lower(prob, g).value.v;
        CHECK(v >= prev - 1e-8);
        prev = v;
    }
    prob.r1 = 0.8;
    prev = -1.0;
    for (double r2 : {0.0, 0.2, 0.4, 0.6}) {
        prob.r2 = r2;
        const double v = eta_lower(prob, g).value.v;
        CHECK(v >= prev - 1e-8);
        prev = v;
    }
}

TEST_CASE("helper alphabet bound") {
    CHECK(eta_upper_s_bound(2, 2) == 8);
    CHECK(eta_upper_s_bound(3, 2) == 10);
}

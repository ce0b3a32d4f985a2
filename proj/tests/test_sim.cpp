#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "relab/sim.hpp"

using namespace relab;

namespace {

JointDist dsbs(double flip) {
    const double a = (1 - flip) / 2, b = flip / 2;
    return JointDist({2, 2}, {a, b, b, a});
}

STarget identity_target(int ns) {
    return [ns](int y) {
        std::vector<double> row(ns, 0.0);
        row[y % ns] = 1.0;
        return row;
    };
}

}  // namespace

TEST_CASE("seed derivation") {
    const uint64_t a = derive_seed(1, "x", 0);
    CHECK(a == derive_seed(1, "x", 0));
    CHECK(a != derive_seed(1, "x", 1));
    CHECK(a != derive_seed(1, "y", 0));
    CHECK(a != derive_seed(2, "x", 0));
}

TEST_CASE("wilson interval") {
    auto [lo, hi] = wilson_ci(0, 1000);
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi < 0.01);
    auto [lo2, hi2] = wilson_ci(500, 1000);
    CHECK(lo2 < 0.5);
    CHECK(hi2 > 0.5);
    CHECK(hi2 - lo2 < 0.07);
}

TEST_CASE("type class machinery") {
    const std::vector<int> counts{3, 2, 1};
    CHECK(type_class_size(counts) == 60);  // 6!/(3!2!1!)
    const auto members = enumerate_type_class(counts);
    REQUIRE(members.size() == 60);
    for (uint64_t r = 0; r < members.size(); ++r) {
        CHECK(type_class_rank(members[r], 3) == r);
        CHECK(sequence_counts(members[r], 3) == counts);
    }
    CHECK_THROWS_AS(enumerate_type_class(std::vector<int>{8, 8}, 10), BudgetError);

    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i)
        CHECK(sequence_counts(sample_type_class(counts, rng), 3) == counts);
}

TEST_CASE("type class size bounds") {
    // (n+1)^{-|A|} 2^{nH} <= |T| <= 2^{nH} over all pair types at n = 8
    const int n = 8;
    for (int c0 = 0; c0 <= n; ++c0)
        for (int c1 = 0; c0 + c1 <= n; ++c1)
            for (int c2 = 0; c0 + c1 + c2 <= n; ++c2) {
                const int c3 = n - c0 - c1 - c2;
                const std::vector<int> counts{c0, c1, c2, c3};
                std::vector<double> p{double(c0) / n, double(c1) / n, double(c2) / n,
                                      double(c3) / n};
                const double h = entropy(p);
                const double size = static_cast<double>(type_class_size(counts));
                CHECK(size <= std::exp2(n * h) * (1 + 1e-9));
                CHECK(size >= std::exp2(n * h) / std::pow(n + 1.0, 4) * (1 - 1e-9));
            }
}

TEST_CASE("source sampling matches the law") {
    SimSource src{dsbs(0.11)};
    std::mt19937_64 rng(4);
    int agree = 0;
    const int total = 20000;
    for (int t = 0; t < total; ++t) {
        auto [x, y] = src.sample(4, rng);
        for (int i = 0; i < 4; ++i)
            if (x[i] == y[i]) agree++;
    }
    CHECK(double(agree) / (4 * total) == doctest::Approx(0.89).epsilon(0.02));
}

TEST_CASE("codebook size bracket") {
    SccsiProblem prob{dsbs(0.11), 0.7, 1.0, 2};
    for (int n : {6, 10}) {
        const auto code = build_sccsi_code(prob, n, 77, identity_target(2));
        CHECK(code.u1_bins == static_cast<long long>(std::ceil(std::exp2(n * prob.r1) - 1e-9)));
        for (const auto& [cy, h] : code.helpers) {
            const double base = std::exp2(n * h.i_ys_bits);
            CHECK(h.m >= base - 1e-6);
            CHECK(h.m <= base + (2 * 2 + 4) * std::log2(n + 1.0) + 1.0);
            int total = 0;
            for (std::size_t y = 0; y < cy.size(); ++y) {
                int row = 0;
                for (int v : h.w_counts[y]) row += v;
                CHECK(row == cy[y]);
                total += row;
            }
            CHECK(total == n);
            // codewords live in the induced type class
            std::vector<int> zc(2, 0);
            for (std::size_t y = 0; y < cy.size(); ++y)
                for (int s = 0; s < 2; ++s) zc[s] += h.w_counts[y][s];
            for (const auto& cw : h.codebook) CHECK(sequence_counts(cw, 2) == zc);
        }
    }
}

TEST_CASE("injective rates decode without error") {
    SccsiProblem prob{dsbs(0.11), 1.0, 2.0, 2};
    const auto stats = run_sccsi_trials(prob, {6, 8}, 300, 123, identity_target(2));
    for (const auto& s : stats) CHECK(s.errors == 0);
}

TEST_CASE("rounds are deterministic in the seed") {
    SccsiProblem prob{dsbs(0.11), 0.6, 1.0, 2};
    const auto code = build_sccsi_code(prob, 8, 55, identity_target(2));
    SimSource src{prob.p_xy};
    std::mt19937_64 rng(3);
    auto [x, y] = src.sample(8, rng);
    const auto a = sccsi_round(code, x, y, 999);
    const auto b = sccsi_round(code, x, y, 999);
    CHECK(a.error == b.error);
    CHECK(a.x_hat == b.x_hat);
}

TEST_CASE("wyner ziv code and rounds") {
    WzProblem prob;
    prob.p_xy = dsbs(0.11);
    prob.rate = 0.5;
    prob.delta = 0.2;
    prob.dist = DistortionTable(2, 2, {0.0, 1.0, 1.0, 0.0});
    prob.z_size = 2;
    ReproductionFn f(2, 2, 2, {0, 1, 0, 1});  // trust z
    auto target = [](int x) {
        std::vector<double> row(2, 0.0);
        row[x] = 1.0;
        return row;
    };
    const auto code = build_wz_code(prob, f, 8, 99, target);
    for (const auto& [cx, q] : code.quantizers) {
        const double base = std::exp2(8 * q.i_xz_bits);
        CHECK(q.m >= base - 1e-6);
        CHECK(q.m <= base + (2 * 2 + 4) * std::log2(9.0) + 1.0);
    }
    const auto stats = run_wz_trials(prob, f, {6, 8}, 300, 42, target);
    for (const auto& s : stats) {
        CHECK(s.trials == 300);
        CHECK(s.p_hat >= 0.0);
        CHECK(s.ci_hi >= s.p_hat);
    }
}

TEST_CASE("empirical exponent fit") {
    std::vector<TrialStats> stats;
    for (int n : {4, 6, 8}) {
        TrialStats s;
        s.n = n;
        s.trials = 1000;
        s.errors = static_cast<long long>(1000 * std::exp(-0.5 * n));
        s.p_hat = double(s.errors) / 1000;
        stats.push_back(s);
    }
    const auto fit = empirical_exponent(stats);
    CHECK(fit.slope_nats == doctest::Approx(0.5).epsilon(0.05));
    CHECK_FALSE(fit.floored);
    stats[2].errors = 0;
    stats[2].p_hat = 0;
    CHECK(empirical_exponent(stats).floored);
}

TEST_CASE("budget guards") {
    SccsiProblem prob{dsbs(0.11), 0.6, 1.0, 2};
    CHECK_THROWS_AS(build_sccsi_code(prob, 20, 1, identity_target(2)), BudgetError);
    SccsiProblem big{JointDist({2, 2}, {0.25, 0.25, 0.25, 0.25}), 0.6, 1.0, 4};
    CHECK_THROWS_AS(build_sccsi_code(big, 8, 1, identity_target(4)), BudgetError);
}

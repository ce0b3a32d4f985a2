#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "relab/gaussian.hpp"

using namespace relab;

TEST_CASE("gauss_kl closed forms") {
    Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
    CHECK(gauss_kl(a, a) == doctest::Approx(0.0));
    Eigen::Matrix3d d1 = Eigen::Vector3d(0.7, 1.3, 2.1).asDiagonal();
    Eigen::Matrix3d d2 = Eigen::Vector3d(1.0, 0.8, 1.5).asDiagonal();
    CHECK(gauss_kl(d1, d2) == doctest::Approx(0.1298474457679094).epsilon(1e-12));
    Eigen::Matrix2d bad;
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(gauss_kl(bad, Eigen::Matrix2d::Identity()), std::invalid_argument);
}

TEST_CASE("two sided gaussian identity") {
    // D(K* || Sigma) equals the closed form on a lattice of parameters
    for (double rate : {0.15, 0.25, 0.35, 0.45, 0.55})
        for (double delta : {0.2, 0.3, 0.4, 0.5, 0.6})
            for (double zeta : {0.0, 0.2, 0.4, 0.6, 0.8}) {
                Eigen::Matrix2d sigma;
                sigma << 1.0, zeta, zeta, 1.0;
                const double kl = gauss_kl(gauss_kstar(zeta, delta, rate), sigma);
                CHECK(std::abs(kl - two_sided_gauss(zeta, delta, rate)) < 1e-9);
            }
    CHECK(two_sided_gauss(0.7, 0.4, 0.2) == doctest::Approx(0.006502382497849735).epsilon(1e-12));
}

TEST_CASE("conditional rate distortion") {
    Eigen::Matrix2d sigma;
    sigma << 1.0, 0.7, 0.7, 1.0;
    CHECK(cond_rd(sigma, 0.4) == doctest::Approx(0.1214730893051947).epsilon(1e-12));
    CHECK(cond_rd(sigma, 0.51) == doctest::Approx(0.0));  // at the conditional variance
    CHECK(cond_rd(sigma, 0.8) == doctest::Approx(0.0));
}

TEST_CASE("benchmark curves") {
    CHECK(marton_gauss(0.5, 0.5) == doctest::Approx(0.02614404739473397).epsilon(1e-12));
    CHECK(marton_gauss(0.3, 0.4) == doctest::Approx(0.0));  // delta e^{2R} below 1
    CHECK(gauss_mi(0.76) == doctest::Approx(0.4309012732950427).epsilon(1e-12));
    CHECK(gauss_mi(0.0) == doctest::Approx(0.0));
}

TEST_CASE("mse equals the quadratic form of the estimation error") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> us(0.3, 2.5), ur(-0.6, 0.6), ul(-1.5, 1.5);
    for (int i = 0; i < 200; ++i) {
        const double sx = us(rng), sy = us(rng);
        const double rxy = ur(rng), rxz = ur(rng), ryz = ur(rng);
        if (1 + 2 * rxy * rxz * ryz - rxy * rxy - rxz * rxz - ryz * ryz <= 1e-6) continue;
        const double a = ul(rng), b = ul(rng);
        const Eigen::Matrix3d k = gauss_cov3(sx, sy, rxy, rxz, ryz);
        Eigen::Vector3d c(1.0, -a, -b);
        CHECK(gauss_mse(sx, sy, rxy, rxz, ryz, a, b) ==
              doctest::Approx(c.transpose() * k * c).epsilon(1e-10));
    }
}

TEST_CASE("reference covariance is the nominal source through the test channel") {
    // kbar equals cov of (X, Y, cX + N) for unit-variance (X, Y), so applying
    // the same channel to a rescaled source gives KL equal to the marginal KL.
    for (double s : {0.6, 1.0, 1.7})
        for (double rho : {0.2, 0.5, 0.8}) {
            const Eigen::Matrix3d q = gauss_cov3(s, 1.0, 0.0, rho, 0.0);
            const double kl = gauss_kl(q, gauss_kbar(s, rho, 0.0));
            CHECK(kl == doctest::Approx(0.5 * (s - std::log(s) - 1.0)).epsilon(1e-10));
        }
}

TEST_CASE("branch functional") {
    // nominal law, distortion above target: divergence branch, zero value
    CHECK(g_g(1.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.4, 0.3).v ==
          doctest::Approx(0.0).epsilon(1e-10));
    // estimator beta = rho drives mse to 1 - rho^2 < delta with binning active
    const double rho = 0.9;
    const auto v = g_g(1.0, 1.0, 0.0, rho, 0.0, 0.0, 0.0, rho, 0.4, 0.3);
    CHECK(v.v == doctest::Approx(std::max(0.0, 0.4 - gauss_mi(rho))).epsilon(1e-10));
    // binning off and mse below delta: error free
    CHECK(g_g(1.0, 1.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.3, 0.4, 0.95).is_inf());
    CHECK_THROWS_AS(g_g(1.0, 1.0, 0.9, 0.9, -0.9, 0.0, 0.0, 0.0, 0.4, 0.3),
                    std::invalid_argument);
}

TEST_CASE("upper bound hypotheses and sanity") {
    GaussUpperGrids g;
    g.s_step = 0.1;
    g.rho_step = 0.05;
    CHECK_THROWS_AS(theta_gauss_upper(0.05, 0.4, 0.7, g), std::invalid_argument);
    const auto v1 = theta_gauss_upper(0.3, 0.4, 0.7, g);
    const auto v2 = theta_gauss_upper(0.5, 0.4, 0.7, g);
    CHECK(v1.v >= -1e-12);
    CHECK(v2.v >= v1.v - 1e-9);  // shrinking feasible set
}

TEST_CASE("lower bound collapses to zero when the source is already good enough") {
    GaussGrids g;
    g.s_step = 0.45;
    g.rho_xz_step = 0.14;
    g.sigma_refine_rounds = 2;
    const auto rep = theta_gauss_lower(0.3, 0.4, 0.0, g);
    CHECK(rep.value.v == doctest::Approx(0.0).epsilon(1e-8));
}

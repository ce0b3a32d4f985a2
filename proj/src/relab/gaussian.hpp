#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "relab/core.hpp"

// Quadratic-Gaussian bounds. Everything in this module is in nats.
// Joint axis order is (X, Y, Z); the quantization output Z is normalized to
// unit variance throughout.

namespace relab {

// Relative entropy between centered Gaussians with covariances k and kbar.
double gauss_kl(const Eigen::MatrixXd& k, const Eigen::MatrixXd& kbar);

// Covariance of (X, Y, Z) with var(Z) = 1 pinned.
Eigen::Matrix3d gauss_cov3(double sigma_x2, double sigma_y2, double rho_xy, double rho_xz,
                           double rho_yz);

// Reference law: unit-variance (X, Y) with correlation zeta, Z produced by the
// linear test channel that has correlation rho_xz and unit output variance
// under source variance sigma_x2.
Eigen::Matrix3d gauss_kbar(double sigma_x2, double rho_xz, double zeta);

// -0.5 ln(1 - rho^2)
double gauss_mi(double rho);

// E (X - alpha Y - beta Z)^2 under the correlation structure.
double gauss_mse(double sigma_x2, double sigma_y2, double rho_xy, double rho_xz, double rho_yz,
                 double alpha, double beta);

// Branch functional for one adversarial law, estimator (alpha, beta).
ExtReal g_g(double sigma_x2, double sigma_y2, double rho_xy, double rho_xz, double rho_yz,
            double zeta, double alpha, double beta, double rate, double delta);

struct GaussGrids {
    double s_min = 0.1, s_max = 4.0, s_step = 0.3;  // sigma_x^2 and sigma_y^2
    double rho_xz_max = 0.98, rho_xz_step = 0.07;
    double corr_max = 0.98, corr_step = 0.14;  // inner (rho_xy, rho_yz)
    double lambda_max = 4.0, lambda_step = 1.0;
    int sigma_refine_rounds = 3;
    int inner_refine_rounds = 2;
    double refine_shrink = 0.2;
};

struct GaussReport {
    ExtReal value;
    double sigma_x2 = 1.0;
    double rho_xz = 0.0;
    double sigma_y2 = 1.0;
    double alpha = 0.0, beta = 0.0;
};

GaussReport theta_gauss_lower(double rate, double delta, double zeta, const GaussGrids& grids);

// Designer profile at fixed source variance: value of the three-level inner
// game as a function of rho_xz, sampled at `rho_step`.
std::vector<std::pair<double, double>> g3_profile(double sigma_x2, double rate, double delta,
                                                  double zeta, const GaussGrids& grids,
                                                  double rho_step = 0.01);

// 0.5 (t - ln t - 1)^+ at t = delta e^{2R}; the no-side-information benchmark.
double marton_gauss(double rate, double delta);

Eigen::Matrix2d gauss_kstar(double zeta, double delta, double rate);
double two_sided_gauss(double zeta, double delta, double rate);

// Conditional rate-distortion of a 2x2 source covariance (X given Y).
double cond_rd(const Eigen::Matrix2d& sigma, double delta);

struct GaussUpperGrids {
    double s_min = 0.05, s_max = 4.0, s_step = 0.05;
    double rho_max = 0.98, rho_step = 0.02;
    int refine_rounds = 4;
    double refine_shrink = 0.2;
};

ExtReal theta_gauss_upper(double rate, double delta, double zeta, const GaussUpperGrids& grids);

}  // namespace relab

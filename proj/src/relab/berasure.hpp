#pragma once

#include "relab/core.hpp"
#include "relab/wz.hpp"

// Binary source with erased side information, erasure quantization and the
// erase-or-pay-kappa distortion. Symbol order everywhere: X in {-1,+1} as
// indices {0,1}; Y, Z, Xhat in {-1,0,+1} as indices {0,1,2}.

namespace relab {

struct BeConfig {
    double p = 0.5;      // side-information erasure probability
    double delta = 0.15;  // distortion target
    double kappa = 100.0;  // sign-error distortion
    double rate = 0.425;
    double dgrid = 0.005;  // delta_z scan step
    GridSpec grid;
};

struct BePoint {
    double delta_z;
    ExtReal g1;
    ExtReal g2;
};

struct BeCurve {
    std::vector<BePoint> points;
    double best_delta_z = 0.0;
    ExtReal value;
};

// z if z is not erased, else y.
ReproductionFn be_natural_f();

// d(x, xhat): 0 on match, 1 on erasure, kappa on sign error.
DistortionTable be_distortion(double kappa);

// Distortion-violation exponent of the natural scheme at quantizer erasure
// rate delta_z (bits).
ExtReal be_g1(const BeConfig& cfg, double delta_z);

// Binning-failure exponent at delta_z (bits).
ExtReal be_g2(const BeConfig& cfg, double delta_z);

// sup over delta_z of min(g1, g2); ties resolved toward the smallest delta_z.
BeCurve be_exponent(const BeConfig& cfg);

ExtReal two_sided_exponent(double p, double rate, double delta);

// Conditional rate-distortion function of the pair: [p - delta]^+.
double be_rd_function(double p, double delta);

}  // namespace relab

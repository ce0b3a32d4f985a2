#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>

#include "relab/sccsi.hpp"
#include "relab/wz.hpp"

// Finite-blocklength Monte Carlo for the two coding schemes. Everything is
// deterministic given the master seed: codebooks, hash bins and tie-breaks all
// derive their randomness from (master, label, index).

namespace relab {

uint64_t derive_seed(uint64_t master, const std::string& label, uint64_t index);

// 95% Wilson score interval.
std::pair<double, double> wilson_ci(long long errors, long long trials);

struct TrialStats {
    int n = 0;
    long long trials = 0;
    long long errors = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
};

// --- type-class machinery (alphabets <= 3, n <= 16 enforced by the builders)

std::vector<int> sequence_counts(const std::vector<int>& seq, int alphabet);
uint64_t type_class_size(const std::vector<int>& counts);
// Lexicographic rank of seq within its own type class.
uint64_t type_class_rank(const std::vector<int>& seq, int alphabet);
std::vector<std::vector<int>> enumerate_type_class(const std::vector<int>& counts,
                                                   uint64_t guard = 1000000);
std::vector<int> sample_type_class(const std::vector<int>& counts, std::mt19937_64& rng);

struct SimSource {
    JointDist p_xy;
    // i.i.d. block of (x, y)
    std::pair<std::vector<int>, std::vector<int>> sample(int n, std::mt19937_64& rng) const;
};

// Target conditional type for the helper quantizer, as a row over S per y.
using STarget = std::function<std::vector<double>(int y)>;

struct SccsiCode {
    SccsiProblem prob;
    int n = 0;
    uint64_t master = 0;
    long long u1_bins = 0, u2_bins = 0;

    struct HelperCode {
        std::vector<std::vector<int>> w_counts;  // per y: counts over S, row sum = c_y
        double i_ys_bits = 0.0;                  // I of the joint type (Q_y, W*)
        long long m = 0;
        std::vector<std::vector<int>> codebook;
        std::vector<long long> u2;  // bin of each codeword
        std::map<std::vector<int>, std::vector<int>> index;  // codeword -> positions
        std::map<long long, std::vector<int>> bin_members;   // u2 bin -> positions
    };
    std::map<std::vector<int>, HelperCode> helpers;  // keyed by y-type counts

    // decode-side cache: x-type counts -> per-u1-bin member lists
    mutable std::map<std::vector<int>, std::vector<std::vector<std::vector<int>>>> x_bins;
};

SccsiCode build_sccsi_code(const SccsiProblem& prob, int n, uint64_t master_seed,
                           const STarget& target = {});

struct RoundResult {
    bool error = false;
    std::vector<int> x_hat;
};

RoundResult sccsi_round(const SccsiCode& code, const std::vector<int>& x,
                        const std::vector<int>& y, uint64_t trial_seed);

std::vector<TrialStats> run_sccsi_trials(const SccsiProblem& prob, const std::vector<int>& ns,
                                         long long trials, uint64_t master_seed,
                                         const STarget& target = {});

struct WzCode {
    WzProblem prob;
    ReproductionFn f;
    int n = 0;
    uint64_t master = 0;
    long long u_bins = 0;

    struct QuantCode {
        std::vector<std::vector<int>> w_counts;  // per x: counts over Z
        double i_xz_bits = 0.0;
        long long m = 0;
        std::vector<std::vector<int>> codebook;
        std::vector<long long> u;
        std::map<std::vector<int>, std::vector<int>> index;
        std::map<long long, std::vector<int>> bin_members;
    };
    std::map<std::vector<int>, QuantCode> quantizers;  // keyed by x-type counts
};

// Target conditional type for the quantizer, as a row over Z per x.
using ZTarget = std::function<std::vector<double>(int x)>;

WzCode build_wz_code(const WzProblem& prob, const ReproductionFn& f, int n, uint64_t master_seed,
                     const ZTarget& target);

struct WzRound {
    double avg_distortion = 0.0;
    bool violation = false;
};

WzRound wz_round(const WzCode& code, const std::vector<int>& x, const std::vector<int>& y,
                 uint64_t trial_seed);

std::vector<TrialStats> run_wz_trials(const WzProblem& prob, const ReproductionFn& f,
                                      const std::vector<int>& ns, long long trials,
                                      uint64_t master_seed, const ZTarget& target);

struct ExponentFit {
    double slope_nats = 0.0;  // of -ln p_hat against n
    double intercept = 0.0;
    bool floored = false;  // some entries had zero errors and were floored at 1/(2T)
};

ExponentFit empirical_exponent(const std::vector<TrialStats>& stats);

}  // namespace relab

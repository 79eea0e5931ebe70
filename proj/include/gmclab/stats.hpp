#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace gmclab::stats {

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
// Stephens small-sample correction. Both samples need at least 100 values;
// a constant sample is rejected as degenerate.
struct KsResult {
  double statistic;
  double p_value;
  std::size_t n1;
  std::size_t n2;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample test of values in [0, 1] against the uniform law (used to test
// that a batch of p-values is itself uniform).
KsResult ks_one_sample_uniform(std::vector<double> a);

// Complex samples are compared marginal by marginal: real part, imaginary
// part, modulus.
std::array<KsResult, 3> ks_re_im_mod(const std::vector<std::complex<double>>& a,
                                     const std::vector<std::complex<double>>& b);

// Survival function of the Kolmogorov statistic,
//   Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double ks_tail_probability(double lambda);

// Percentile bootstrap interval for the mean.
struct BootstrapCi {
  double estimate;
  double lo;
  double hi;
  int resamples;
  double level;
};

BootstrapCi bootstrap_mean(const std::vector<double>& samples, int resamples,
                           double level, std::uint64_t seed);

// Hill estimator diagnostics. One ladder rung per requested order-statistic
// count k; the confidence interval is a percentile bootstrap over the top-k
// log-excesses.
struct HillPoint {
  int k;
  double alpha_hat;
  double se;  // asymptotic alpha / sqrt(k)
  double ci_lo;
  double ci_hi;
};

struct TailReport {
  std::vector<HillPoint> ladder;  // ascending k
  // Ladder consistent with one constant exponent: the z-score of
  // alpha(k_min) - alpha(k_max) stays below 3.
  bool plateau;
  double drift_z;
  // Estimate grows monotonically as k shrinks toward the extreme tail, the
  // signature of a distribution with no power tail at all.
  bool increases_toward_tail;
};

// Each k must satisfy 50 <= k <= M/10. Sample values must be positive in the
// analyzed tail.
TailReport tail_index(const std::vector<double>& samples,
                      const std::vector<int>& ks, int resamples,
                      std::uint64_t seed);

// Default ladder k in {M/100, M/50, M/20}.
TailReport tail_index(const std::vector<double>& samples, std::uint64_t seed);

// True when the diagnostics rule out any finite tail exponent below the
// threshold: no plateau, estimates increasing toward the tail, and the
// deepest rung's interval sitting above the threshold.
bool no_finite_tail_below(const TailReport& report, double threshold);

}  // namespace gmclab::stats

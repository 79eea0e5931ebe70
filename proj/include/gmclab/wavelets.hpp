#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gmclab/field.hpp"

namespace gmclab::wavelets {

using Complex = std::complex<double>;
using field::GridSpec;

// Orthonormal compactly supported filter pair for the periodic transform.
struct Basis {
  std::string id;
  std::vector<double> lowpass;  // scaling filter h, sum = sqrt(2)
  int vanishing_moments;
  // Holder exponent of the scaling function; any reported smoothness s must
  // satisfy |s| < declared_smoothness for the analysis to be trustworthy.
  double declared_smoothness;

  // vanishing_moments in {2, 4, 6, 8} ("db2".."db8", extremal phase).
  static Basis daubechies(int vanishing_moments);
  static const std::vector<std::string>& shipped_ids();
  static Basis from_id(const std::string& id);

  std::vector<double> highpass() const;  // g[t] = (-1)^t h[L-1-t]
  int support_length() const { return static_cast<int>(lowpass.size()); }
  // Deepest usable pyramid depth on a 2^m grid: m - ceil(log2 L).
  int max_levels(const GridSpec& grid) const;
};

// One dyadic level of detail coefficients: 2^d - 1 orientation bands with
// 2^{jd} entries each (band k for d = 2: 0 = x-detail, 1 = y-detail,
// 2 = diagonal).
struct Level {
  int j;
  std::vector<std::vector<Complex>> bands;
};

struct Decomposition {
  GridSpec grid;
  Basis basis;
  int coarse_level;              // j0 = m - depth
  std::vector<Complex> scaling;  // 2^{j0 d} coarse coefficients
  std::vector<Level> detail;     // levels j0 .. m-1, ascending
};

// Periodic orthonormal pyramid transform. Input samples are grid values
// f(x_i); they are scaled by h^{d/2} internally so coefficients carry the
// L^2 normalization. depth must not exceed basis.max_levels(grid).
Decomposition dwt_forward(const std::vector<Complex>& samples,
                          const GridSpec& grid, const Basis& basis, int depth);
Decomposition dwt_forward(const std::vector<double>& samples,
                          const GridSpec& grid, const Basis& basis, int depth);

// Exact inverse, returning grid samples.
std::vector<Complex> dwt_inverse(const Decomposition& dec);

// Grid samples of the single wavelet at (level j, shift k, orientation band);
// orientation is ignored for d = 1.
std::vector<double> synthesize_wavelet(const GridSpec& grid, const Basis& basis,
                                       int j, std::array<int, 2> k,
                                       int orientation = 0);

// Per-level summaries S_j = (sum |alpha|^p)^(1/p) (max for p = infinity) and
// the weighted A_j = 2^{dj(1/2 - 1/p)} 2^{js} S_j.
struct LevelStats {
  int j;
  std::size_t count;
  double s_j;
  double a_j;
};

std::vector<LevelStats> level_stats(const Decomposition& dec, double p,
                                    double s);

// Builds stats from externally accumulated per-level p-th moment sums
// (used when averaging over many realizations).
LevelStats make_level_stats(int j, std::size_t count, double sum_abs_p,
                            double p, double s, int d);

// Least-squares fit of log2 S_j against j over the given stats;
//   s_hat = -( d (1/2 - 1/p) + slope ).
// Requires at least 4 levels. If some level has vanishing coefficients
// the input is smoother than every resolvable s and `smooth_input` is set.
struct RegularityEstimate {
  double s_hat;
  double slope;
  double stderr_;
  int j_lo, j_hi;
  bool smooth_input;
};

RegularityEstimate regularity_estimate(const std::vector<LevelStats>& stats,
                                       double p, int d);

// Window policy for fits: drop the two coarsest detail levels (polluted by
// the smooth covariance remainder and the coarse scaling block) and the
// finest (polluted by the synthesis cutoff). Throws if fewer than 4 levels
// remain.
std::pair<int, int> regression_window(int j_coarse, int j_fine);

// Monte Carlo fit of log2 E|alpha(level j)|^r against j for the chaos at
// `beta`, compared with the predicted slope
//   rho(r) = r(r-1) Re^2/2 + r Im^2/2 - d r/2.
struct MomentScaling {
  double slope;
  double stderr_;
  double predicted;
  std::vector<int> levels;               // window levels used by the fit
  std::vector<double> log2_mean_moment;  // matching log2 E-hat per level
};

MomentScaling wavelet_moment_scaling(Complex beta, double r,
                                     const GridSpec& grid, int cutoff,
                                     const Basis& basis, int depth, int count,
                                     std::uint64_t seed, int threads = 0);

double predicted_moment_slope(Complex beta, double r, int d);

// Monte Carlo regularity estimate for the chaos at `beta`: accumulates the
// mean of sum |alpha|^p per level over `count` realizations, takes
// S_j = mean^{1/p}, and fits over the standard window. `s_predicted` is the
// critical threshold from the parameter geometry (NaN outside the existence
// region). The stats rows cover every computed level with A_j evaluated at
// the fitted s_hat (at 0 when the input is flagged smooth).
struct BesovEstimate {
  std::vector<LevelStats> stats;
  RegularityEstimate estimate;
  std::pair<int, int> window;
  double s_predicted;
};

BesovEstimate besov_estimate(Complex beta, const GridSpec& grid, int cutoff,
                             const Basis& basis, int depth, double p,
                             int count, std::uint64_t seed, int threads = 0);

// r * gamma(r, s, p, beta, d) at the minimizing r: the growth exponent of
// the r-th moment of the level sums A_j. Positive for s above the critical
// regularity, negative below.
double predicted_level_exponent(Complex beta, double p, double s, int d);

}  // namespace gmclab::wavelets

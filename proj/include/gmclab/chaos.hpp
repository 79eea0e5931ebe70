#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "gmclab/field.hpp"

namespace gmclab::chaos {

using Complex = std::complex<double>;
using field::GridSpec;
using field::Point;

// Normalized exponential of a field realization:
//   density(x) = exp(beta X(x) - beta^2 sigma^2 / 2),
// whose expectation is identically 1 for every complex beta. When the
// exponent's real part would overflow, the grid stores
// exp(w - log_scale) with the common factor kept separately in log space.
struct Realization {
  GridSpec grid;
  Complex beta;
  int cutoff;
  std::uint64_t seed;
  double log_scale;  // 0 in the normal regime
  std::vector<Complex> values;
};

Realization wick_exponential(const field::Realization& x, double sigma2,
                             Complex beta);

// Compactly supported test functions sampled on the grid.
struct TestFunction {
  enum class Kind { kSmoothBump, kIndicator, kWavelet, kRescaledBump, kConstant };

  GridSpec grid;
  Kind kind;
  Point center;
  double scale;           // bump/indicator radius; epsilon*scale for rescaled
  double support_radius;  // 0.5 means the whole torus
  double sup_norm;
  std::vector<double> values;

  // C_c^infinity bump exp(1 - 1/(1 - |u|^2)) on |u| < 1, u = (x - center)/scale.
  static TestFunction smooth_bump(const GridSpec& grid, Point center,
                                  double scale);
  static TestFunction indicator(const GridSpec& grid, Point center,
                                double radius);
  // smooth_bump composed with x -> x/epsilon: support shrinks to epsilon*scale.
  static TestFunction rescaled_bump(const GridSpec& grid, Point center,
                                    double scale, double epsilon);
  static TestFunction constant_one(const GridSpec& grid);
  // Wavelet (or any externally synthesized) samples.
  static TestFunction from_samples(const GridSpec& grid, Kind kind,
                                   std::vector<double> samples);
};

// Midpoint-rule quadrature of f alone: h^d sum f(x_i).
double integral(const TestFunction& f);

// <mu, f> by the same quadrature: h^d sum density(x_i) f(x_i).
Complex pair(const Realization& mu, const TestFunction& f);

// Deterministic smooth reweighting h_beta(x) = exp(beta G(x) - beta^2 g(x)/2)
// translating between the exactly scaling kernel and a cousin differing by a
// smooth additive part: G carries the Gaussian shift, g the variance shift.
struct SmoothCorrection {
  GridSpec grid;
  std::vector<double> shift;     // G(x)
  std::vector<double> variance;  // g(x, x)

  SmoothCorrection inverse() const;
  static SmoothCorrection constant(const GridSpec& grid, double c);
};

Realization apply_correction(const Realization& mu,
                             const SmoothCorrection& corr);

// Monte Carlo samples of both sides of the rescaling identity for the chaos:
//   lhs_r = <mu at refined cutoff, phi(x / epsilon)>
//   rhs_r = eps^d exp(beta Z - beta^2 Var Z / 2) <mu at base cutoff, phi>,
// with Z ~ N(0, log(1/eps)) and independent fields on the two sides. The two
// sample sets should agree in distribution.
struct ScalingPairSamples {
  std::vector<Complex> lhs;
  std::vector<Complex> rhs;
  Complex beta;
  double epsilon;
  int cutoff;       // base cutoff; lhs runs at cutoff / epsilon
  std::uint64_t seed;
};

ScalingPairSamples scaling_pair_samples(Complex beta, const GridSpec& grid,
                                        Point center, double bump_scale,
                                        double epsilon, int cutoff, int count,
                                        std::uint64_t seed, int threads = 0);

}  // namespace gmclab::chaos

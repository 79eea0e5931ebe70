#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace gmclab::field {

// Log-correlated Gaussian field on the unit torus, synthesized from random
// Fourier modes with an explicit frequency cutoff. The cutoff plays the role
// of the inverse smoothing scale: refining it by a factor 2 adds one octave
// of modes on top of the existing ones (the same (seed, k) pair always yields
// the same coefficient, so fields at nested cutoffs are coupled pathwise).

using Point = std::array<double, 2>;  // d = 1 ignores the second coordinate

struct GridSpec {
  int d;  // 1 or 2
  int m;  // 2^m points per axis; 4..24 for d = 1, 4..12 for d = 2

  GridSpec(int d_, int m_);
  int n() const { return 1 << m; }
  std::size_t size() const;
  double h() const { return 1.0 / n(); }
};

// Kernel the synthesis targets: log(1/|x-y|) plus a smooth remainder on the
// torus, in dimension d.
struct CovarianceModel {
  int d;
};

// Per-mode standard deviation multiplier: the complex coefficient at lattice
// frequency k has variance amplitude(d,k)^2 / 2 per real component pair.
double mode_amplitude(int d, int k1, int k2);

// Normalization of the d = 2 spectrum, frozen after calibrating the mode-sum
// covariance against log(1/|x-y|) (see tests and scripts/calibrate_c2.py);
// analytically 1/(2 pi).
inline constexpr double kC2 = 0.15915494309189535;

struct SpectralField {
  GridSpec grid;
  int cutoff;
  std::uint64_t seed;
  double sigma2;  // variance of the synthesized field at a point
  // d = 1: modes[k-1] for k = 1..cutoff.
  // d = 2: half-spectrum rows k2 = 0..cutoff, columns k1 = -cutoff..cutoff,
  //        index (k1, k2) -> k2 * (2 cutoff + 1) + k1 + cutoff; entries are
  //        zero outside the ball |k| <= cutoff and on the k2 = 0, k1 <= 0
  //        half-row (those frequencies are the conjugates of stored ones).
  std::vector<std::complex<double>> modes;

  std::complex<double> mode1d(int k) const;
  std::complex<double> mode2d(int k1, int k2) const;
};

struct Realization {
  GridSpec grid;
  int cutoff;
  std::uint64_t seed;
  double sigma2;
  std::vector<double> values;  // row-major, x fastest
  double imag_residue;         // max |Im| left over by the synthesis FFT
};

// Draw the spectral coefficients for (grid, cutoff, seed).
SpectralField sample_field(const GridSpec& grid, int cutoff,
                           std::uint64_t seed);

// Evaluate the field on its grid by inverse FFT.
Realization render(const SpectralField& field);

// Forward transform of a rendered grid back to the stored mode layout
// (exact up to roundoff; used to validate the synthesis path).
std::vector<std::complex<double>> recover_modes(const Realization& r,
                                                int cutoff);

// Sum of per-mode variances: the harmonic number H_cutoff for d = 1.
double sigma2_analytic(int d, int cutoff);

// Exact covariance E X(x) X(y) of the cutoff field, by compensated mode
// summation.
double covariance_oracle(const CovarianceModel& model, Point x, Point y,
                         int cutoff);

// Euclidean distance on the torus.
double torus_distance(int d, Point x, Point y);

// Matched samples of the two sides of the rescaling identity
// X(eps x) ~ X(x) + Z, Z ~ N(0, log(1/eps)): `lhs` evaluates a field at
// refined cutoff on the shrunken points, `rhs` an independent field at the
// base cutoff plus the shared Gaussian shift. Covariance matrices of both
// sides come from the oracle so the kernel mismatch is quantified exactly.
struct ScalingCheck {
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> cov_lhs;  // q x q, row-major
  std::vector<double> cov_rhs;
  double z_variance;
  double max_cov_mismatch;
};

ScalingCheck scaling_decomposition_check(const GridSpec& grid, double epsilon,
                                         int cutoff, std::uint64_t seed,
                                         const std::vector<Point>& points);

// Smallest eigenvalue of the Gram matrix [log(1/|x_i - x_j|)] over points in
// R^d with the diagonal set to the given microscale variance. Negative
// output demonstrates the kernel stops being positive definite on that point
// set. At most 2000 points; duplicate points are rejected.
double log_kernel_min_eigenvalue(const std::vector<Point>& points, int d,
                                 double diagonal);

}  // namespace gmclab::field

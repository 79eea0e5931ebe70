#include "gmclab/chaos.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gmclab/parallel.hpp"
#include "gmclab/rng.hpp"

namespace gmclab::chaos {

namespace {

// Beyond this exponent the grid values switch to the factored representation
// exp(w - log_scale); doubles overflow near 709.
constexpr double kLogScaleThreshold = 600.0;

void check_finite_beta(Complex beta) {
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
    throw std::invalid_argument("chaos: beta must be finite");
}

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (a.d != b.d || a.m != b.m)
    throw std::invalid_argument(std::string("chaos: grid mismatch in ") + what);
}

// Displacement x - c per axis, folded to [-1/2, 1/2).
double torus_delta(double x, double c) {
  double t = x - c;
  t -= std::round(t);
  return t;
}

TestFunction make_radial(const GridSpec& grid, TestFunction::Kind kind,
                         Point center, double radius, bool smooth) {
  if (!(radius > 0.0) || radius >= 0.5)
    throw std::invalid_argument(
        "test function: support violation (radius must lie in (0, 1/2))");
  TestFunction f{grid, kind, center, radius, radius, 1.0, {}};
  f.values.resize(grid.size());
  int n = grid.n();
  double h = grid.h();
  std::size_t idx = 0;
  int n2 = grid.d == 2 ? n : 1;
  for (int j2 = 0; j2 < n2; ++j2) {
    double dy = grid.d == 2 ? torus_delta(j2 * h, center[1]) : 0.0;
    for (int j1 = 0; j1 < n; ++j1, ++idx) {
      double dx = torus_delta(j1 * h, center[0]);
      double u2 = (dx * dx + dy * dy) / (radius * radius);
      if (smooth)
        f.values[idx] = u2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u2)) : 0.0;
      else
        f.values[idx] = u2 <= 1.0 ? 1.0 : 0.0;
    }
  }
  return f;
}

}  // namespace

Realization wick_exponential(const field::Realization& x, double sigma2,
                             Complex beta) {
  check_finite_beta(beta);
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
    throw std::invalid_argument("wick_exponential: sigma2 must be >= 0");
  if (std::abs(sigma2 - x.sigma2) > 1e-12 * std::max(1.0, x.sigma2))
    throw std::invalid_argument(
        "wick_exponential: sigma2 does not match the field's cutoff variance");

  Complex half_var = beta * beta * (sigma2 / 2.0);
  Realization mu{x.grid, beta, x.cutoff, x.seed, 0.0, {}};
  mu.values.resize(x.values.size());

  double max_re = 0.0;
  double re_beta = beta.real();
  for (double v : x.values)
    max_re = std::max(max_re, re_beta * v);
  max_re -= half_var.real();
  if (max_re > kLogScaleThreshold) mu.log_scale = max_re;

  Complex shift = half_var + Complex{mu.log_scale, 0.0};
  for (std::size_t i = 0; i < x.values.size(); ++i)
    mu.values[i] = std::exp(beta * x.values[i] - shift);
  return mu;
}

TestFunction TestFunction::smooth_bump(const GridSpec& grid, Point center,
                                       double scale) {
  return make_radial(grid, Kind::kSmoothBump, center, scale, true);
}

TestFunction TestFunction::indicator(const GridSpec& grid, Point center,
                                     double radius) {
  return make_radial(grid, Kind::kIndicator, center, radius, false);
}

TestFunction TestFunction::rescaled_bump(const GridSpec& grid, Point center,
                                         double scale, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("rescaled_bump: epsilon must lie in (0, 1]");
  TestFunction f =
      make_radial(grid, Kind::kRescaledBump, center, scale * epsilon, true);
  return f;
}

TestFunction TestFunction::constant_one(const GridSpec& grid) {
  TestFunction f{grid, Kind::kConstant, {0.0, 0.0}, 0.5, 0.5, 1.0, {}};
  f.values.assign(grid.size(), 1.0);
  return f;
}

TestFunction TestFunction::from_samples(const GridSpec& grid, Kind kind,
                                        std::vector<double> samples) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("from_samples: sample count != grid size");
  double sup = 0.0;
  for (double v : samples) sup = std::max(sup, std::abs(v));
  TestFunction f{grid, kind, {0.0, 0.0}, 0.5, 0.5, sup, std::move(samples)};
  return f;
}

double integral(const TestFunction& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  double h = f.grid.h();
  return sum * (f.grid.d == 1 ? h : h * h);
}

Complex pair(const Realization& mu, const TestFunction& f) {
  check_same_grid(mu.grid, f.grid, "pair");
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < mu.values.size(); ++i)
    sum += mu.values[i] * f.values[i];
  double h = mu.grid.h();
  sum *= (mu.grid.d == 1 ? h : h * h);
  if (mu.log_scale == 0.0) return sum;
  double mag = std::abs(sum);
  if (mag > 0.0 && mu.log_scale + std::log(mag) > 707.0)
    throw std::overflow_error(
        "pair: overflow guard tripped, max Re(beta X) - Re(beta^2) sigma^2/2 = " +
        std::to_string(mu.log_scale));
  return sum * std::exp(mu.log_scale);
}

SmoothCorrection SmoothCorrection::inverse() const {
  SmoothCorrection inv{grid, shift, variance};
  for (double& v : inv.shift) v = -v;
  for (double& v : inv.variance) v = -v;
  return inv;
}

SmoothCorrection SmoothCorrection::constant(const GridSpec& grid, double c) {
  SmoothCorrection corr{grid, {}, {}};
  corr.shift.assign(grid.size(), c);
  corr.variance.assign(grid.size(), 0.0);
  return corr;
}

Realization apply_correction(const Realization& mu,
                             const SmoothCorrection& corr) {
  check_same_grid(mu.grid, corr.grid, "apply_correction");
  if (corr.shift.size() != mu.values.size() ||
      corr.variance.size() != mu.values.size())
    throw std::invalid_argument("apply_correction: sample count mismatch");
  Realization out = mu;
  Complex beta = mu.beta;
  Complex half_beta2 = beta * beta * 0.5;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= std::exp(beta * corr.shift[i] - half_beta2 * corr.variance[i]);
  return out;
}

ScalingPairSamples scaling_pair_samples(Complex beta, const GridSpec& grid,
                                        Point center, double bump_scale,
                                        double epsilon, int cutoff, int count,
                                        std::uint64_t seed, int threads) {
  check_finite_beta(beta);
  if (count < 100)
    throw std::invalid_argument("scaling_pair_samples: need at least 100 samples");
  if (!(bump_scale > 0.0) || bump_scale > 0.25)
    throw std::invalid_argument(
        "scaling_pair_samples: phi must be supported in the ball of radius 1/4");
  double l = std::round(-std::log2(epsilon));
  if (!(epsilon > 0.0) || epsilon > 1.0 ||
      std::abs(epsilon * std::exp2(l) - 1.0) > 1e-12)
    throw std::invalid_argument(
        "scaling_pair_samples: epsilon must be a dyadic fraction 2^-l");
  int level = static_cast<int>(l);
  long long fine_cutoff = static_cast<long long>(cutoff) << level;
  if (cutoff < 1 || fine_cutoff > grid.n() / 2)
    throw std::invalid_argument(
        "scaling_pair_samples: refined cutoff exceeds the grid Nyquist frequency");

  TestFunction phi = TestFunction::smooth_bump(grid, center, bump_scale);
  Point scaled_center{epsilon * center[0], epsilon * center[1]};
  TestFunction phi_eps =
      TestFunction::rescaled_bump(grid, scaled_center, bump_scale, epsilon);

  double z_var = level * std::numbers::ln2;
  double eps_d = grid.d == 1 ? epsilon : epsilon * epsilon;
  Complex rhs_drift = beta * beta * (z_var / 2.0);
  std::uint64_t z_seed = rng::derive_seed(seed, 1);

  ScalingPairSamples out;
  out.beta = beta;
  out.epsilon = epsilon;
  out.cutoff = cutoff;
  out.seed = seed;
  out.lhs.resize(count);
  out.rhs.resize(count);

  double sigma2_fine = field::sigma2_analytic(grid.d, static_cast<int>(fine_cutoff));
  double sigma2_base = field::sigma2_analytic(grid.d, cutoff);

  parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t r) {
    std::uint64_t index = static_cast<std::uint64_t>(r);
    field::SpectralField fine = field::sample_field(
        grid, static_cast<int>(fine_cutoff), rng::derive_seed(seed, 2 * index + 2));
    Realization mu_fine = wick_exponential(field::render(fine), sigma2_fine, beta);
    out.lhs[r] = pair(mu_fine, phi_eps);

    field::SpectralField base = field::sample_field(
        grid, cutoff, rng::derive_seed(seed, 2 * index + 3));
    Realization mu_base = wick_exponential(field::render(base), sigma2_base, beta);
    double z = rng::normal_pair(z_seed, rng::kStreamScalingZ, index).first *
               std::sqrt(z_var);
    out.rhs[r] = eps_d * std::exp(beta * z - rhs_drift) * pair(mu_base, phi);
  });
  return out;
}

}  // namespace gmclab::chaos

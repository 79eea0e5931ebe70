#include "gmclab/field.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gmclab/fft.hpp"
#include "gmclab/rng.hpp"

namespace gmclab::field {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

void check_cutoff(const GridSpec& grid, int cutoff) {
  if (cutoff < 1 || cutoff > grid.n() / 2)
    throw std::invalid_argument(
        "field: cutoff must lie in [1, 2^(m-1)], got " +
        std::to_string(cutoff));
}

void check_model_dim(int d) {
  if (d != 1 && d != 2)
    throw std::invalid_argument("field: dimension must be 1 or 2");
}

// Applies fn(k1, k2) to every stored half-spectrum frequency.
template <typename F>
void for_each_stored_mode(int d, int cutoff, F&& fn) {
  if (d == 1) {
    for (int k = 1; k <= cutoff; ++k) fn(k, 0);
    return;
  }
  long long nn = static_cast<long long>(cutoff) * cutoff;
  for (int k1 = 1; k1 <= cutoff; ++k1) fn(k1, 0);
  for (int k2 = 1; k2 <= cutoff; ++k2)
    for (int k1 = -cutoff; k1 <= cutoff; ++k1)
      if (static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2 <=
          nn)
        fn(k1, k2);
}

std::size_t half_spectrum_size(int d, int cutoff) {
  if (d == 1) return static_cast<std::size_t>(cutoff);
  return static_cast<std::size_t>(cutoff + 1) * (2 * cutoff + 1);
}

std::size_t half_spectrum_index(int cutoff, int k1, int k2) {
  return static_cast<std::size_t>(k2) * (2 * cutoff + 1) +
         static_cast<std::size_t>(k1 + cutoff);
}

}  // namespace

GridSpec::GridSpec(int d_, int m_) : d(d_), m(m_) {
  if (d != 1 && d != 2)
    throw std::invalid_argument("GridSpec: d must be 1 or 2");
  int max_m = d == 1 ? 24 : 12;
  if (m < 4 || m > max_m)
    throw std::invalid_argument("GridSpec: m out of range [4, " +
                                std::to_string(max_m) + "] for d = " +
                                std::to_string(d));
}

std::size_t GridSpec::size() const {
  std::size_t nn = static_cast<std::size_t>(n());
  return d == 1 ? nn : nn * nn;
}

double mode_amplitude(int d, int k1, int k2) {
  check_model_dim(d);
  if (d == 1) {
    if (k1 < 1) throw std::invalid_argument("mode_amplitude: k must be >= 1");
    return 1.0 / std::sqrt(static_cast<double>(k1));
  }
  double n2 = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
  if (n2 == 0.0) throw std::invalid_argument("mode_amplitude: k must be nonzero");
  return std::sqrt(2.0 * kC2 / n2);
}

std::complex<double> SpectralField::mode1d(int k) const {
  if (grid.d != 1 || k < 1 || k > cutoff)
    throw std::out_of_range("SpectralField::mode1d");
  return modes[static_cast<std::size_t>(k - 1)];
}

std::complex<double> SpectralField::mode2d(int k1, int k2) const {
  if (grid.d != 2 || k2 < 0 || k2 > cutoff || k1 < -cutoff || k1 > cutoff)
    throw std::out_of_range("SpectralField::mode2d");
  return modes[half_spectrum_index(cutoff, k1, k2)];
}

SpectralField sample_field(const GridSpec& grid, int cutoff,
                           std::uint64_t seed) {
  check_cutoff(grid, cutoff);
  SpectralField f{grid, cutoff, seed, sigma2_analytic(grid.d, cutoff), {}};
  f.modes.assign(half_spectrum_size(grid.d, cutoff), {0.0, 0.0});
  for_each_stored_mode(grid.d, cutoff, [&](int k1, int k2) {
    auto [a, b] = rng::mode_normal_pair(seed, k1, k2);
    double half_amp = 0.5 * mode_amplitude(grid.d, k1, k2);
    std::complex<double> c{half_amp * a, -half_amp * b};
    if (grid.d == 1)
      f.modes[static_cast<std::size_t>(k1 - 1)] = c;
    else
      f.modes[half_spectrum_index(cutoff, k1, k2)] = c;
  });
  return f;
}

Realization render(const SpectralField& field) {
  const GridSpec& grid = field.grid;
  int n = grid.n();
  std::vector<std::complex<double>> spectrum(grid.size(), {0.0, 0.0});
  auto place = [&](int k1, int k2, std::complex<double> c) {
    int i1 = ((k1 % n) + n) % n;
    int i2 = ((k2 % n) + n) % n;
    std::size_t idx = grid.d == 1
                          ? static_cast<std::size_t>(i1)
                          : static_cast<std::size_t>(i2) * n + i1;
    spectrum[idx] = c;
  };
  for_each_stored_mode(grid.d, field.cutoff, [&](int k1, int k2) {
    std::complex<double> c = grid.d == 1
                                 ? field.modes[static_cast<std::size_t>(k1 - 1)]
                                 : field.modes[half_spectrum_index(
                                       field.cutoff, k1, k2)];
    place(k1, k2, c);
    place(-k1, -k2, std::conj(c));
  });
  fft::inverse(spectrum, grid.d, n);

  Realization r{grid, field.cutoff, field.seed, field.sigma2, {}, 0.0};
  r.values.resize(grid.size());
  double residue = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    r.values[i] = spectrum[i].real();
    residue = std::max(residue, std::abs(spectrum[i].imag()));
  }
  r.imag_residue = residue;
  return r;
}

std::vector<std::complex<double>> recover_modes(const Realization& r,
                                                int cutoff) {
  check_cutoff(r.grid, cutoff);
  int n = r.grid.n();
  std::vector<std::complex<double>> spectrum(r.values.begin(), r.values.end());
  fft::forward(spectrum, r.grid.d, n);
  double scale = 1.0 / static_cast<double>(r.grid.size());
  std::vector<std::complex<double>> out(half_spectrum_size(r.grid.d, cutoff),
                                        {0.0, 0.0});
  for_each_stored_mode(r.grid.d, cutoff, [&](int k1, int k2) {
    int i1 = ((k1 % n) + n) % n;
    int i2 = ((k2 % n) + n) % n;
    std::size_t idx = r.grid.d == 1 ? static_cast<std::size_t>(i1)
                                    : static_cast<std::size_t>(i2) * n + i1;
    std::size_t slot = r.grid.d == 1
                           ? static_cast<std::size_t>(k1 - 1)
                           : half_spectrum_index(cutoff, k1, k2);
    out[slot] = spectrum[idx] * scale;
  });
  return out;
}

double sigma2_analytic(int d, int cutoff) {
  check_model_dim(d);
  if (cutoff < 1) throw std::invalid_argument("sigma2_analytic: cutoff >= 1");
  KahanSum s;
  for_each_stored_mode(d, cutoff, [&](int k1, int k2) {
    double amp = mode_amplitude(d, k1, k2);
    s.add(amp * amp);
  });
  return s.sum;
}

double covariance_oracle(const CovarianceModel& model, Point x, Point y,
                         int cutoff) {
  check_model_dim(model.d);
  if (cutoff < 1) throw std::invalid_argument("covariance_oracle: cutoff >= 1");
  double t1 = x[0] - y[0];
  double t2 = model.d == 2 ? x[1] - y[1] : 0.0;
  KahanSum s;
  for_each_stored_mode(model.d, cutoff, [&](int k1, int k2) {
    double amp = mode_amplitude(model.d, k1, k2);
    s.add(amp * amp * std::cos(kTwoPi * (k1 * t1 + k2 * t2)));
  });
  return s.sum;
}

double torus_distance(int d, Point x, Point y) {
  check_model_dim(d);
  double acc = 0.0;
  for (int a = 0; a < d; ++a) {
    double t = std::abs(x[a] - y[a]);
    t -= std::floor(t);
    t = std::min(t, 1.0 - t);
    acc += t * t;
  }
  return std::sqrt(acc);
}

namespace {

int dyadic_level(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  double l = std::round(-std::log2(epsilon));
  if (std::abs(epsilon * std::exp2(l) - 1.0) > 1e-12)
    throw std::invalid_argument("epsilon must be a dyadic fraction 2^-l");
  return static_cast<int>(l);
}

std::size_t grid_index_of(const GridSpec& grid, Point x, int subgrid_log2) {
  int n = grid.n();
  std::size_t idx = 0;
  for (int a = grid.d - 1; a >= 0; --a) {
    double pos = x[a] * n;
    double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 * n ||
        std::fmod(std::abs(r), std::exp2(subgrid_log2)) != 0.0)
      throw std::invalid_argument(
          "scaling check: points must sit on the 2^l-coarse subgrid");
    long long cell = static_cast<long long>(r);
    int wrapped = static_cast<int>(((cell % n) + n) % n);
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(wrapped);
  }
  return idx;
}

}  // namespace

ScalingCheck scaling_decomposition_check(const GridSpec& grid, double epsilon,
                                         int cutoff, std::uint64_t seed,
                                         const std::vector<Point>& points) {
  int level = dyadic_level(epsilon);
  long long fine_cutoff = static_cast<long long>(cutoff) << level;
  if (fine_cutoff > grid.n() / 2)
    throw std::invalid_argument(
        "scaling check: refined cutoff exceeds the grid Nyquist frequency");
  for (const Point& x : points) {
    double norm = std::max(std::abs(x[0]), grid.d == 2 ? std::abs(x[1]) : 0.0);
    if (norm > 0.25)
      throw std::invalid_argument(
          "scaling check: points escape the ball where both sides are valid");
  }

  ScalingCheck out;
  std::size_t q = points.size();
  out.z_variance = level * std::numbers::ln2;

  SpectralField fine = sample_field(grid, static_cast<int>(fine_cutoff),
                                    rng::derive_seed(seed, 1));
  Realization fine_r = render(fine);
  SpectralField base = sample_field(grid, cutoff, rng::derive_seed(seed, 2));
  Realization base_r = render(base);
  double z = rng::normal_pair(rng::derive_seed(seed, 3), rng::kStreamScalingZ, 0)
                 .first *
             std::sqrt(out.z_variance);

  out.lhs.reserve(q);
  out.rhs.reserve(q);
  for (const Point& x : points) {
    Point scaled{epsilon * x[0], epsilon * x[1]};
    out.lhs.push_back(fine_r.values[grid_index_of(grid, scaled, 0)]);
    out.rhs.push_back(base_r.values[grid_index_of(grid, x, level)] + z);
  }

  CovarianceModel model{grid.d};
  out.cov_lhs.resize(q * q);
  out.cov_rhs.resize(q * q);
  out.max_cov_mismatch = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      Point si{epsilon * points[i][0], epsilon * points[i][1]};
      Point sj{epsilon * points[j][0], epsilon * points[j][1]};
      double cl = covariance_oracle(model, si, sj, static_cast<int>(fine_cutoff));
      double cr =
          covariance_oracle(model, points[i], points[j], cutoff) + out.z_variance;
      out.cov_lhs[i * q + j] = cl;
      out.cov_rhs[i * q + j] = cr;
      out.max_cov_mismatch = std::max(out.max_cov_mismatch, std::abs(cl - cr));
    }
  }
  return out;
}

double log_kernel_min_eigenvalue(const std::vector<Point>& points, int d,
                                 double diagonal) {
  check_model_dim(d);
  std::size_t q = points.size();
  if (q < 2) throw std::invalid_argument("log kernel probe: need >= 2 points");
  if (q > 2000)
    throw std::invalid_argument("log kernel probe: at most 2000 points");
  Eigen::MatrixXd gram(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    gram(i, i) = diagonal;
    for (std::size_t j = i + 1; j < q; ++j) {
      double dx = points[i][0] - points[j][0];
      double dy = d == 2 ? points[i][1] - points[j][1] : 0.0;
      double r = std::sqrt(dx * dx + dy * dy);
      if (r == 0.0)
        throw std::invalid_argument("log kernel probe: duplicate points");
      gram(i, j) = gram(j, i) = -std::log(r);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace gmclab::field

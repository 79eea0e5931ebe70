#include "gmclab/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "gmclab/chaos.hpp"
#include "gmclab/parallel.hpp"
#include "gmclab/regions.hpp"
#include "gmclab/rng.hpp"

namespace gmclab::wavelets {

namespace {

// Extremal-phase scaling filters, h[0] multiplying the current sample.
// Regenerate with scripts/gen_filters.py (80-digit spectral factorization);
// the tests pin sum h = sqrt(2), shift orthogonality and the vanishing
// moments of the quadrature mirror.
const std::vector<double> kDb2 = {
    0.48296291314453414337, 0.83651630373780790558,
    0.22414386804201338103, -0.12940952255126038117};

const std::vector<double> kDb4 = {
    0.23037781330889650086,   0.71484657055291564709,
    0.63088076792985890788,   -0.027983769416859854211,
    -0.18703481171909308408,  0.030841381835560763627,
    0.032883011666885199735,  -0.010597401785069032105};

const std::vector<double> kDb6 = {
    0.11154074335010946362,    0.49462389039845308568,
    0.75113390802109535068,    0.31525035170919762909,
    -0.22626469396543982008,   -0.12976686756726193556,
    0.097501605587323049102,   0.027522865530305728626,
    -0.031582039317486029565,  0.00055384220116149613925,
    0.0047772575109455106396,  -0.0010773010853084795649};

const std::vector<double> kDb8 = {
    0.054415842243104009955,   0.31287159091429997066,
    0.67563073629728980681,    0.58535468365420671277,
    -0.015829105256349305667,  -0.28401554296154692652,
    0.00047248457391328277036, 0.12874742662047845886,
    -0.01736930100180754617,   -0.044088253930794751507,
    0.013981027917398281649,   0.0087460940474057767164,
    -0.0048703529934515743104, -0.0003917403733769470463,
    0.00067544940645056936637, -0.00011747678412476953373};

// Holder exponents of the scaling functions (standard regularity tables,
// truncated downward so the guarantee R > |s| errs on the safe side).
constexpr double kSmoothDb2 = 0.55;
constexpr double kSmoothDb4 = 1.61;
constexpr double kSmoothDb6 = 2.18;
constexpr double kSmoothDb8 = 2.76;

int ceil_log2(int x) {
  int p = 0;
  while ((1 << p) < x) ++p;
  return p;
}

// One analysis split of a length-n circular signal into half-length
// approximation and detail, a'[i] = sum_t h[t] a[(2i+t) mod n].
void analyze_1d(const Complex* in, Complex* approx, Complex* detail, int n,
                const std::vector<double>& h, const std::vector<double>& g) {
  const int half = n / 2;
  const int len = static_cast<int>(h.size());
  for (int i = 0; i < half; ++i) {
    Complex a{0.0, 0.0};
    Complex d{0.0, 0.0};
    for (int t = 0; t < len; ++t) {
      const Complex v = in[(2 * i + t) % n];
      a += h[t] * v;
      d += g[t] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

// Adjoint of analyze_1d; exact inverse because the filter bank is orthogonal.
void synthesize_1d(const Complex* approx, const Complex* detail, Complex* out,
                   int n, const std::vector<double>& h,
                   const std::vector<double>& g) {
  const int half = n / 2;
  const int len = static_cast<int>(h.size());
  std::fill(out, out + n, Complex{0.0, 0.0});
  for (int i = 0; i < half; ++i) {
    for (int t = 0; t < len; ++t) {
      out[(2 * i + t) % n] += h[t] * approx[i] + g[t] * detail[i];
    }
  }
}

// Separable step on an n x n block (row-major, x fastest): rows first, then
// columns. Quadrants map to bands as 0 = x-detail, 1 = y-detail, 2 = diagonal.
void analyze_2d(const std::vector<Complex>& cur, int n,
                const std::vector<double>& h, const std::vector<double>& g,
                std::vector<Complex>& ll,
                std::array<std::vector<Complex>, 3>& bands) {
  const int half = n / 2;
  std::vector<Complex> tl(static_cast<std::size_t>(half) * n);
  std::vector<Complex> th(static_cast<std::size_t>(half) * n);
  std::vector<Complex> arow(half), drow(half);
  for (int y = 0; y < n; ++y) {
    analyze_1d(&cur[static_cast<std::size_t>(y) * n], arow.data(), drow.data(),
               n, h, g);
    std::copy(arow.begin(), arow.end(),
              tl.begin() + static_cast<std::size_t>(y) * half);
    std::copy(drow.begin(), drow.end(),
              th.begin() + static_cast<std::size_t>(y) * half);
  }
  ll.assign(static_cast<std::size_t>(half) * half, Complex{0.0, 0.0});
  for (auto& b : bands) b.assign(static_cast<std::size_t>(half) * half, Complex{0.0, 0.0});
  std::vector<Complex> col(n), ca(half), cd(half);
  for (int x = 0; x < half; ++x) {
    for (int y = 0; y < n; ++y) col[y] = tl[static_cast<std::size_t>(y) * half + x];
    analyze_1d(col.data(), ca.data(), cd.data(), n, h, g);
    for (int y = 0; y < half; ++y) {
      ll[static_cast<std::size_t>(y) * half + x] = ca[y];
      bands[1][static_cast<std::size_t>(y) * half + x] = cd[y];
    }
    for (int y = 0; y < n; ++y) col[y] = th[static_cast<std::size_t>(y) * half + x];
    analyze_1d(col.data(), ca.data(), cd.data(), n, h, g);
    for (int y = 0; y < half; ++y) {
      bands[0][static_cast<std::size_t>(y) * half + x] = ca[y];
      bands[2][static_cast<std::size_t>(y) * half + x] = cd[y];
    }
  }
}

void synthesize_2d(const std::vector<Complex>& ll,
                   const std::array<const std::vector<Complex>*, 3>& bands,
                   int n_out, const std::vector<double>& h,
                   const std::vector<double>& g, std::vector<Complex>& out) {
  const int half = n_out / 2;
  std::vector<Complex> tl(static_cast<std::size_t>(half) * n_out);
  std::vector<Complex> th(static_cast<std::size_t>(half) * n_out);
  std::vector<Complex> ca(half), cd(half), col(n_out);
  for (int x = 0; x < half; ++x) {
    for (int y = 0; y < half; ++y) {
      ca[y] = ll[static_cast<std::size_t>(y) * half + x];
      cd[y] = (*bands[1])[static_cast<std::size_t>(y) * half + x];
    }
    synthesize_1d(ca.data(), cd.data(), col.data(), n_out, h, g);
    for (int y = 0; y < n_out; ++y) tl[static_cast<std::size_t>(y) * half + x] = col[y];
    for (int y = 0; y < half; ++y) {
      ca[y] = (*bands[0])[static_cast<std::size_t>(y) * half + x];
      cd[y] = (*bands[2])[static_cast<std::size_t>(y) * half + x];
    }
    synthesize_1d(ca.data(), cd.data(), col.data(), n_out, h, g);
    for (int y = 0; y < n_out; ++y) th[static_cast<std::size_t>(y) * half + x] = col[y];
  }
  out.assign(static_cast<std::size_t>(n_out) * n_out, Complex{0.0, 0.0});
  for (int y = 0; y < n_out; ++y) {
    synthesize_1d(&tl[static_cast<std::size_t>(y) * half],
                  &th[static_cast<std::size_t>(y) * half],
                  &out[static_cast<std::size_t>(y) * n_out], n_out, h, g);
  }
}

void check_probe_order(double p) {
  if (std::isnan(p) || (p < 1.0 && p != std::numeric_limits<double>::infinity()))
    throw std::invalid_argument("summability order p must be >= 1 (or inf)");
}

double inv_order(double p) {
  return std::isinf(p) ? 0.0 : 1.0 / p;
}

struct FitResult {
  double slope;
  double stderr_;
};

// Ordinary least squares of y against x with the textbook slope standard
// error; needs at least 3 points for a residual degree of freedom.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("degenerate abscissae in level fit");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - intercept - slope * x[i];
    ssr += r * r;
  }
  double se = 0.0;
  if (n > 2) se = std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx);
  return {slope, se};
}

}  // namespace

Basis Basis::daubechies(int vanishing_moments) {
  switch (vanishing_moments) {
    case 2:
      return Basis{"db2", kDb2, 2, kSmoothDb2};
    case 4:
      return Basis{"db4", kDb4, 4, kSmoothDb4};
    case 6:
      return Basis{"db6", kDb6, 6, kSmoothDb6};
    case 8:
      return Basis{"db8", kDb8, 8, kSmoothDb8};
    default:
      throw std::invalid_argument(
          "only db2, db4, db6, db8 filters are shipped");
  }
}

const std::vector<std::string>& Basis::shipped_ids() {
  static const std::vector<std::string> ids = {"db2", "db4", "db6", "db8"};
  return ids;
}

Basis Basis::from_id(const std::string& id) {
  if (id == "db2") return daubechies(2);
  if (id == "db4") return daubechies(4);
  if (id == "db6") return daubechies(6);
  if (id == "db8") return daubechies(8);
  throw std::invalid_argument("unknown wavelet basis '" + id +
                              "' (shipped: db2, db4, db6, db8)");
}

std::vector<double> Basis::highpass() const {
  const int len = support_length();
  std::vector<double> g(len);
  for (int t = 0; t < len; ++t) {
    const double sign = (t % 2 == 0) ? 1.0 : -1.0;
    g[t] = sign * lowpass[len - 1 - t];
  }
  return g;
}

int Basis::max_levels(const GridSpec& grid) const {
  // The coarsest block must still hold one full filter period.
  return grid.m - ceil_log2(support_length());
}

Decomposition dwt_forward(const std::vector<Complex>& samples,
                          const GridSpec& grid, const Basis& basis,
                          int depth) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("sample count does not match the grid");
  const int deepest = basis.max_levels(grid);
  if (depth < 1 || depth > deepest)
    throw std::invalid_argument(
        "pyramid depth must be between 1 and m - ceil(log2 L) = " +
        std::to_string(deepest) + " for " + basis.id);
  const std::vector<double> h = basis.lowpass;
  const std::vector<double> g = basis.highpass();

  Decomposition dec{grid, basis, grid.m - depth, {}, {}};
  dec.detail.reserve(static_cast<std::size_t>(depth));

  // Finest scaling coefficients are the samples times h^{d/2}.
  const double norm = std::pow(grid.h(), 0.5 * grid.d);
  std::vector<Complex> cur(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) cur[i] = norm * samples[i];

  int n = grid.n();
  for (int step = 0; step < depth; ++step) {
    const int j = grid.m - 1 - step;  // level of the details produced now
    if (grid.d == 1) {
      const int half = n / 2;
      std::vector<Complex> approx(half), det(half);
      analyze_1d(cur.data(), approx.data(), det.data(), n, h, g);
      Level lvl{j, {}};
      lvl.bands.push_back(std::move(det));
      dec.detail.push_back(std::move(lvl));
      cur = std::move(approx);
    } else {
      std::vector<Complex> ll;
      std::array<std::vector<Complex>, 3> bands;
      analyze_2d(cur, n, h, g, ll, bands);
      Level lvl{j, {}};
      for (auto& b : bands) lvl.bands.push_back(std::move(b));
      dec.detail.push_back(std::move(lvl));
      cur = std::move(ll);
    }
    n /= 2;
  }
  std::reverse(dec.detail.begin(), dec.detail.end());
  dec.scaling = std::move(cur);
  return dec;
}

Decomposition dwt_forward(const std::vector<double>& samples,
                          const GridSpec& grid, const Basis& basis,
                          int depth) {
  std::vector<Complex> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) z[i] = Complex{samples[i], 0.0};
  return dwt_forward(z, grid, basis, depth);
}

std::vector<Complex> dwt_inverse(const Decomposition& dec) {
  const std::vector<double> h = dec.basis.lowpass;
  const std::vector<double> g = dec.basis.highpass();
  std::vector<Complex> cur = dec.scaling;
  int n = 1 << dec.coarse_level;
  for (const Level& lvl : dec.detail) {
    const int n_out = 2 * n;
    if (dec.grid.d == 1) {
      if (lvl.bands.size() != 1 || lvl.bands[0].size() != cur.size())
        throw std::invalid_argument("detail level shape mismatch");
      std::vector<Complex> out(n_out);
      synthesize_1d(cur.data(), lvl.bands[0].data(), out.data(), n_out, h, g);
      cur = std::move(out);
    } else {
      if (lvl.bands.size() != 3)
        throw std::invalid_argument("detail level shape mismatch");
      for (const auto& b : lvl.bands)
        if (b.size() != cur.size())
          throw std::invalid_argument("detail level shape mismatch");
      std::array<const std::vector<Complex>*, 3> bands = {
          &lvl.bands[0], &lvl.bands[1], &lvl.bands[2]};
      std::vector<Complex> out;
      synthesize_2d(cur, bands, n_out, h, g, out);
      cur = std::move(out);
    }
    n = n_out;
  }
  if (n != dec.grid.n())
    throw std::invalid_argument("decomposition does not reach the grid size");
  const double norm = std::pow(dec.grid.h(), 0.5 * dec.grid.d);
  for (auto& v : cur) v /= norm;
  return cur;
}

std::vector<double> synthesize_wavelet(const GridSpec& grid,
                                       const Basis& basis, int j,
                                       std::array<int, 2> k, int orientation) {
  const int j_min = grid.m - basis.max_levels(grid);
  if (j < j_min || j >= grid.m)
    throw std::invalid_argument("wavelet level out of range for this grid");
  const int nj = 1 << j;
  const int bands_per_level = (grid.d == 1) ? 1 : 3;
  if (grid.d == 1) orientation = 0;
  if (orientation < 0 || orientation >= bands_per_level)
    throw std::invalid_argument("orientation out of range");
  if (k[0] < 0 || k[0] >= nj || (grid.d == 2 && (k[1] < 0 || k[1] >= nj)))
    throw std::invalid_argument("wavelet shift out of range");

  Decomposition dec{grid, basis, j, {}, {}};
  const std::size_t coarse = (grid.d == 1)
                                 ? static_cast<std::size_t>(nj)
                                 : static_cast<std::size_t>(nj) * nj;
  dec.scaling.assign(coarse, Complex{0.0, 0.0});
  int nn = nj;
  for (int lvl = j; lvl < grid.m; ++lvl) {
    const std::size_t sz = (grid.d == 1)
                               ? static_cast<std::size_t>(nn)
                               : static_cast<std::size_t>(nn) * nn;
    Level l{lvl, {}};
    for (int b = 0; b < bands_per_level; ++b)
      l.bands.emplace_back(sz, Complex{0.0, 0.0});
    dec.detail.push_back(std::move(l));
    nn *= 2;
  }
  const std::size_t idx = (grid.d == 1)
                              ? static_cast<std::size_t>(k[0])
                              : static_cast<std::size_t>(k[1]) * nj + k[0];
  dec.detail.front().bands[orientation][idx] = Complex{1.0, 0.0};

  const std::vector<Complex> vals = dwt_inverse(dec);
  std::vector<double> out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i].real();
  return out;
}

LevelStats make_level_stats(int j, std::size_t count, double sum_abs_p,
                            double p, double s, int d) {
  if (std::isinf(p))
    throw std::invalid_argument("make_level_stats needs a finite order");
  check_probe_order(p);
  if (sum_abs_p < 0.0)
    throw std::invalid_argument("negative power sum");
  const double s_j = std::pow(sum_abs_p, 1.0 / p);
  const double expo = d * j * (0.5 - inv_order(p)) + j * s;
  return LevelStats{j, count, s_j, std::exp2(expo) * s_j};
}

std::vector<LevelStats> level_stats(const Decomposition& dec, double p,
                                    double s) {
  check_probe_order(p);
  std::vector<LevelStats> out;
  out.reserve(dec.detail.size());
  for (const Level& lvl : dec.detail) {
    std::size_t count = 0;
    double acc = 0.0;
    for (const auto& band : lvl.bands) {
      count += band.size();
      if (std::isinf(p)) {
        for (const Complex& a : band) acc = std::max(acc, std::abs(a));
      } else {
        for (const Complex& a : band) acc += std::pow(std::abs(a), p);
      }
    }
    const double s_j = std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
    const double expo = dec.grid.d * lvl.j * (0.5 - inv_order(p)) + lvl.j * s;
    out.push_back(LevelStats{lvl.j, count, s_j, std::exp2(expo) * s_j});
  }
  return out;
}

std::pair<int, int> regression_window(int j_coarse, int j_fine) {
  const int lo = j_coarse + 2;
  const int hi = j_fine - 1;
  if (hi - lo + 1 < 4)
    throw std::domain_error(
        "regression window too short: need at least 4 detail levels after "
        "dropping the two coarsest and the finest");
  return {lo, hi};
}

RegularityEstimate regularity_estimate(const std::vector<LevelStats>& stats,
                                       double p, int d) {
  check_probe_order(p);
  if (stats.size() < 4)
    throw std::invalid_argument("regularity fit needs at least 4 levels");
  std::vector<double> xs, ys;
  xs.reserve(stats.size());
  ys.reserve(stats.size());
  int j_lo = stats.front().j, j_hi = stats.front().j;
  bool smooth = false;
  for (const LevelStats& st : stats) {
    j_lo = std::min(j_lo, st.j);
    j_hi = std::max(j_hi, st.j);
    const double y = std::log2(st.s_j);
    if (!(st.s_j > 0.0) || !std::isfinite(y)) {
      smooth = true;
      continue;
    }
    xs.push_back(static_cast<double>(st.j));
    ys.push_back(y);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (smooth) {
    // Some level carries no energy at all: the input is smoother than any
    // regularity this probe can resolve.
    return RegularityEstimate{nan, nan, nan, j_lo, j_hi, true};
  }
  const FitResult fit = fit_line(xs, ys);
  const double s_hat = -(d * (0.5 - inv_order(p)) + fit.slope);
  return RegularityEstimate{s_hat, fit.slope, fit.stderr_, j_lo, j_hi, false};
}

double predicted_moment_slope(Complex beta, double r, int d) {
  const double a = beta.real(), b = beta.imag();
  return 0.5 * r * (r - 1.0) * a * a + 0.5 * r * b * b - 0.5 * d * r;
}

double predicted_level_exponent(Complex beta, double p, double s, int d) {
  const double r = regions::optimal_r(beta, p, d);
  return r * regions::gamma_exponent(r, s, p, beta, d);
}

BesovEstimate besov_estimate(Complex beta, const GridSpec& grid, int cutoff,
                             const Basis& basis, int depth, double p,
                             int count, std::uint64_t seed, int threads) {
  if (std::isinf(p))
    throw std::invalid_argument(
        "the Monte Carlo regularity estimate needs a finite order");
  check_probe_order(p);
  if (count < 2)
    throw std::invalid_argument("need at least 2 realizations");
  const int j0 = grid.m - depth;
  const auto window = regression_window(j0, grid.m - 1);

  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(count),
      std::vector<double>(static_cast<std::size_t>(depth), 0.0));
  parallel_for(
      static_cast<std::size_t>(count), threads, [&](std::size_t idx) {
        const auto f = field::sample_field(
            grid, cutoff, rng::derive_seed(seed, idx + 1));
        const auto real = field::render(f);
        const auto mu = chaos::wick_exponential(real, f.sigma2, beta);
        if (mu.log_scale != 0.0)
          throw std::overflow_error(
              "normalized exponential overflows at this cutoff; lower the "
              "cutoff or move beta");
        const Decomposition dec = dwt_forward(mu.values, grid, basis, depth);
        for (std::size_t li = 0; li < dec.detail.size(); ++li) {
          double acc = 0.0;
          for (const auto& band : dec.detail[li].bands)
            for (const Complex& a : band) acc += std::pow(std::abs(a), p);
          rows[idx][li] = acc;
        }
      });

  // Mean of the level power sums across realizations, reduced in index
  // order so the result is thread-count independent.
  std::vector<double> mean_sum(static_cast<std::size_t>(depth), 0.0);
  for (int idx = 0; idx < count; ++idx)
    for (int li = 0; li < depth; ++li)
      mean_sum[static_cast<std::size_t>(li)] += rows[idx][li];
  for (double& v : mean_sum) v /= static_cast<double>(count);

  const auto coef_count = [&](int j) {
    return static_cast<std::size_t>((grid.d == 1 ? 1.0 : 3.0) *
                                    std::exp2(grid.d * j));
  };

  BesovEstimate out;
  std::vector<LevelStats> window_stats;
  for (int li = 0; li < depth; ++li) {
    const int j = j0 + li;
    if (j < window.first || j > window.second) continue;
    window_stats.push_back(make_level_stats(
        j, coef_count(j), mean_sum[static_cast<std::size_t>(li)], p, 0.0,
        grid.d));
  }
  out.estimate = regularity_estimate(window_stats, p, grid.d);
  out.window = window;
  const double s_final = out.estimate.smooth_input ? 0.0 : out.estimate.s_hat;
  for (int li = 0; li < depth; ++li) {
    const int j = j0 + li;
    out.stats.push_back(make_level_stats(
        j, coef_count(j), mean_sum[static_cast<std::size_t>(li)], p, s_final,
        grid.d));
  }
  out.s_predicted = regions::in_ea(beta, grid.d)
                        ? regions::besov_threshold(beta, p, grid.d)
                        : std::numeric_limits<double>::quiet_NaN();
  return out;
}

MomentScaling wavelet_moment_scaling(Complex beta, double r,
                                     const GridSpec& grid, int cutoff,
                                     const Basis& basis, int depth, int count,
                                     std::uint64_t seed, int threads) {
  if (!(r >= 1.0) || !std::isfinite(r))
    throw std::invalid_argument("moment order r must be a finite value >= 1");
  if (!regions::in_eap(beta, r, grid.d))
    throw std::domain_error(
        "moment order r lies outside the finite-moment region for this beta");
  if (count < 2)
    throw std::invalid_argument("need at least 2 realizations");
  const int j0 = grid.m - depth;
  const auto [j_lo, j_hi] = regression_window(j0, grid.m - 1);

  // Every realization fills its own per-level row; the rows are reduced in
  // index order afterwards so the result is identical for any thread count.
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(count),
      std::vector<double>(static_cast<std::size_t>(depth), 0.0));
  parallel_for(
      static_cast<std::size_t>(count), threads, [&](std::size_t idx) {
        const auto f = field::sample_field(
            grid, cutoff, rng::derive_seed(seed, idx + 1));
        const auto real = field::render(f);
        const auto mu = chaos::wick_exponential(real, f.sigma2, beta);
        if (mu.log_scale != 0.0)
          throw std::overflow_error(
              "normalized exponential overflows at this cutoff; lower the "
              "cutoff or move beta");
        const Decomposition dec = dwt_forward(mu.values, grid, basis, depth);
        for (std::size_t li = 0; li < dec.detail.size(); ++li) {
          double acc = 0.0;
          for (const auto& band : dec.detail[li].bands)
            for (const Complex& a : band) acc += std::pow(std::abs(a), r);
          rows[idx][li] = acc;
        }
      });

  MomentScaling out;
  out.predicted = predicted_moment_slope(beta, r, grid.d);
  std::vector<double> xs, ys;
  for (int li = 0; li < depth; ++li) {
    const int j = j0 + li;
    if (j < j_lo || j > j_hi) continue;
    double total = 0.0;
    for (int idx = 0; idx < count; ++idx) total += rows[idx][li];
    const double n_coef =
        (grid.d == 1 ? 1.0 : 3.0) * std::exp2(static_cast<double>(grid.d * j));
    const double mean = total / (static_cast<double>(count) * n_coef);
    if (!(mean > 0.0))
      throw std::runtime_error("vanishing level moment; fit impossible");
    out.levels.push_back(j);
    out.log2_mean_moment.push_back(std::log2(mean));
    xs.push_back(static_cast<double>(j));
    ys.push_back(std::log2(mean));
  }
  const FitResult fit = fit_line(xs, ys);
  out.slope = fit.slope;
  out.stderr_ = fit.stderr_;
  return out;
}

}  // namespace gmclab::wavelets

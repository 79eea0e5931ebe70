#include "gmclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "gmclab/rng.hpp"

namespace gmclab::stats {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::invalid_argument(std::string(what) + " contains a non-finite value");
}

bool is_constant(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return false;
  return true;
}

double stephens_lambda(double effective_n, double d) {
  const double rn = std::sqrt(effective_n);
  return (rn + 0.12 + 0.11 / rn) * d;
}

// Hill estimate from the top k+1 order statistics of a descending-sorted
// sample: k / sum log(X_(i) / X_(k+1)).
double hill_from_sorted(const std::vector<double>& desc, int k) {
  const double pivot = desc[static_cast<std::size_t>(k)];
  if (!(pivot > 0.0))
    throw std::invalid_argument(
        "tail order statistics must be positive for the Hill estimator");
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::log(desc[static_cast<std::size_t>(i)] / pivot);
  if (!(acc > 0.0))
    throw std::invalid_argument("degenerate (tied) tail order statistics");
  return static_cast<double>(k) / acc;
}

double percentile(std::vector<double>& sorted_values, double q) {
  const double pos = q * (static_cast<double>(sorted_values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted_values[lo] + w * sorted_values[hi];
}

}  // namespace

double ks_tail_probability(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  double prev = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term <= 1e-8 * prev || term <= 1e-12 * std::abs(sum))
      return std::clamp(2.0 * sum, 0.0, 1.0);
    prev = term;
    sign = -sign;
  }
  return 1.0;  // series failed to converge, which only happens deep at p ~ 1
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 100 || b.size() < 100)
    throw std::invalid_argument("KS test needs at least 100 values per sample");
  check_finite(a, "first sample");
  check_finite(b, "second sample");
  if (is_constant(a) || is_constant(b))
    throw std::invalid_argument("KS test given a degenerate constant sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double va = a[i];
    const double vb = b[j];
    if (va <= vb) fa = static_cast<double>(++i) / n;
    if (vb <= va) fb = static_cast<double>(++j) / m;
    d = std::max(d, std::abs(fa - fb));
  }
  const double ne = n * m / (n + m);
  return KsResult{d, ks_tail_probability(stephens_lambda(ne, d)), a.size(),
                  b.size()};
}

KsResult ks_one_sample_uniform(std::vector<double> a) {
  if (a.size() < 10)
    throw std::invalid_argument("uniformity test needs at least 10 values");
  check_finite(a, "sample");
  std::sort(a.begin(), a.end());
  if (a.front() < 0.0 || a.back() > 1.0)
    throw std::invalid_argument("uniformity test values must lie in [0, 1]");
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double hi = static_cast<double>(i + 1) / n - a[i];
    const double lo = a[i] - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return KsResult{d, ks_tail_probability(stephens_lambda(n, d)), a.size(), 0};
}

std::array<KsResult, 3> ks_re_im_mod(
    const std::vector<std::complex<double>>& a,
    const std::vector<std::complex<double>>& b) {
  std::vector<double> ar(a.size()), ai(a.size()), am(a.size());
  std::vector<double> br(b.size()), bi(b.size()), bm(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ar[i] = a[i].real();
    ai[i] = a[i].imag();
    am[i] = std::abs(a[i]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    br[i] = b[i].real();
    bi[i] = b[i].imag();
    bm[i] = std::abs(b[i]);
  }
  return {ks_two_sample(std::move(ar), std::move(br)),
          ks_two_sample(std::move(ai), std::move(bi)),
          ks_two_sample(std::move(am), std::move(bm))};
}

BootstrapCi bootstrap_mean(const std::vector<double>& samples, int resamples,
                           double level, std::uint64_t seed) {
  if (samples.size() < 2)
    throw std::invalid_argument("bootstrap needs at least 2 samples");
  if (resamples < 100)
    throw std::invalid_argument("bootstrap needs at least 100 resamples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  check_finite(samples, "bootstrap input");
  const std::size_t n = samples.size();
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);

  rng::Stream stream(seed, rng::kStreamBootstrap);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = std::min(
          n - 1, static_cast<std::size_t>(stream.uniform() * static_cast<double>(n)));
      acc += samples[idx];
    }
    means[static_cast<std::size_t>(b)] = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - level);
  return BootstrapCi{mean, percentile(means, tail), percentile(means, 1.0 - tail),
                     resamples, level};
}

TailReport tail_index(const std::vector<double>& samples,
                      const std::vector<int>& ks, int resamples,
                      std::uint64_t seed) {
  const int m = static_cast<int>(samples.size());
  if (ks.empty()) throw std::invalid_argument("empty order-statistics ladder");
  if (resamples < 100)
    throw std::invalid_argument("bootstrap needs at least 100 resamples");
  check_finite(samples, "tail sample");
  std::vector<int> ladder_ks = ks;
  std::sort(ladder_ks.begin(), ladder_ks.end());
  for (int k : ladder_ks)
    if (k < 50 || k > m / 10)
      throw std::invalid_argument(
          "order-statistics count must satisfy 50 <= k <= M/10 (M = " +
          std::to_string(m) + ", k = " + std::to_string(k) + ")");

  std::vector<double> desc = samples;
  std::sort(desc.begin(), desc.end(), std::greater<double>());

  TailReport report;
  rng::Stream stream(seed, rng::kStreamBootstrap);
  for (int k : ladder_ks) {
    const double alpha = hill_from_sorted(desc, k);
    // Bootstrap the k log-excesses over the pivot; under a power tail they
    // are approximately iid exponential with mean 1/alpha.
    const double pivot = desc[static_cast<std::size_t>(k)];
    std::vector<double> excess(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      excess[static_cast<std::size_t>(i)] =
          std::log(desc[static_cast<std::size_t>(i)] / pivot);
    std::vector<double> boot(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        const std::size_t idx = std::min(
            static_cast<std::size_t>(k - 1),
            static_cast<std::size_t>(stream.uniform() * static_cast<double>(k)));
        acc += excess[idx];
      }
      boot[static_cast<std::size_t>(b)] = static_cast<double>(k) / acc;
    }
    std::sort(boot.begin(), boot.end());
    report.ladder.push_back(HillPoint{k, alpha, alpha / std::sqrt(double(k)),
                                      percentile(boot, 0.025),
                                      percentile(boot, 0.975)});
  }

  const HillPoint& deepest = report.ladder.front();
  const HillPoint& shallowest = report.ladder.back();
  const double denom =
      std::sqrt(deepest.se * deepest.se + shallowest.se * shallowest.se);
  report.drift_z = (deepest.alpha_hat - shallowest.alpha_hat) / denom;
  report.plateau = std::abs(report.drift_z) < 3.0;
  bool increasing = report.ladder.size() > 1;
  for (std::size_t i = 0; i + 1 < report.ladder.size(); ++i)
    increasing = increasing &&
                 (report.ladder[i].alpha_hat > report.ladder[i + 1].alpha_hat);
  report.increases_toward_tail = increasing;
  return report;
}

TailReport tail_index(const std::vector<double>& samples, std::uint64_t seed) {
  const int m = static_cast<int>(samples.size());
  return tail_index(samples, {m / 100, m / 50, m / 20}, 1000, seed);
}

bool no_finite_tail_below(const TailReport& report, double threshold) {
  if (report.ladder.empty()) return false;
  bool all_above = true;
  for (const HillPoint& pt : report.ladder)
    all_above = all_above && (pt.alpha_hat >= threshold);
  const bool deepest_above = report.ladder.front().ci_lo >= threshold;
  return !report.plateau && report.increases_toward_tail &&
         (deepest_above || all_above);
}

}  // namespace gmclab::stats

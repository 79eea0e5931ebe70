#include "gmclab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gmclab::regions {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dimension(int d) {
  if (d < 1) throw std::invalid_argument("regions: dimension must be >= 1");
}

void check_beta(Complex beta) {
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
    throw std::invalid_argument("regions: beta must be finite");
}

void check_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("regions: moment order must satisfy p >= 1");
}

}  // namespace

bool in_ea(Complex beta, int d) {
  check_dimension(d);
  check_beta(beta);
  double a = std::abs(beta.real());
  double b = std::abs(beta.imag());
  double dd = static_cast<double>(d);
  if (a * a + b * b < dd) return true;
  return a >= std::sqrt(dd / 2.0) && a + b < std::sqrt(2.0 * dd);
}

bool in_eap(Complex beta, double p, int d) {
  check_order(p);
  if (!in_ea(beta, d)) return false;
  double a = beta.real();
  double b = beta.imag();
  double dd = static_cast<double>(d);
  bool strip = std::abs(a) < std::sqrt(2.0 * dd) / p;
  bool ellipse = (p - 1.0) * a * a + b * b < 2.0 * dd * (p - 1.0) / p;
  return strip || ellipse;
}

double besov_threshold(Complex beta, double p, int d) {
  check_order(p);
  if (!in_ea(beta, d))
    throw std::domain_error("besov_threshold: beta outside the existence domain");
  double a = std::abs(beta.real());
  double b = beta.imag();
  double dd = static_cast<double>(d);
  if (a <= std::sqrt(2.0 * dd) / p)
    return -((p - 1.0) * a * a + b * b) / 2.0;
  return dd / p - std::sqrt(2.0 * dd) * a + (a * a - b * b) / 2.0;
}

double real_moment_cutoff(double beta, int d) {
  check_dimension(d);
  double dd = static_cast<double>(d);
  if (!(beta > 0.0) || !(beta < std::sqrt(2.0 * dd)))
    throw std::domain_error(
        "real_moment_cutoff: beta must lie in (0, sqrt(2d))");
  return 2.0 * dd / (beta * beta);
}

double gamma_exponent(double r, double s, double p, Complex beta, int d) {
  check_dimension(d);
  check_beta(beta);
  check_order(p);
  if (!(r >= 1.0) || !std::isfinite(r))
    throw std::invalid_argument("gamma_exponent: r must satisfy r >= 1");
  if (!std::isfinite(s))
    throw std::invalid_argument("gamma_exponent: s must be finite");
  double a = beta.real();
  double b = beta.imag();
  double dd = static_cast<double>(d);
  return -dd / p + s + dd / r + ((r - 1.0) * a * a + b * b) / 2.0;
}

double optimal_r(Complex beta, double p, int d) {
  check_dimension(d);
  check_beta(beta);
  check_order(p);
  double a = std::abs(beta.real());
  double dd = static_cast<double>(d);
  if (!(a < std::sqrt(2.0 * dd)))
    throw std::domain_error("optimal_r: |Re beta| must be below sqrt(2d)");
  if (a == 0.0) return p;
  return std::min(p, std::sqrt(2.0 * dd) / a);
}

namespace {

// Boundary radius of the eye along direction theta. The circular part governs
// where |cos theta| <= 1/sqrt(2); beyond that the ray exits through one of the
// corner segments |x| + |y| = sqrt(2d).
double eye_radius(double theta, double d) {
  double c = std::abs(std::cos(theta));
  double s = std::abs(std::sin(theta));
  if (c <= std::numbers::sqrt2 / 2.0) return std::sqrt(d);
  return std::sqrt(2.0 * d) / (c + s);
}

double strip_radius(double theta, double d, double p) {
  double c = std::abs(std::cos(theta));
  if (c == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0 * d) / (p * c);
}

double ellipse_radius(double theta, double d, double p) {
  if (p <= 1.0) return 0.0;
  double c = std::cos(theta);
  double s = std::sin(theta);
  double denom = (p - 1.0) * c * c + s * s;
  return std::sqrt(2.0 * d * (p - 1.0) / (p * denom));
}

std::vector<std::array<double, 2>> eye_polyline(double d, int n_points) {
  double far = std::sqrt(2.0 * d);
  double c = std::sqrt(d / 2.0);
  double rad = std::sqrt(d);
  int per_piece = (n_points + 5) / 6;

  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<std::size_t>(per_piece) * 6 + 6);

  auto segment = [&](double x0, double y0, double x1, double y1) {
    for (int i = 0; i < per_piece; ++i) {
      double t = static_cast<double>(i) / per_piece;
      out.push_back({(1.0 - t) * x0 + t * x1, (1.0 - t) * y0 + t * y1});
    }
  };
  // The first vertex of each piece is pinned to the exact junction point, so
  // all four tangency corners and both apexes appear verbatim in the output.
  auto arc = [&](double x0, double y0, double t0, double t1) {
    out.push_back({x0, y0});
    for (int i = 1; i < per_piece; ++i) {
      double t = t0 + (t1 - t0) * i / per_piece;
      out.push_back({rad * std::cos(t), rad * std::sin(t)});
    }
  };

  segment(far, 0.0, c, c);
  arc(c, c, kPi / 4.0, 3.0 * kPi / 4.0);
  segment(-c, c, -far, 0.0);
  segment(-far, 0.0, -c, -c);
  arc(-c, -c, 5.0 * kPi / 4.0, 7.0 * kPi / 4.0);
  segment(c, -c, far, 0.0);
  return out;
}

// The moment region is star-shaped around 0 (intersection of the convex eye
// with a union of two convex sets containing 0), so its boundary is traced by
// a radial sweep. Corner directions are inserted so the kinks land on exact
// vertices. The strip line, the eye segment, and the ellipse all meet at
// (sqrt(2d)/p, sqrt(2d)(p-1)/p), which is where the active constraint flips.
std::vector<std::array<double, 2>> moment_polyline(double d, double p,
                                                   int n_points) {
  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(n_points) + 16);
  for (int i = 0; i < n_points; ++i)
    thetas.push_back(2.0 * kPi * i / n_points);
  for (double corner : {kPi / 4.0, 3.0 * kPi / 4.0, 5.0 * kPi / 4.0,
                        7.0 * kPi / 4.0})
    thetas.push_back(corner);
  double junction = std::atan2(p - 1.0, 1.0);
  for (double t : {junction, kPi - junction, kPi + junction, -junction})
    thetas.push_back(t < 0.0 ? t + 2.0 * kPi : t);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  std::vector<std::array<double, 2>> out;
  out.reserve(thetas.size());
  for (double t : thetas) {
    double r = std::min(eye_radius(t, d),
                        std::max(strip_radius(t, d, p), ellipse_radius(t, d, p)));
    out.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return out;
}

std::vector<std::array<double, 2>> circle_polyline(double radius,
                                                   int n_points) {
  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    double t = 2.0 * kPi * i / n_points;
    out.push_back({radius * std::cos(t), radius * std::sin(t)});
  }
  return out;
}

}  // namespace

std::vector<std::array<double, 2>> boundary_polyline(Curve curve, double p,
                                                     int d, int n_points) {
  check_dimension(d);
  if (n_points < 8)
    throw std::invalid_argument("boundary_polyline: need n_points >= 8");
  double dd = static_cast<double>(d);
  switch (curve) {
    case Curve::kEye:
      return eye_polyline(dd, n_points);
    case Curve::kMoment:
      check_order(p);
      return moment_polyline(dd, p, n_points);
    case Curve::kL2Circle:
      return circle_polyline(std::sqrt(dd), n_points);
  }
  throw std::invalid_argument("boundary_polyline: unknown curve");
}

}  // namespace gmclab::regions

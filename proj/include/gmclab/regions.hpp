#pragma once

#include <array>
#include <complex>
#include <vector>

namespace gmclab::regions {

using Complex = std::complex<double>;

// Parameter-plane geometry for the chaos exp(beta X). All regions are open:
// boundary points count as outside.

// The eye-shaped existence domain: interior of the convex hull of the closed
// disk of radius sqrt(d) together with the two real points +-sqrt(2d).
// Closed form used here:
//   |beta| < sqrt(d)   or   ( |Re| >= sqrt(d/2)  and  |Re| + |Im| < sqrt(2d) ).
bool in_ea(Complex beta, int d);

// Moment region of order p >= 1: the part of the eye where the p-th absolute
// moment of the chaos stays finite,
//   E_a  intersect  ( { |Re| < sqrt(2d)/p }
//                     union { (p-1) Re^2 + Im^2 < 2d(p-1)/p } ).
// At p = 1 the ellipse clause is empty and the strip clause alone governs.
bool in_eap(Complex beta, double p, int d);

// Critical regularity exponent: the chaos lies in the Besov space of
// smoothness s (p-integrability) exactly for s below this threshold.
// Requires beta inside the eye.
double besov_threshold(Complex beta, double p, int d);

// For real beta in (0, sqrt(2d)): moments of order p exist iff p < 2d/beta^2.
double real_moment_cutoff(double beta, int d);

// Exponent controlling the level sums in the Besov estimate:
//   gamma = -d/p + s + d/r + ((r-1) Re^2 + Im^2) / 2.
double gamma_exponent(double r, double s, double p, Complex beta, int d);

// The interpolation order minimizing gamma over admissible r:
//   min(p, sqrt(2d)/|Re beta|), and p itself on the imaginary axis.
double optimal_r(Complex beta, double p, int d);

enum class Curve {
  kEye,        // boundary of the existence domain
  kMoment,     // boundary of the order-p moment region
  kL2Circle,   // |beta| = sqrt(d), where second moments cut off
};

// Closed polyline tracing the requested boundary counterclockwise. Every
// vertex satisfies its defining curve equation to near machine precision;
// the eye polyline contains the four corner vertices exactly. `n_points`
// is a lower bound on the number of vertices (at least 8).
std::vector<std::array<double, 2>> boundary_polyline(Curve curve, double p,
                                                     int d, int n_points);

}  // namespace gmclab::regions

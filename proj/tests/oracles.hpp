#pragma once

// Reference values computed without the library: Gamma closed forms, 1-D reduced integrals and
// brute-force searches.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-11) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

// ||(1 - z1)^{-beta}||^2 on the unit bidisc and on the unit ball of C^2.
inline double polydisc_pole_norm_sq(double beta) {
  return pi * pi * std::tgamma(2.0 - 2.0 * beta) / std::pow(std::tgamma(2.0 - beta), 2);
}
inline double ball_pole_norm_sq(double beta) {
  return pi * pi * std::tgamma(3.0 - 2.0 * beta) / std::pow(std::tgamma(3.0 - beta), 2);
}

// Measure of {z in domain : |1 - z1| = t} per unit t, divided by t (fiber area times arc angle).
inline double polydisc_shell_weight(double t) { return pi * 2.0 * std::acos(t / 2.0); }
inline double ball_shell_weight(double t) {
  const double a = std::acos(t / 2.0);
  return pi * (4.0 * t * std::sin(a) - 2.0 * t * t * a);
}

// Contribution of the dyadic shell 2^{-k} < t <= 2^{1-k} to ||(1 - z1)^{-beta}||^2.
inline double shell(bool ball, double beta, int k) {
  const double lo = std::ldexp(1.0, -k), hi = std::ldexp(1.0, 1 - k);
  auto f = [&](double t) { return std::pow(t, 1.0 - 2.0 * beta) * (ball ? ball_shell_weight(t) : polydisc_shell_weight(t)); };
  return integrate_1d(f, lo, hi, 1e-13 * (hi - lo));
}

// Sum of all shells; infinite when the deep shells stop shrinking.
inline double shell_sum(bool ball, double beta, int depth = 60) {
  double total = 0.0;
  for (int k = 0; k < depth; ++k) total += shell(ball, beta, k);
  if (shell(ball, beta, depth + 1) >= shell(ball, beta, depth)) return INFINITY;
  const double r = shell(ball, beta, depth + 1) / shell(ball, beta, depth);
  return total + shell(ball, beta, depth) * r / (1.0 - r);
}

inline bool shell_divergent(bool ball, double beta) {
  return shell(ball, beta, 41) >= shell(ball, beta, 40) * (1.0 - 1e-9);
}

// Midpoint between the largest convergent and the smallest divergent grid value.
inline double shell_beta_star(bool ball, const std::vector<double>& grid) {
  double last_finite = NAN, first_divergent = NAN;
  for (double b : grid) {
    if (shell_divergent(ball, b)) {
      if (std::isnan(first_divergent)) first_divergent = b;
    } else {
      last_finite = b;
    }
  }
  return 0.5 * (last_finite + first_divergent);
}

// Distance from y (real coordinates, paired semi-axes) to the ellipsoid boundary by dense search
// over the boundary of the 2-D slice that contains y, which is where the nearest point lies when
// y has one nonzero complex coordinate per axis pair.
inline double ellipsoid_slice_distance(double y1, double y2, double a1, double a2, int steps = 2000000) {
  double best = INFINITY;
  for (int i = 0; i < steps; ++i) {
    const double th = 2.0 * pi * i / steps;
    const double dx = a1 * std::cos(th) - y1, dy = a2 * std::sin(th) - y2;
    best = std::min(best, std::hypot(dx, dy));
  }
  return best;
}

inline double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace oracle

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace bergman_lab {

enum class QuadratureMethod { MonteCarlo, StratifiedMonteCarlo };

inline std::string to_string(QuadratureMethod m) {
  return m == QuadratureMethod::MonteCarlo ? "MonteCarlo" : "StratifiedMonteCarlo";
}

/// Monte Carlo settings.
///
/// The stratified engine cuts the z1-plane into `strata` dyadic annuli around `focus`
/// (default: the z1-coordinate of the domain center), samples z1 uniformly in each annulus
/// and the remaining coordinates uniformly in the exact fiber of the domain over z1. The
/// disc inside the innermost annulus is accounted for by a geometric tail fitted on the
/// deepest annuli, which is also what decides divergence.
struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::MonteCarlo;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int strata = 32;
  std::optional<Complex> focus;

  void validate() const {
    if (samples < 1000) throw domain_error("QuadratureSpec: samples must be >= 1000");
    if (method == QuadratureMethod::StratifiedMonteCarlo) {
      if (strata < 4 || strata > 48) throw domain_error("QuadratureSpec: strata must lie in [4, 48]");
      if (samples < static_cast<std::size_t>(strata) * 100) {
        throw domain_error("QuadratureSpec: need at least 100 samples per stratum");
      }
    }
  }

  QuadratureSpec with_seed(std::uint64_t s) const {
    QuadratureSpec q = *this;
    q.seed = s;
    return q;
  }

  QuadratureSpec aimed_at(Complex z1) const {
    QuadratureSpec q = *this;
    q.focus = z1;
    return q;
  }

  static QuadratureSpec monte_carlo(std::size_t samples, std::uint64_t seed) {
    return {QuadratureMethod::MonteCarlo, samples, seed, 32, std::nullopt};
  }

  static QuadratureSpec stratified(std::size_t samples, std::uint64_t seed, int strata = 32) {
    return {QuadratureMethod::StratifiedMonteCarlo, samples, seed, strata, std::nullopt};
  }
};

struct IntegralResult {
  Complex value;
  double std_error = 0.0;
  std::size_t samples_used = 0;
  bool divergent = false;
  // Stratified only: fitted log2 ratio of successive shell contributions and its standard error.
  double tail_slope = std::numeric_limits<double>::quiet_NaN();
  double tail_slope_error = std::numeric_limits<double>::quiet_NaN();

  double real() const { return value.real(); }
  bool finite() const { return !divergent; }
};

/// Exact Lebesgue volume.
inline double volume(const Domain& domain) {
  const std::size_t n = domain.dim();
  double v = 1.0;
  switch (domain.kind()) {
    case DomainKind::Polydisc:
      for (double r : domain.axes()) v *= std::numbers::pi * r * r;
      return v;
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
      for (std::size_t k = 1; k <= n; ++k) v *= std::numbers::pi / static_cast<double>(k);
      for (double a : domain.axes()) v *= a * a;
      return v;
  }
  return v;
}

/// Integral of r^{-2 beta} over the disc of radius R in polar coordinates:
/// 2 pi R^{2-2beta} / (2 - 2beta).
inline double radial_power_integral(double radius, double beta) {
  if (!(radius > 0.0)) throw domain_error("radial_power_integral: radius must be positive");
  if (!(beta < 1.0)) throw domain_error("radial_power_integral: r^{1-2beta} is not integrable for beta >= 1");
  return 2.0 * std::numbers::pi * std::pow(radius, 2.0 - 2.0 * beta) / (2.0 - 2.0 * beta);
}

namespace detail {

struct Moments {
  Complex sum;
  double sum_sq = 0.0;  // sum of |v|^2
  std::size_t count = 0;
  std::size_t non_finite = 0;

  void add(Complex v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      ++non_finite;
      ++count;
      return;
    }
    sum += v;
    sum_sq += std::norm(v);
    ++count;
  }

  Complex mean() const { return count ? sum / static_cast<double>(count) : Complex{}; }

  // Variance of the sample mean.
  double mean_variance() const {
    if (count < 2) return 0.0;
    const double nd = static_cast<double>(count);
    const double var = std::max(0.0, (sum_sq - std::norm(sum) / nd) / (nd - 1.0));
    return var / nd;
  }
};

inline constexpr int plain_batches = 10;

template <class F>
IntegralResult integrate_plain(const Domain& domain, F& integrand, const QuadratureSpec& spec) {
  std::vector<Moments> batches(plain_batches);
  parallel_for(batches.size(), [&](std::size_t b) {
    const std::size_t count = spec.samples / plain_batches + (b < spec.samples % plain_batches ? 1 : 0);
    Rng rng(derive_seed(spec.seed, b));
    ComplexPoint z(domain.dim());
    Moments m;
    for (std::size_t i = 0; i < count; ++i) {
      draw_interior(domain, rng, z);
      m.add(Complex(integrand(z)));
    }
    batches[b] = m;
  });

  const double vol = volume(domain);
  Moments total;
  std::vector<double> running;
  for (const auto& b : batches) {
    total.sum += b.sum;
    total.sum_sq += b.sum_sq;
    total.count += b.count;
    total.non_finite += b.non_finite;
    running.push_back(std::abs(total.mean()));
  }

  IntegralResult r;
  r.samples_used = total.count;
  bool growing = running.front() > 0.0 && running.back() / running.front() > 1.05;
  for (std::size_t b = 1; b < running.size() && growing; ++b) growing = running[b] > running[b - 1];
  const bool too_many_bad = static_cast<double>(total.non_finite) > 1e-4 * static_cast<double>(total.count);
  if (growing || too_many_bad) {
    r.divergent = true;
    r.value = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    r.std_error = std::numeric_limits<double>::infinity();
    return r;
  }
  r.value = vol * total.mean();
  r.std_error = vol * std::sqrt(total.mean_variance());
  return r;
}

// Fits log2|c_k| = a + s k by weighted least squares; returns {s, sigma_s}.
inline std::pair<double, double> fit_log_slope(const std::vector<Complex>& c, const std::vector<double>& var,
                                               std::size_t first) {
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = first; k < c.size(); ++k) {
    const double mag = std::abs(c[k]);
    const double sigma_log = std::max(std::sqrt(var[k]) / (mag * std::numbers::ln2), 1e-6);
    const double w = 1.0 / (sigma_log * sigma_log);
    const double x = static_cast<double>(k);
    const double y = std::log2(mag);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double det = sw * sxx - sx * sx;
  const double slope = (sw * sxy - sx * sy) / det;
  return {slope, std::sqrt(sw / det)};
}

template <class F>
IntegralResult integrate_stratified(const Domain& domain, F& integrand, const QuadratureSpec& spec) {
  const std::size_t n = domain.dim();
  const std::size_t strata = static_cast<std::size_t>(spec.strata);
  const Complex c1 = domain.center()[0];
  const Complex focus = spec.focus.value_or(c1);
  const double a1 = domain.projection_radius(0);
  const double rho_max = std::abs(focus - c1) + a1;

  double unit_ball_fiber = 1.0;  // volume of the unit ball of C^{n-1}
  for (std::size_t k = 1; k < n; ++k) unit_ball_fiber *= std::numbers::pi / static_cast<double>(k);
  double axes_sq = 1.0;
  for (std::size_t k = 1; k < n; ++k) axes_sq *= domain.axis(k) * domain.axis(k);

  std::vector<Moments> shells(strata);
  parallel_for(strata, [&](std::size_t s) {
    const double t_out = std::ldexp(rho_max, -static_cast<int>(s));
    const double t_in = 0.5 * t_out;
    const double area = std::numbers::pi * (t_out * t_out - t_in * t_in);
    const std::size_t count = spec.samples / strata + (s < spec.samples % strata ? 1 : 0);
    Rng rng(derive_seed(spec.seed, 0x5100 + s));
    ComplexPoint z(n);
    Moments m;
    for (std::size_t i = 0; i < count; ++i) {
      const double t = std::sqrt(t_in * t_in + rng.uniform() * (t_out * t_out - t_in * t_in));
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      z[0] = focus + std::polar(t, theta);
      const double u2 = std::norm((z[0] - c1) / a1);
      double fiber = 0.0;
      if (u2 < 1.0) {
        if (domain.kind() == DomainKind::Polydisc) {
          fiber = 1.0;
          for (std::size_t k = 1; k < n; ++k) {
            fiber *= std::numbers::pi * domain.axis(k) * domain.axis(k);
            z[k] = domain.center()[k] + disc_point(rng, domain.axis(k));
          }
        } else {
          const double scale = std::sqrt(1.0 - u2);
          fiber = unit_ball_fiber * axes_sq * std::pow(scale, 2.0 * static_cast<double>(n - 1));
          if (n > 1) unit_ball_point(rng, n - 1, z, 1);
          for (std::size_t k = 1; k < n; ++k) z[k] = domain.center()[k] + z[k] * (domain.axis(k) * scale);
        }
      }
      if (fiber == 0.0) {
        m.add(Complex{});
        continue;
      }
      m.add(area * fiber * Complex(integrand(z)));
    }
    shells[s] = m;
  });

  IntegralResult r;
  std::vector<Complex> c(strata);
  std::vector<double> var(strata);
  std::size_t non_finite = 0;
  Complex total;
  double total_var = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    c[s] = shells[s].mean();
    var[s] = shells[s].mean_variance();
    total += c[s];
    total_var += var[s];
    r.samples_used += shells[s].count;
    non_finite += shells[s].non_finite;
  }

  const bool too_many_bad = static_cast<double>(non_finite) > 1e-4 * static_cast<double>(r.samples_used);
  const std::size_t window = std::min<std::size_t>(12, strata / 2);
  const std::size_t first = strata - window;
  bool all_nonzero = true;
  bool all_zero = true;
  for (std::size_t s = first; s < strata; ++s) {
    if (c[s] == Complex{}) all_nonzero = false; else all_zero = false;
  }

  Complex tail;
  double tail_var = 0.0;
  if (all_nonzero) {
    const auto [slope, slope_err] = fit_log_slope(c, var, first);
    r.tail_slope = slope;
    r.tail_slope_error = slope_err;
    if (slope > -3.0 * slope_err) {
      r.divergent = true;
    } else {
      const double ratio = std::exp2(slope);
      const double ratio_err = ratio * std::numbers::ln2 * slope_err;
      const Complex last = c[strata - 1];
      const double g = ratio / (1.0 - ratio);
      tail = last * g;
      const double dg = ratio_err / ((1.0 - ratio) * (1.0 - ratio));
      tail_var = g * g * var[strata - 1] + std::norm(last) * dg * dg;
    }
  } else if (!all_zero) {
    // Sparse deep shells: no reliable tail model, drop it but keep its scale in the error.
    tail_var = std::norm(c[strata - 1]);
  }

  if (r.divergent || too_many_bad) {
    r.divergent = true;
    r.value = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    r.std_error = std::numeric_limits<double>::infinity();
    return r;
  }
  r.value = total + tail;
  r.std_error = std::sqrt(total_var + tail_var);
  return r;
}

}  // namespace detail

/// Estimate of the integral of `integrand` over the domain against Lebesgue measure.
/// Deterministic in spec; parallel and serial runs agree bit for bit. The integrand is
/// called from several workers and must not mutate shared state.
template <class F>
IntegralResult integrate(const Domain& domain, F&& integrand, const QuadratureSpec& spec) {
  spec.validate();
  if (spec.method == QuadratureMethod::MonteCarlo) return detail::integrate_plain(domain, integrand, spec);
  return detail::integrate_stratified(domain, integrand, spec);
}

}  // namespace bergman_lab

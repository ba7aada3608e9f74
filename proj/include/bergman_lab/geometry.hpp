#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace bergman_lab {

using Complex = std::complex<double>;

/// A point of C^n.
class ComplexPoint {
public:
  ComplexPoint() = default;
  explicit ComplexPoint(std::size_t n) : coords_(n) {}
  ComplexPoint(std::initializer_list<Complex> coords) : coords_(coords) {}
  explicit ComplexPoint(std::vector<Complex> coords) : coords_(std::move(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  Complex& operator[](std::size_t k) { return coords_[k]; }
  const Complex& operator[](std::size_t k) const { return coords_[k]; }
  std::span<const Complex> coords() const { return coords_; }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& c : coords_) s += std::norm(c);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  bool finite() const {
    return std::all_of(coords_.begin(), coords_.end(),
                       [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  friend ComplexPoint operator+(ComplexPoint a, const ComplexPoint& b) {
    require_same_dimension(a.dim(), b.dim(), "point addition");
    for (std::size_t k = 0; k < a.dim(); ++k) a[k] += b[k];
    return a;
  }
  friend ComplexPoint operator-(ComplexPoint a, const ComplexPoint& b) {
    require_same_dimension(a.dim(), b.dim(), "point subtraction");
    for (std::size_t k = 0; k < a.dim(); ++k) a[k] -= b[k];
    return a;
  }
  friend ComplexPoint operator*(Complex s, ComplexPoint a) {
    for (auto& c : a.coords_) c *= s;
    return a;
  }
  friend bool operator==(const ComplexPoint&, const ComplexPoint&) = default;

private:
  std::vector<Complex> coords_;
};

enum class DomainKind { Ball, Polydisc, Ellipsoid };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Ball: return "ball";
    case DomainKind::Polydisc: return "polydisc";
    case DomainKind::Ellipsoid: return "ellipsoid";
  }
  return "?";
}

/// Bounded convex domain in C^n: a ball, polydisc or (complex) ellipsoid, optionally translated.
///
/// Axes are stored per complex coordinate: the ball repeats its radius, the polydisc stores
/// its radii and the ellipsoid its semiaxes, so sum |z_k / a_k|^2 < 1 describes both the
/// ball and the ellipsoid.
class Domain {
public:
  static Domain unit_ball(int n) { return ball(n, 1.0); }

  static Domain ball(int n, double radius) {
    if (n < 1) throw domain_error("ball: dimension must be >= 1");
    return Domain(DomainKind::Ball, std::vector<double>(static_cast<std::size_t>(n), radius));
  }

  static Domain polydisc(std::vector<double> radii) { return Domain(DomainKind::Polydisc, std::move(radii)); }

  static Domain ellipsoid(std::vector<double> semiaxes) {
    return Domain(DomainKind::Ellipsoid, std::move(semiaxes));
  }

  Domain translated(ComplexPoint center) const {
    require_same_dimension(center.dim(), dim(), "Domain::translated");
    if (!center.finite()) throw domain_error("Domain::translated: non-finite center");
    Domain d = *this;
    d.center_ = std::move(center);
    return d;
  }

  DomainKind kind() const { return kind_; }
  std::size_t dim() const { return axes_.size(); }
  std::span<const double> axes() const { return axes_; }
  double axis(std::size_t k) const { return axes_[k]; }
  const ComplexPoint& center() const { return center_; }
  bool centered() const { return center_.norm_sq() == 0.0; }

  double inradius() const { return *std::min_element(axes_.begin(), axes_.end()); }

  /// Minkowski gauge about the center: < 1 inside, = 1 on the boundary.
  double gauge(const ComplexPoint& z) const {
    require_same_dimension(z.dim(), dim(), "gauge");
    switch (kind_) {
      case DomainKind::Polydisc: {
        double g = 0.0;
        for (std::size_t k = 0; k < dim(); ++k) g = std::max(g, std::abs(z[k] - center_[k]) / axes_[k]);
        return g;
      }
      case DomainKind::Ball:
      case DomainKind::Ellipsoid: {
        double s = 0.0;
        for (std::size_t k = 0; k < dim(); ++k) s += std::norm((z[k] - center_[k]) / axes_[k]);
        return std::sqrt(s);
      }
    }
    return 0.0;
  }

  /// Radius of the projection of the domain onto the z_k coordinate plane.
  double projection_radius(std::size_t k) const { return axes_[k]; }

  std::string describe() const {
    std::string s = to_string(kind_) + "(";
    for (std::size_t k = 0; k < dim(); ++k) s += (k ? "," : "") + std::to_string(axes_[k]);
    s += ")";
    if (!centered()) s += "+shift";
    return s;
  }

  friend bool operator==(const Domain&, const Domain&) = default;

private:
  Domain(DomainKind kind, std::vector<double> axes) : kind_(kind), axes_(std::move(axes)), center_(axes_.size()) {
    if (axes_.empty()) throw domain_error("domain: dimension must be >= 1");
    for (double a : axes_) {
      if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("domain: radii and semiaxes must be positive and finite");
    }
  }

  DomainKind kind_;
  std::vector<double> axes_;
  ComplexPoint center_;
};

inline bool contains(const Domain& domain, const ComplexPoint& z) {
  require_same_dimension(z.dim(), domain.dim(), "contains");
  return domain.gauge(z) < 1.0;
}

namespace detail {

// Slack for points produced on the boundary by floating-point sampling.
inline constexpr double closure_slack = 1e-9;

// Distance from y (inside, relative to the center) to the boundary of the real ellipsoid
// sum (x_i/e_i)^2 = 1. Critical points satisfy x_i = e_i^2 y_i / (e_i^2 + t) with
// t in [-e_min^2, 0]; the root of the secular equation is found by Newton safeguarded
// with bisection.
inline double ellipsoid_distance(std::span<const double> y, std::span<const double> e) {
  const std::size_t m = y.size();
  double e_min2 = std::numeric_limits<double>::infinity();
  for (double a : e) e_min2 = std::min(e_min2, a * a);

  auto secular = [&](double t, double* derivative) {
    double f = -1.0;
    double df = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (y[i] == 0.0) continue;
      const double d = e[i] * e[i] + t;
      const double q = e[i] * y[i] / d;
      f += q * q;
      df += -2.0 * q * q / d;
    }
    if (derivative) *derivative = df;
    return f;
  };

  // Does any nonzero coordinate live on a shortest axis? Then the secular function blows up
  // at -e_min^2 and the root is interior.
  bool singular_at_left = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (y[i] != 0.0 && e[i] * e[i] == e_min2) singular_at_left = true;
  }
  const double f_left = singular_at_left ? std::numeric_limits<double>::infinity() : secular(-e_min2, nullptr);

  auto dist_at = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = e[i] * e[i] * y[i] / (e[i] * e[i] + t);
      s += (y[i] - x) * (y[i] - x);
    }
    return std::sqrt(s);
  };

  if (f_left > 0.0) {
    double lo = -e_min2;
    double hi = 0.0;
    double t = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double df = 0.0;
      const double f = secular(t, &df);
      if (f > 0.0) lo = t; else hi = t;
      if (f == 0.0 || hi - lo <= 1e-16 * e_min2) break;
      double next = (df != 0.0) ? t - f / df : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-17 * e_min2) {
        t = next;
        break;
      }
      t = next;
    }
    return dist_at(t);
  }

  // Degenerate: t = -e_min^2 and the deficit is taken up along a shortest axis with y_i = 0.
  const double t = -e_min2;
  double s = 0.0;
  double used = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (e[i] * e[i] == e_min2) continue;
    const double x = e[i] * e[i] * y[i] / (e[i] * e[i] + t);
    s += (y[i] - x) * (y[i] - x);
    used += (x / e[i]) * (x / e[i]);
  }
  const double x_free = std::sqrt(std::max(0.0, 1.0 - used)) * std::sqrt(e_min2);
  return std::sqrt(s + x_free * x_free);
}

}  // namespace detail

/// Euclidean distance to the boundary. Points within 1e-9 (in gauge) outside the closure
/// count as boundary points; farther ones are rejected.
inline double boundary_distance(const Domain& domain, const ComplexPoint& z) {
  require_same_dimension(z.dim(), domain.dim(), "boundary_distance");
  const double g = domain.gauge(z);
  if (!(g <= 1.0 + detail::closure_slack)) throw domain_error("boundary_distance: point outside the closure");
  if (g >= 1.0) return 0.0;
  const auto& c = domain.center();
  switch (domain.kind()) {
    case DomainKind::Ball: return domain.axis(0) - (z - c).norm();
    case DomainKind::Polydisc: {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < domain.dim(); ++k) d = std::min(d, domain.axis(k) - std::abs(z[k] - c[k]));
      return d;
    }
    case DomainKind::Ellipsoid: {
      std::vector<double> y;
      std::vector<double> e;
      for (std::size_t k = 0; k < domain.dim(); ++k) {
        const Complex u = z[k] - c[k];
        y.push_back(u.real());
        y.push_back(u.imag());
        e.push_back(domain.axis(k));
        e.push_back(domain.axis(k));
      }
      return detail::ellipsoid_distance(y, e);
    }
  }
  return 0.0;
}

namespace detail {

// Uniform point of the unit ball of C^m written into out[offset, offset + m).
inline void unit_ball_point(Rng& rng, std::size_t m, ComplexPoint& out, std::size_t offset = 0) {
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    out[offset + k] = Complex(rng.normal(), rng.normal());
    s += std::norm(out[offset + k]);
  }
  const double radius = std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(m)));
  const double scale = s > 0.0 ? radius / std::sqrt(s) : 0.0;
  for (std::size_t k = 0; k < m; ++k) out[offset + k] *= scale;
}

inline void unit_sphere_point(Rng& rng, std::size_t m, ComplexPoint& out) {
  double s = 0.0;
  do {
    s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      out[k] = Complex(rng.normal(), rng.normal());
      s += std::norm(out[k]);
    }
  } while (s == 0.0);
  const double scale = 1.0 / std::sqrt(s);
  for (std::size_t k = 0; k < m; ++k) out[k] *= scale;
}

inline Complex disc_point(Rng& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double t = 2.0 * std::numbers::pi * rng.uniform();
  return std::polar(r, t);
}

inline void draw_interior(const Domain& domain, Rng& rng, ComplexPoint& out) {
  const std::size_t n = domain.dim();
  switch (domain.kind()) {
    case DomainKind::Polydisc:
      for (std::size_t k = 0; k < n; ++k) out[k] = disc_point(rng, domain.axis(k));
      break;
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
      unit_ball_point(rng, n, out);
      for (std::size_t k = 0; k < n; ++k) out[k] *= domain.axis(k);
      break;
  }
  if (!domain.centered()) {
    for (std::size_t k = 0; k < n; ++k) out[k] += domain.center()[k];
  }
}

inline void draw_boundary(const Domain& domain, Rng& rng, ComplexPoint& out) {
  const std::size_t n = domain.dim();
  switch (domain.kind()) {
    case DomainKind::Polydisc: {
      const std::size_t face = std::min<std::size_t>(rng.below(n), n - 1);
      for (std::size_t k = 0; k < n; ++k) {
        out[k] = (k == face) ? std::polar(domain.axis(k), 2.0 * std::numbers::pi * rng.uniform())
                             : disc_point(rng, domain.axis(k));
      }
      break;
    }
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
      unit_sphere_point(rng, n, out);
      for (std::size_t k = 0; k < n; ++k) out[k] *= domain.axis(k);
      break;
  }
  if (!domain.centered()) {
    for (std::size_t k = 0; k < n; ++k) out[k] += domain.center()[k];
  }
}

}  // namespace detail

/// m uniform points of the open domain, deterministic in seed.
inline std::vector<ComplexPoint> sample_interior(const Domain& domain, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw domain_error("sample_interior: m must be >= 1");
  Rng rng(seed);
  std::vector<ComplexPoint> pts(m, ComplexPoint(domain.dim()));
  for (auto& p : pts) detail::draw_interior(domain, rng, p);
  return pts;
}

/// m boundary points: normalized Gaussian directions for ball and ellipsoid, a uniformly chosen
/// face with independent angles for the polydisc.
inline std::vector<ComplexPoint> sample_boundary(const Domain& domain, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw domain_error("sample_boundary: m must be >= 1");
  Rng rng(derive_seed(seed, 0xb0u));
  std::vector<ComplexPoint> pts(m, ComplexPoint(domain.dim()));
  for (auto& p : pts) detail::draw_boundary(domain, rng, p);
  return pts;
}

/// The boundary layer {z in domain : dist(z, bdry) < delta}.
class BoundaryLayer {
public:
  BoundaryLayer(Domain parent, double delta) : parent_(std::move(parent)), delta_(delta) {
    if (!(delta_ > 0.0 && delta_ < parent_.inradius())) {
      throw domain_error("BoundaryLayer: delta must lie in (0, inradius)");
    }
  }
  const Domain& parent() const { return parent_; }
  double delta() const { return delta_; }

private:
  Domain parent_;
  double delta_;
};

namespace detail {

// Distances within rounding of the layer width count as on its inner edge, so 1 - 0.8 is not < 0.2.
inline bool closer_than(double distance, double width) { return distance < width - 1e-12 * std::max(1.0, width); }

}  // namespace detail

inline bool boundary_layer_predicate(const BoundaryLayer& layer, const ComplexPoint& z) {
  if (!contains(layer.parent(), z)) throw domain_error("boundary_layer_predicate: point outside the domain");
  return detail::closer_than(boundary_distance(layer.parent(), z), layer.delta());
}

/// Membership in the compact set K_eps = {dist(z, bdry) >= eps}.
inline bool compact_exhaustion_predicate(const Domain& domain, double eps, const ComplexPoint& z) {
  if (!(eps > 0.0 && eps < domain.inradius())) {
    throw domain_error("compact_exhaustion_predicate: eps must lie in (0, inradius)");
  }
  return !detail::closer_than(boundary_distance(domain, z), eps);
}

}  // namespace bergman_lab

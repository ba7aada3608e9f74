#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "polyalg.hpp"

namespace bergman_lab {

using ComplexMatrix = std::vector<std::vector<Complex>>;

/// Determinant: cofactor expansion up to 3x3, partial-pivot elimination above.
inline Complex determinant(ComplexMatrix a) {
  const std::size_t n = a.size();
  if (n == 0) return 1.0;
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  if (n == 3) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }
  Complex det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    }
    if (a[pivot][c] == Complex{}) return 0.0;
    if (pivot != c) {
      std::swap(a[pivot], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
inline ComplexMatrix inverse(ComplexMatrix a) {
  const std::size_t n = a.size();
  ComplexMatrix inv(n, std::vector<Complex>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    }
    if (a[pivot][c] == Complex{}) throw domain_error("inverse: singular matrix");
    std::swap(a[pivot], a[c]);
    std::swap(inv[pivot], inv[c]);
    const Complex d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == Complex{}) continue;
      const Complex f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

/// A polynomial map phi = (phi_1, ..., phi_n) of C^n, with its Jacobian matrix of
/// partial-derivative polynomials precomputed.
class HolomorphicMap {
public:
  explicit HolomorphicMap(std::vector<MultiPoly> components) : components_(std::move(components)) {
    const std::size_t n = components_.size();
    if (n == 0) throw domain_error("HolomorphicMap: no components");
    for (const auto& c : components_) require_same_dimension(c.dim(), n, "HolomorphicMap component");
    jacobian_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) jacobian_[i].push_back(components_[i].partial_derivative(k));
    }
  }

  static HolomorphicMap identity(std::size_t n) {
    std::vector<MultiPoly> c;
    for (std::size_t k = 0; k < n; ++k) c.push_back(MultiPoly::variable(n, k));
    return HolomorphicMap(std::move(c));
  }

  /// (z_1, 0, ..., 0).
  static HolomorphicMap projection(std::size_t n) {
    std::vector<MultiPoly> c{MultiPoly::variable(n, 0)};
    for (std::size_t k = 1; k < n; ++k) c.emplace_back(n);
    return HolomorphicMap(std::move(c));
  }

  static HolomorphicMap scaling(std::size_t n, Complex s) {
    std::vector<MultiPoly> c;
    for (std::size_t k = 0; k < n; ++k) c.push_back(s * MultiPoly::variable(n, k));
    return HolomorphicMap(std::move(c));
  }

  /// (a z1 + b z2, -conj(b) z1 + conj(a) z2); unitary when |a|^2 + |b|^2 = 1.
  static HolomorphicMap unitary(Complex a, Complex b) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) {
      throw domain_error("unitary: need |a|^2 + |b|^2 = 1");
    }
    const auto z1 = MultiPoly::variable(2, 0);
    const auto z2 = MultiPoly::variable(2, 1);
    return HolomorphicMap({a * z1 + b * z2, -std::conj(b) * z1 + std::conj(a) * z2});
  }

  static HolomorphicMap swap() { return HolomorphicMap({MultiPoly::variable(2, 1), MultiPoly::variable(2, 0)}); }

  static HolomorphicMap linear(const ComplexMatrix& m) {
    const std::size_t n = m.size();
    std::vector<MultiPoly> c(n, MultiPoly(n));
    for (std::size_t i = 0; i < n; ++i) {
      require_same_dimension(m[i].size(), n, "HolomorphicMap::linear");
      for (std::size_t k = 0; k < n; ++k) c[i].accumulate(MultiIndex::unit(n, k), m[i][k]);
    }
    return HolomorphicMap(std::move(c));
  }

  std::size_t dim() const { return components_.size(); }
  const std::vector<MultiPoly>& components() const { return components_; }
  const MultiPoly& component(std::size_t i) const { return components_[i]; }
  int degree() const {
    int d = -1;
    for (const auto& c : components_) d = std::max(d, c.degree());
    return d;
  }

  ComplexPoint operator()(const ComplexPoint& z) const {
    require_same_dimension(z.dim(), dim(), "HolomorphicMap evaluation");
    ComplexPoint w(dim());
    for (std::size_t i = 0; i < dim(); ++i) w[i] = components_[i].evaluate(z);
    return w;
  }

  ComplexMatrix jacobian_matrix(const ComplexPoint& z) const {
    require_same_dimension(z.dim(), dim(), "jacobian_matrix");
    ComplexMatrix m(dim(), std::vector<Complex>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t k = 0; k < dim(); ++k) m[i][k] = jacobian_[i][k].evaluate(z);
    }
    return m;
  }

  /// Linear part when every component is homogeneous of degree 1; throws otherwise.
  ComplexMatrix linear_matrix() const {
    ComplexMatrix m(dim(), std::vector<Complex>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) {
      for (const auto& [a, c] : components_[i].terms()) {
        if (a.total_degree() != 1) throw domain_error("linear_matrix: map is not linear");
        for (std::size_t k = 0; k < dim(); ++k) {
          if (a[k] == 1) m[i][k] = c;
        }
      }
    }
    return m;
  }

  std::string to_text() const {
    std::string s;
    for (std::size_t i = 0; i < dim(); ++i) s += "component " + std::to_string(i) + ":\n" + components_[i].to_text();
    return s;
  }

  friend bool operator==(const HolomorphicMap& a, const HolomorphicMap& b) { return a.components_ == b.components_; }

private:
  std::vector<MultiPoly> components_;
  std::vector<std::vector<MultiPoly>> jacobian_;
};

/// outer o inner, expanded exactly.
inline HolomorphicMap compose_maps(const HolomorphicMap& outer, const HolomorphicMap& inner) {
  require_same_dimension(outer.dim(), inner.dim(), "compose_maps");
  std::vector<MultiPoly> c;
  for (const auto& p : outer.components()) c.push_back(compose(p, inner.components()));
  return HolomorphicMap(std::move(c));
}

inline Complex jacobian_det(const HolomorphicMap& map, const ComplexPoint& z) {
  return determinant(map.jacobian_matrix(z));
}

struct JacobianReport {
  double min_abs = 0.0;
  double max_abs = 0.0;
  ComplexPoint argmin_point;
  std::size_t samples = 0;
};

inline JacobianReport jacobian_scan(const HolomorphicMap& map, const std::vector<ComplexPoint>& points) {
  if (points.empty()) throw domain_error("jacobian_scan: no points");
  std::vector<double> values(points.size());
  parallel_for(points.size(), [&](std::size_t i) { values[i] = std::abs(jacobian_det(map, points[i])); });
  JacobianReport r;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  r.min_abs = *lo;
  r.max_abs = *hi;
  r.argmin_point = points[static_cast<std::size_t>(lo - values.begin())];
  r.samples = points.size();
  return r;
}

/// min / max of |J(phi)| over m boundary samples.
inline JacobianReport boundary_jacobian_scan(const HolomorphicMap& map, const Domain& domain, std::size_t m,
                                             std::uint64_t seed) {
  require_same_dimension(map.dim(), domain.dim(), "boundary_jacobian_scan");
  return jacobian_scan(map, sample_boundary(domain, m, seed));
}

namespace detail {

// Radial projection onto the boundary; the gauge is 1-homogeneous about the center.
inline ComplexPoint onto_boundary(const Domain& domain, const ComplexPoint& p) {
  const double g = domain.gauge(p);
  if (!(g > 0.0)) return p;
  ComplexPoint q = p;
  for (std::size_t k = 0; k < q.dim(); ++k) q[k] = domain.center()[k] + (p[k] - domain.center()[k]) / g;
  return q;
}

/// Largest gauge(phi(z)) over the boundary: the best samples are polished by a random local
/// search along the boundary with an adaptive step.
inline std::pair<double, ComplexPoint> boundary_gauge_max(const HolomorphicMap& map, const Domain& domain,
                                                        const std::vector<ComplexPoint>& pts,
                                                        const std::vector<double>& gauges, std::uint64_t seed) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t starts = std::min<std::size_t>(8, pts.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t a, std::size_t b) { return gauges[a] > gauges[b]; });
  std::vector<std::pair<double, ComplexPoint>> best(starts);
  parallel_for(starts, [&](std::size_t s) {
    Rng rng(derive_seed(seed, 0x7e00 + s));
    ComplexPoint p = pts[order[s]];
    double value = gauges[order[s]];
    double step = 0.05 * domain.inradius();
    for (int it = 0; it < 4000 && step > 1e-12; ++it) {
      ComplexPoint q = p;
      for (std::size_t k = 0; k < q.dim(); ++k) q[k] += step * Complex(rng.normal(), rng.normal());
      q = onto_boundary(domain, q);
      const double v = domain.gauge(map(q));
      if (v > value) {
        value = v;
        p = q;
        step = std::min(step * 1.5, domain.inradius());
      } else {
        step *= 0.9;
      }
    }
    best[s] = {value, p};
  });
  return *std::max_element(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

}  // namespace detail

struct SelfMapCheck {
  bool is_self_map = false;
  double worst_violation = 0.0;  // max over samples of gauge(phi(z)) - 1
};

/// Checks phi(z) in the closure on boundary samples. The gauge of the image is plurisubharmonic
/// for the implemented convex domains, so its maximum over the closure is attained on the boundary.
inline SelfMapCheck is_self_map(const HolomorphicMap& map, const Domain& domain, std::size_t m, std::uint64_t seed) {
  require_same_dimension(map.dim(), domain.dim(), "is_self_map");
  const auto pts = sample_boundary(domain, m, seed);
  std::vector<double> v(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { v[i] = domain.gauge(map(pts[i])) - 1.0; });
  SelfMapCheck r;
  std::vector<double> g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = v[i] + 1.0;
  r.worst_violation = detail::boundary_gauge_max(map, domain, pts, g, seed).first - 1.0;
  r.is_self_map = r.worst_violation <= 1e-9;
  return r;
}

namespace detail {

inline double distance_in_closure(const Domain& domain, const ComplexPoint& w) {
  return domain.gauge(w) >= 1.0 ? 0.0 : boundary_distance(domain, w);
}

}  // namespace detail

struct RangeCheck {
  bool compactly_contained = false;
  double margin = 0.0;  // min over boundary samples of dist(phi(z), bdry)
};

inline RangeCheck range_compactly_contained(const HolomorphicMap& map, const Domain& domain, std::size_t m,
                                            std::uint64_t seed) {
  if (!is_self_map(map, domain, m, seed).is_self_map) {
    throw domain_error("range_compactly_contained: map is not a self-map of the domain");
  }
  const auto pts = sample_boundary(domain, m, seed);
  std::vector<double> d(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { d[i] = detail::distance_in_closure(domain, map(pts[i])); });
  std::vector<double> g(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { g[i] = domain.gauge(map(pts[i])); });
  RangeCheck r;
  const auto polished = detail::boundary_gauge_max(map, domain, pts, g, seed).second;
  r.margin = std::min(*std::min_element(d.begin(), d.end()), detail::distance_in_closure(domain, map(polished)));
  r.compactly_contained = r.margin > 1e-6;
  return r;
}

/// Boundary samples p with dist(phi(p), bdry) < tol: an inner approximation of phi^{-1}(bdry) on the boundary.
inline std::vector<ComplexPoint> boundary_preimage_samples(const HolomorphicMap& map, const Domain& domain,
                                                           std::size_t m, double tol, std::uint64_t seed) {
  require_same_dimension(map.dim(), domain.dim(), "boundary_preimage_samples");
  const auto pts = sample_boundary(domain, m, seed);
  std::vector<char> keep(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { keep[i] = detail::distance_in_closure(domain, map(pts[i])) < tol; });
  std::vector<ComplexPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  return out;
}

inline HolomorphicMap inverse_linear(const HolomorphicMap& b) {
  const auto m = b.linear_matrix();
  if (std::abs(determinant(m)) == 0.0) throw domain_error("inverse_linear: singular linear map");
  return HolomorphicMap::linear(inverse(m));
}

/// B^{-1} o phi o B for a linear invertible B.
inline HolomorphicMap conjugate(const HolomorphicMap& map, const HolomorphicMap& b) {
  require_same_dimension(map.dim(), b.dim(), "conjugate");
  const auto b_inv = inverse_linear(b);
  return compose_maps(b_inv, compose_maps(map, b));
}

}  // namespace bergman_lab

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "polyalg.hpp"
#include "quadrature.hpp"

namespace bergman_lab {

/// (integral of |f|^p)^{1/p}, with the standard error carried through the p-th root.
template <class F>
IntegralResult norm_p(F&& f, const Domain& domain, double p, const QuadratureSpec& spec) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw domain_error("norm_p: p must lie in [1, inf)");
  IntegralResult r = integrate(
      domain, [&](const ComplexPoint& z) { return std::pow(std::abs(Complex(f(z))), p); }, spec);
  if (r.divergent) return r;
  const double integral = std::max(r.real(), 0.0);
  const double value = std::pow(integral, 1.0 / p);
  r.std_error = integral > 0.0 ? r.std_error * value / (p * integral) : r.std_error;
  r.value = value;
  return r;
}

/// Estimate of the A^2 inner product: integral of f * conj(g).
template <class F, class G>
IntegralResult inner_product(F&& f, G&& g, const Domain& domain, const QuadratureSpec& spec) {
  return integrate(
      domain, [&](const ComplexPoint& z) { return Complex(f(z)) * std::conj(Complex(g(z))); }, spec);
}

/// Exact ||z^alpha||^2 on a centered ball, polydisc or ellipsoid.
///
///   ball of radius R in C^n:   pi^n alpha! / (n + |alpha|)! * R^{2n + 2|alpha|}
///   polydisc:                  prod_k pi r_k^{2 alpha_k + 2} / (alpha_k + 1)
///   ellipsoid (z = A w):       prod_k a_k^{2 alpha_k + 2} * (unit-ball value)
inline double monomial_norm_sq(const MultiIndex& alpha, const Domain& domain) {
  require_same_dimension(alpha.size(), domain.dim(), "monomial_norm_sq");
  if (!domain.centered()) throw domain_error("monomial_norm_sq: monomials are orthogonal only on centered domains");
  const std::size_t n = domain.dim();
  double v = 1.0;
  if (domain.kind() == DomainKind::Polydisc) {
    for (std::size_t k = 0; k < n; ++k) {
      const double r = domain.axis(k);
      v *= std::numbers::pi * std::pow(r, 2.0 * alpha[k] + 2.0) / (alpha[k] + 1.0);
    }
    return v;
  }
  // pi^n alpha! / (n + |alpha|)!, accumulated as a product of ratios.
  for (std::size_t k = 0; k < n; ++k) {
    for (int e = 2; e <= alpha[k]; ++e) v *= e;
  }
  const int total = alpha.total_degree() + static_cast<int>(n);
  for (int e = 2; e <= total; ++e) v /= e;
  for (std::size_t k = 0; k < n; ++k) {
    v *= std::numbers::pi * std::pow(domain.axis(k), 2.0 * alpha[k] + 2.0);
  }
  return v;
}

struct BasisElement {
  MultiIndex alpha;
  double norm_sq;
  Domain domain;

  Complex evaluate(const ComplexPoint& z) const {
    Complex v = 1.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) v *= std::pow(z[k], alpha[k]);
    return v / std::sqrt(norm_sq);
  }
};

/// Orthonormal monomial basis e_alpha = z^alpha / ||z^alpha||, |alpha| <= d, graded-lex order.
inline std::vector<BasisElement> enumerate_basis(std::size_t n, int d, const Domain& domain) {
  if (d < 0) throw domain_error("enumerate_basis: degree must be >= 0");
  require_same_dimension(n, domain.dim(), "enumerate_basis");
  std::vector<BasisElement> basis;
  for (auto& a : enumerate_multi_indices(n, d)) {
    const double ns = monomial_norm_sq(a, domain);
    basis.push_back({std::move(a), ns, domain});
  }
  return basis;
}

}  // namespace bergman_lab

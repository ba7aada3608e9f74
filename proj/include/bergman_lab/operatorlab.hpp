#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bergman.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "maps.hpp"
#include "parallel.hpp"
#include "polyalg.hpp"
#include "quadrature.hpp"
#include "sequences.hpp"

namespace bergman_lab {

inline constexpr std::size_t max_basis_size = 10000;

/// Compression P_d C_phi P_d in the orthonormal monomial basis: entry (row beta, column alpha)
/// is <e_alpha o phi, e_beta>.
struct OperatorMatrix {
  int degree = 0;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXcd entries;
  HolomorphicMap map;
  Domain domain;
  bool exact = true;
};

namespace detail {

inline std::size_t basis_size(std::size_t n, int d) {
  // C(n + d, n), guarded against overflow.
  double s = 1.0;
  for (std::size_t k = 1; k <= n; ++k) s = s * static_cast<double>(d + static_cast<int>(k)) / static_cast<double>(k);
  return s > 1e15 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(std::llround(s));
}

inline void check_basis_size(std::size_t n, int d) {
  if (d < 0) throw domain_error("degree must be >= 0");
  if (basis_size(n, d) > max_basis_size) throw domain_error("basis size exceeds 10^4; lower the truncation degree");
}

inline MultiPoly monomial_of(const MultiIndex& a) { return MultiPoly::monomial(a, 1.0); }

}  // namespace detail

/// Exact compression: z^alpha o phi is expanded with polyalg and projected with the diagonal
/// monomial Gram matrix. Requires a polynomial self-map of a centered ball, polydisc or ellipsoid.
inline OperatorMatrix build_matrix(const HolomorphicMap& map, const Domain& domain, int d,
                                   const QuadratureSpec& quad = {}) {
  require_same_dimension(map.dim(), domain.dim(), "build_matrix");
  if (!domain.centered()) throw domain_error("build_matrix: monomial basis requires a centered domain");
  detail::check_basis_size(domain.dim(), d);
  if (!is_self_map(map, domain, 4000, quad.seed).is_self_map) {
    throw domain_error("build_matrix: map is not a self-map of the domain");
  }
  OperatorMatrix m{d, enumerate_multi_indices(domain.dim(), d), {}, map, domain, true};
  const std::size_t size = m.basis.size();
  std::vector<double> norms(size);
  for (std::size_t i = 0; i < size; ++i) norms[i] = std::sqrt(monomial_norm_sq(m.basis[i], domain));
  m.entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  parallel_for(size, [&](std::size_t col) {
    const auto image = compose(detail::monomial_of(m.basis[col]), map.components());
    for (std::size_t row = 0; row < size; ++row) {
      const Complex c = image.coefficient(m.basis[row]);
      if (c != Complex{}) {
        m.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = c * norms[row] / norms[col];
      }
    }
  });
  return m;
}

/// <e_alpha o phi, e_beta> by quadrature; the cross-check for the exact path.
inline IntegralResult matrix_entry_quadrature(const HolomorphicMap& map, const Domain& domain, const MultiIndex& alpha,
                                              const MultiIndex& beta, const QuadratureSpec& quad) {
  const double scale = 1.0 / std::sqrt(monomial_norm_sq(alpha, domain) * monomial_norm_sq(beta, domain));
  const auto pa = detail::monomial_of(alpha);
  const auto pb = detail::monomial_of(beta);
  auto r = integrate(
      domain, [&](const ComplexPoint& z) { return pa.evaluate(map(z)) * std::conj(pb.evaluate(z)); }, quad);
  r.value *= scale;
  r.std_error *= scale;
  return r;
}

/// Descending singular values.
inline std::vector<double> singular_values(const Eigen::MatrixXcd& a) {
  if (!a.allFinite()) throw numeric_error("singular_values: matrix has non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  for (double v : out) {
    if (!std::isfinite(v)) throw numeric_error("singular_values: SVD produced a non-finite value");
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline std::vector<double> singular_values(const OperatorMatrix& m) { return singular_values(m.entries); }

enum class Verdict { CompactLikely, NoncompactLikely, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::CompactLikely: return "COMPACT_LIKELY";
    case Verdict::NoncompactLikely: return "NONCOMPACT_LIKELY";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct CompactnessDiagnostic {
  std::vector<int> degrees;
  std::vector<std::vector<double>> singular_profiles;
  std::vector<int> plateau_counts;
  double tau = 0.9;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> essential_lower_bound;
};

inline int plateau_count(const std::vector<double>& sigma, double tau) {
  return static_cast<int>(std::count_if(sigma.begin(), sigma.end(), [tau](double s) { return s >= tau; }));
}

namespace detail {

inline void check_degrees(const std::vector<int>& degrees) {
  if (degrees.size() < 2) throw domain_error("compactness diagnostic needs at least two degrees");
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    if (degrees[i] <= degrees[i - 1]) throw domain_error("degrees must be strictly increasing");
  }
  if (degrees.front() < 0) throw domain_error("degrees must be >= 0");
}

// Profiles of the leading blocks of `full` (graded basis, so each truncation is a leading block).
inline CompactnessDiagnostic diagnose(const Eigen::MatrixXcd& full, std::size_t n, const std::vector<int>& degrees,
                                      double tau) {
  CompactnessDiagnostic diag;
  diag.degrees = degrees;
  diag.tau = tau;
  for (int d : degrees) {
    const auto size = static_cast<Eigen::Index>(basis_size(n, d));
    diag.singular_profiles.push_back(singular_values(full.topLeftCorner(size, size)));
    diag.plateau_counts.push_back(plateau_count(diag.singular_profiles.back(), tau));
  }

  const auto& counts = diag.plateau_counts;
  bool growing = degrees.size() >= 3;
  bool constant = true;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    growing = growing && counts[i] > counts[i - 1];
    constant = constant && counts[i] == counts[i - 1];
  }

  // Upper spectrum (sigma >= tau/2) must coincide between the last two truncations.
  const auto& prev = diag.singular_profiles[diag.singular_profiles.size() - 2];
  const auto& last = diag.singular_profiles.back();
  const int upper_prev = plateau_count(prev, 0.5 * tau);
  const int upper_last = plateau_count(last, 0.5 * tau);
  bool stable = upper_prev == upper_last;
  for (int k = 0; stable && k < upper_prev; ++k) {
    stable = std::abs(last[k] - prev[k]) <= 1e-3 * std::max(prev[k], 1e-12);
  }

  if (growing) {
    diag.verdict = Verdict::NoncompactLikely;
  } else if (constant && stable) {
    diag.verdict = Verdict::CompactLikely;
  } else {
    diag.verdict = Verdict::Inconclusive;
  }
  return diag;
}

}  // namespace detail

/// Plateau statistics of the compressions across degrees. NONCOMPACT_LIKELY when the number of
/// singular values >= tau strictly grows over at least three degrees; COMPACT_LIKELY when that
/// number is constant and the upper spectrum has stabilized.
inline CompactnessDiagnostic compactness_diagnostic(const HolomorphicMap& map, const Domain& domain,
                                                    const std::vector<int>& degrees, double tau,
                                                    const QuadratureSpec& quad = {}) {
  detail::check_degrees(degrees);
  if (!(tau > 0.0)) throw domain_error("compactness_diagnostic: tau must be positive");
  const auto m = build_matrix(map, domain, degrees.back(), quad);
  return detail::diagnose(m.entries, domain.dim(), degrees, tau);
}

struct EssentialBoundMember {
  double beta = 0.0;
  double alpha = 0.0;
  double composed_norm = 0.0;  // ||h o phi|| with ||h|| = 1
  double std_error = 0.0;
};

struct EssentialBound {
  std::vector<EssentialBoundMember> members;
  double bound = 0.0;  // min over members
};

/// min_j ||h_j o phi|| over normalized family members; a value bounded away from 0 witnesses
/// that C_phi does not send this weak-null family to 0.
inline EssentialBound essential_lower_bound(const HolomorphicMap& map, FamilyKind family, const Domain& domain,
                                            const std::vector<double>& betas, const QuadratureSpec& quad) {
  require_same_dimension(map.dim(), domain.dim(), "essential_lower_bound");
  if (betas.empty()) throw domain_error("essential_lower_bound: no family members");
  EssentialBound out;
  out.bound = std::numeric_limits<double>::infinity();
  for (double beta : betas) {
    const auto member = normalize(TestFamilySpec::from_beta(family, beta, domain), quad);
    const auto h = member.unnormalized();
    const auto r = integrate(domain, [&](const ComplexPoint& z) { return std::norm(h(map(z))); }, member.aim(quad));
    if (r.divergent) throw normalization_error("essential_lower_bound: composed member has no finite norm");
    EssentialBoundMember e;
    e.beta = beta;
    e.alpha = *member.alpha;
    const double composed = std::sqrt(std::max(r.real(), 0.0));
    e.composed_norm = composed / member.norm;
    const double rel_a = composed > 0.0 ? r.std_error / (2.0 * composed * composed) : 0.0;
    const double rel_b = member.norm_std_error / member.norm;
    e.std_error = e.composed_norm * std::sqrt(rel_a * rel_a + rel_b * rel_b);
    out.members.push_back(e);
    out.bound = std::min(out.bound, e.composed_norm);
  }
  return out;
}

inline EssentialBound essential_lower_bound(const HolomorphicMap& map, FamilyKind family, const Domain& domain,
                                            const std::vector<int>& j_list, const QuadratureSpec& quad) {
  std::vector<double> betas;
  for (int j : j_list) betas.push_back(beta_from_index(j));
  return essential_lower_bound(map, family, domain, betas, quad);
}

struct RatioResult {
  double ratio = 1.0;
  double std_error = 0.0;
};

/// ||f||_{2,Omega} / ||f||_{2,U_delta} from one shared sample set.
template <class F>
RatioResult reverse_carleson_ratio(F&& f, const Domain& domain, double delta, const QuadratureSpec& quad) {
  const BoundaryLayer layer(domain, delta);
  quad.validate();
  struct Sums {
    double a = 0.0, l = 0.0, aa = 0.0, ll = 0.0;
    std::size_t n = 0;
  };
  constexpr std::size_t batches = 10;
  std::vector<Sums> parts(batches);
  parallel_for(batches, [&](std::size_t b) {
    const std::size_t count = quad.samples / batches + (b < quad.samples % batches ? 1 : 0);
    Rng rng(derive_seed(quad.seed, 0xca00 + b));
    ComplexPoint z(domain.dim());
    Sums s;
    for (std::size_t i = 0; i < count; ++i) {
      detail::draw_interior(domain, rng, z);
      const double a = std::norm(Complex(f(z)));
      const double l = detail::closer_than(boundary_distance(domain, z), layer.delta()) ? a : 0.0;
      s.a += a;
      s.l += l;
      s.aa += a * a;
      s.ll += l * l;
      ++s.n;
    }
    parts[b] = s;
  });
  Sums t;
  for (const auto& p : parts) {
    t.a += p.a;
    t.l += p.l;
    t.aa += p.aa;
    t.ll += p.ll;
    t.n += p.n;
  }
  if (!(t.l > 0.0)) throw domain_error("reverse_carleson_ratio: zero norm on the boundary layer");
  const double nd = static_cast<double>(t.n);
  const double ma = t.a / nd;
  const double ml = t.l / nd;
  const double r2 = ma / ml;
  // Delta method for a ratio of correlated means; here a*l = l^2.
  const double var_a = t.aa / nd - ma * ma;
  const double var_l = t.ll / nd - ml * ml;
  const double cov = t.ll / nd - ma * ml;
  const double var_r2 = std::max(0.0, (var_a - 2.0 * r2 * cov + r2 * r2 * var_l) / (ml * ml * nd));
  RatioResult out;
  out.ratio = std::sqrt(r2);
  out.std_error = std::sqrt(var_r2) / (2.0 * out.ratio);
  return out;
}

struct ChangeOfVariables {
  IntegralResult lhs;  // ||h o B||^2 over dom1
  IntegralResult rhs;  // integral over dom2 of |h|^2 |J(B^{-1})|^2
  double residual = 0.0;
};

namespace detail {

inline void check_bijection(const HolomorphicMap& b, const Domain& dom1, const Domain& dom2, std::uint64_t seed) {
  const auto b_inv = inverse_linear(b);
  for (const auto& p : sample_boundary(dom1, 2000, seed)) {
    if (std::abs(dom2.gauge(b(p)) - 1.0) > 1e-9) throw domain_error("B does not map the boundary of dom1 onto dom2");
  }
  for (const auto& p : sample_boundary(dom2, 2000, seed)) {
    if (std::abs(dom1.gauge(b_inv(p)) - 1.0) > 1e-9) throw domain_error("B^{-1} does not map the boundary of dom2 onto dom1");
  }
}

}  // namespace detail

template <class F>
ChangeOfVariables change_of_variables_check(F&& h, const HolomorphicMap& b, const Domain& dom1, const Domain& dom2,
                                            const QuadratureSpec& quad) {
  require_same_dimension(b.dim(), dom1.dim(), "change_of_variables_check");
  require_same_dimension(b.dim(), dom2.dim(), "change_of_variables_check");
  detail::check_bijection(b, dom1, dom2, quad.seed);
  const double jac_inv_sq = std::norm(1.0 / determinant(b.linear_matrix()));
  ChangeOfVariables out;
  out.lhs = integrate(dom1, [&](const ComplexPoint& z) { return std::norm(Complex(h(b(z)))); }, quad);
  out.rhs = integrate(dom2, [&](const ComplexPoint& w) { return std::norm(Complex(h(w))) * jac_inv_sq; },
                      quad.with_seed(derive_seed(quad.seed, 0xcb)));
  const double scale = std::max(std::abs(out.lhs.real()), std::abs(out.rhs.real()));
  out.residual = scale > 0.0 ? std::abs(out.lhs.real() - out.rhs.real()) / scale : 0.0;
  return out;
}

struct ConjugationCheck {
  CompactnessDiagnostic original;    // C_phi on dom2
  CompactnessDiagnostic conjugated;  // C_{B^{-1} phi B} on dom1
  bool verdicts_agree = false;
  double max_profile_difference = 0.0;
};

/// Diagnoses C_phi on dom2 and C_psi, psi = B^{-1} o phi o B, on dom1. The dom1 basis is the
/// normalized pullback (B z)^alpha of the dom2 monomials: psi acts on P_alpha = (Bz)^alpha by
/// P_alpha o psi, which is re-expressed in the P basis by substituting z = B^{-1} w.
inline ConjugationCheck conjugation_invariance_check(const HolomorphicMap& map, const HolomorphicMap& b,
                                                     const Domain& dom1, const Domain& dom2,
                                                     const std::vector<int>& degrees, double tau,
                                                     const QuadratureSpec& quad = {}) {
  detail::check_degrees(degrees);
  detail::check_bijection(b, dom1, dom2, quad.seed);
  ConjugationCheck out;
  out.original = compactness_diagnostic(map, dom2, degrees, tau, quad);

  const auto psi = conjugate(map, b);
  const auto b_inv = inverse_linear(b);
  const int d = degrees.back();
  const auto basis = enumerate_multi_indices(dom1.dim(), d);
  std::vector<double> norms(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) norms[i] = std::sqrt(monomial_norm_sq(basis[i], dom2));
  Eigen::MatrixXcd entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis.size()),
                                                    static_cast<Eigen::Index>(basis.size()));
  parallel_for(basis.size(), [&](std::size_t col) {
    const auto pullback = compose(detail::monomial_of(basis[col]), b.components());
    const auto image = compose(pullback, psi.components());
    const auto coords = compose(image, b_inv.components());
    for (std::size_t row = 0; row < basis.size(); ++row) {
      const Complex c = coords.coefficient(basis[row]);
      if (c != Complex{}) {
        entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = c * norms[row] / norms[col];
      }
    }
  });
  out.conjugated = detail::diagnose(entries, dom1.dim(), degrees, tau);
  out.verdicts_agree = out.original.verdict == out.conjugated.verdict;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const auto& a = out.original.singular_profiles[i];
    const auto& c = out.conjugated.singular_profiles[i];
    for (std::size_t k = 0; k < a.size(); ++k) {
      out.max_profile_difference = std::max(out.max_profile_difference, std::abs(a[k] - c[k]));
    }
  }
  return out;
}

}  // namespace bergman_lab

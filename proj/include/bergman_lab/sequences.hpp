#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "random.hpp"

namespace bergman_lab {

using ScalarFunction = std::function<Complex(const ComplexPoint&)>;

/// GFamily: z1^{-beta} on a domain inside {Re z1 > 0}.
/// FFamily: (1 - z1)^{-beta} on a domain inside {Re z1 < 1}; same modulus as (z1 - 1)^{-beta}.
enum class FamilyKind { G, F };

inline std::string to_string(FamilyKind k) { return k == FamilyKind::G ? "g" : "f"; }

/// w^{-beta} on the principal branch, exp(-beta Log w).
inline Complex principal_power(Complex w, double beta) {
  if (w.imag() == 0.0 && w.real() <= 0.0) {
    throw branch_cut_error("principal_power: w lies on the closed negative real axis");
  }
  if (beta == 0.0) return 1.0;
  return std::exp(-beta * std::log(w));
}

inline double beta_from_index(int j) {
  if (j < 1) throw domain_error("beta_from_index: index must be >= 1");
  return 1.0 - 1.0 / static_cast<double>(j);
}

namespace detail {

// Extent of the domain's projection on the z1-plane along the real axis.
inline double min_re_z1(const Domain& d) { return d.center()[0].real() - d.projection_radius(0); }
inline double max_re_z1(const Domain& d) { return d.center()[0].real() + d.projection_radius(0); }

inline void check_beta(double beta) {
  if (!(beta >= 0.0 && beta < 2.0)) throw domain_error("family exponent must lie in [0, 2)");
}

}  // namespace detail

inline ScalarFunction make_f(double beta, const Domain& domain) {
  detail::check_beta(beta);
  if (detail::max_re_z1(domain) > 1.0) {
    throw domain_error("make_f: domain is not contained in {Re(1 - z1) > 0}");
  }
  return [beta](const ComplexPoint& z) { return principal_power(1.0 - z[0], beta); };
}

inline ScalarFunction make_g(double beta, const Domain& shifted_domain) {
  detail::check_beta(beta);
  if (detail::min_re_z1(shifted_domain) < 0.0) {
    throw domain_error("make_g: domain is not contained in {Re z1 > 0}");
  }
  return [beta](const ComplexPoint& z) { return principal_power(z[0], beta); };
}

/// One member of a singular test family together with its normalization.
struct TestFamilySpec {
  FamilyKind family = FamilyKind::F;
  double beta = 0.0;
  std::optional<int> index;
  std::optional<double> alpha;   // set by normalize()
  double norm = std::numeric_limits<double>::quiet_NaN();  // unnormalized A^2 norm
  double norm_std_error = std::numeric_limits<double>::quiet_NaN();
  Domain domain = Domain::unit_ball(2);
  ComplexPoint pole;  // (1,0,...,0) for F, (0,...,0) for G: the singular hyperplane meets the z1 axis here

  static TestFamilySpec from_beta(FamilyKind family, double beta, Domain domain) {
    detail::check_beta(beta);
    TestFamilySpec s;
    s.family = family;
    s.beta = beta;
    s.domain = std::move(domain);
    s.pole = ComplexPoint(s.domain.dim());
    if (family == FamilyKind::F) s.pole[0] = 1.0;
    s.unnormalized();  // validates the half-plane condition
    return s;
  }

  static TestFamilySpec from_index(FamilyKind family, int j, Domain domain) {
    auto s = from_beta(family, beta_from_index(j), std::move(domain));
    s.index = j;
    return s;
  }

  ScalarFunction unnormalized() const {
    return family == FamilyKind::F ? make_f(beta, domain) : make_g(beta, domain);
  }

  ScalarFunction normalized() const {
    if (!alpha) throw normalization_error("TestFamilySpec: member has not been normalized");
    auto h = unnormalized();
    const double a = *alpha;
    return [h, a](const ComplexPoint& z) { return a * h(z); };
  }

  /// The quadrature spec with its stratification focus on the pole.
  QuadratureSpec aim(const QuadratureSpec& quad) const { return quad.aimed_at(pole[0]); }
};

/// Sets alpha = 1 / ||h||; a divergent norm means the member is not in A^2.
inline TestFamilySpec normalize(TestFamilySpec spec, const QuadratureSpec& quad) {
  const auto h = spec.unnormalized();
  const auto r = integrate(spec.domain, [&](const ComplexPoint& z) { return std::norm(h(z)); }, spec.aim(quad));
  if (r.divergent || !(r.real() > 0.0)) {
    std::ostringstream os;
    os << "normalize: " << to_string(spec.family) << "-family member with beta=" << spec.beta << " on "
       << spec.domain.describe() << " has no finite A^2 norm";
    throw normalization_error(os.str());
  }
  spec.norm = std::sqrt(r.real());
  spec.norm_std_error = r.std_error / (2.0 * spec.norm);
  spec.alpha = 1.0 / spec.norm;
  return spec;
}

/// Largest |h| over `count` deterministic samples of K_eps = {dist(z, bdry) >= eps}.
inline double sup_on_compact(const ScalarFunction& h, const Domain& domain, double eps, std::size_t count,
                             std::uint64_t seed) {
  if (!(eps > 0.0 && eps < domain.inradius())) throw domain_error("sup_on_compact: eps must lie in (0, inradius)");
  Rng rng(derive_seed(seed, 0x4b));
  ComplexPoint z(domain.dim());
  double sup = 0.0;
  std::size_t kept = 0;
  for (std::size_t draws = 0; kept < count; ++draws) {
    if (draws > 1000 * count) throw numeric_error("sup_on_compact: K_eps is too thin to sample");
    detail::draw_interior(domain, rng, z);
    if (detail::closer_than(boundary_distance(domain, z), eps)) continue;
    sup = std::max(sup, std::abs(h(z)));
    ++kept;
  }
  return sup;
}

struct WeakNullEntry {
  int j = 0;
  double beta = 0.0;
  double alpha = 0.0;
  double alpha_std_error = 0.0;
  double norm = 0.0;  // normalized norm re-measured with an independent seed
  double norm_std_error = 0.0;
  double sup_compact = 0.0;
};

struct WeakNullReport {
  FamilyKind family = FamilyKind::F;
  double eps = 0.0;
  std::vector<WeakNullEntry> entries;
  bool alpha_decreasing = false;
  bool sup_decreasing = false;
  double limit_beta = 1.0;
  std::optional<double> alpha_limit;  // 1 / ||h_limit|| when the limit member is in A^2
  double alpha_limit_std_error = 0.0;
  std::optional<bool> weak_null;      // alpha_j -> 0; empty when inconclusive
};

/// Normalizes h_j for each j and reports the weak-null evidence: unit norms, alpha_j, and sup |h_j|
/// over K_eps. Whether alpha_j -> 0 is decided by the limit member beta = 1: alpha_j tends to
/// 1 / ||h_1|| when that norm is finite and to 0 when it diverges.
inline WeakNullReport weak_null_report(FamilyKind family, const Domain& domain, const std::vector<int>& j_list,
                                       double eps, const QuadratureSpec& quad, std::size_t sup_samples = 10000) {
  if (j_list.empty()) throw domain_error("weak_null_report: empty index list");
  WeakNullReport rep;
  rep.family = family;
  rep.eps = eps;
  const auto check_quad = quad.with_seed(derive_seed(quad.seed, 0x77));
  for (int j : j_list) {
    TestFamilySpec member;
    try {
      member = normalize(TestFamilySpec::from_index(family, j, domain), quad);
    } catch (const normalization_error& e) {
      throw normalization_error(std::string(e.what()) + " (index j=" + std::to_string(j) + ")");
    }
    const auto h = member.normalized();
    const auto again = integrate(domain, [&](const ComplexPoint& z) { return std::norm(h(z)); }, member.aim(check_quad));
    WeakNullEntry e;
    e.j = j;
    e.beta = member.beta;
    e.alpha = *member.alpha;
    e.alpha_std_error = e.alpha * member.norm_std_error / member.norm;
    e.norm = std::sqrt(std::max(again.real(), 0.0));
    e.norm_std_error = again.divergent ? std::numeric_limits<double>::infinity() : again.std_error / (2.0 * e.norm);
    e.sup_compact = sup_on_compact(h, domain, eps, sup_samples, quad.seed);
    rep.entries.push_back(e);
  }
  rep.alpha_decreasing = rep.entries.size() >= 2;
  rep.sup_decreasing = rep.entries.size() >= 2;
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    rep.alpha_decreasing = rep.alpha_decreasing && rep.entries[i].alpha < rep.entries[i - 1].alpha;
    rep.sup_decreasing = rep.sup_decreasing && rep.entries[i].sup_compact < rep.entries[i - 1].sup_compact;
  }
  if (rep.entries.size() >= 2) {
    const auto limit = TestFamilySpec::from_beta(family, rep.limit_beta, domain);
    const auto h = limit.unnormalized();
    const auto r = integrate(domain, [&](const ComplexPoint& z) { return std::norm(h(z)); }, limit.aim(quad));
    rep.weak_null = r.divergent;
    if (!r.divergent) {
      rep.alpha_limit = 1.0 / std::sqrt(r.real());
      rep.alpha_limit_std_error = 0.5 * *rep.alpha_limit * r.std_error / r.real();
    }
  }
  return rep;
}

struct NormCurvePoint {
  double beta = 0.0;
  double norm_sq = 0.0;
  double std_error = 0.0;
  bool divergent = false;
};

struct BlowupReport {
  std::vector<NormCurvePoint> curve;
  std::optional<double> beta_star;
};

/// Measures beta -> ||(pole term)^{-beta}||^2 on the grid with the pole-stratified engine and
/// places beta* between the largest finite and the smallest divergent grid point.
inline BlowupReport blowup_threshold(const Domain& domain, const std::vector<double>& beta_grid,
                                     const QuadratureSpec& quad, FamilyKind family = FamilyKind::F) {
  if (beta_grid.empty()) throw domain_error("blowup_threshold: empty grid");
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] >= 0.0 && beta_grid[i] < 2.0)) throw domain_error("blowup_threshold: grid must lie in [0, 2)");
    if (i && !(beta_grid[i] > beta_grid[i - 1])) throw domain_error("blowup_threshold: grid must be strictly increasing");
  }
  QuadratureSpec q = quad;
  q.method = QuadratureMethod::StratifiedMonteCarlo;
  BlowupReport rep;
  std::optional<double> largest_finite;
  std::optional<double> smallest_divergent;
  for (double beta : beta_grid) {
    const auto member = TestFamilySpec::from_beta(family, beta, domain);
    const auto h = member.unnormalized();
    const auto r = integrate(domain, [&](const ComplexPoint& z) { return std::norm(h(z)); }, member.aim(q));
    rep.curve.push_back({beta, r.divergent ? std::numeric_limits<double>::quiet_NaN() : r.real(),
                         r.divergent ? std::numeric_limits<double>::quiet_NaN() : r.std_error, r.divergent});
    if (r.divergent) {
      if (!smallest_divergent) smallest_divergent = beta;
    } else {
      largest_finite = beta;
    }
  }
  if (largest_finite && smallest_divergent) rep.beta_star = 0.5 * (*largest_finite + *smallest_divergent);
  return rep;
}

}  // namespace bergman_lab

#pragma once

// Experiment runner behind the `lab` CLI: JSON configs in, JSON reports and CSV curves out.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman.hpp"
#include "geometry.hpp"
#include "maps.hpp"
#include "operatorlab.hpp"
#include "polyalg.hpp"
#include "quadrature.hpp"
#include "sequences.hpp"

namespace bergman_lab {

using json = nlohmann::json;

/// Config problem, located at a line of the config text when possible.
class config_error : public error {
public:
  using error::error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"norms",       "carleson",          "conjugation",
                                              "jac-scan",    "bounded-scan",      "compact-range",
                                              "singular-preimage", "counterexample", "threshold",
                                              "weak-null"};
  return names;
}

inline std::string experiment_summary(const std::string& name) {
  static const std::map<std::string, std::string> s{
      {"norms", "Monte Carlo monomial norms against closed forms"},
      {"carleson", "boundary-layer (reverse Carleson) norm ratios"},
      {"conjugation", "change of variables and conjugation invariance under a linear B"},
      {"jac-scan", "boundary Jacobian scan"},
      {"bounded-scan", "boundary Jacobian scan with the operator-norm trend"},
      {"compact-range", "range containment margin with the compactness diagnostic"},
      {"singular-preimage", "verdict vs boundary preimage and Jacobian, per catalog map"},
      {"counterexample", "projection map: plateau growth and test-family lower bound"},
      {"threshold", "blow-up exponent of the boundary-pole family"},
      {"weak-null", "normalization and weak-null evidence for a test family"}};
  auto it = s.find(name);
  return it == s.end() ? std::string{} : it->second;
}

struct ExperimentConfig {
  std::string experiment;
  Domain domain = Domain::unit_ball(2);
  json map_spec = "identity";
  HolomorphicMap map = HolomorphicMap::identity(2);
  QuadratureSpec quad;
  std::vector<int> degrees{4, 6, 8};
  double tau = 0.9;
  std::vector<int> j_list{2, 4, 8, 16};
  std::vector<double> betas;
  std::vector<double> beta_grid;
  double delta = 0.2;
  double eps = 0.2;
  std::size_t boundary_samples = 10000;
  double tol = 1e-3;
  int max_degree = 4;
  FamilyKind family = FamilyKind::F;
  std::optional<Domain> dom1;
  json b_spec;
  std::optional<HolomorphicMap> b;
  json catalog;
  std::vector<std::string> functions;
  std::string output;
  json resolved;
};

namespace detail {

inline std::size_t line_of(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

inline std::string key_location(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return "config";
  return "line " + std::to_string(line_of(text, pos));
}

inline double parse_number(const std::string& s) {
  double v = 0.0;
  std::string_view sv(s);
  while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
  if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) throw domain_error("bad number '" + s + "'");
  return v;
}

inline std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    out.push_back(parse_number(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline Domain domain_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  if (dim < 1) throw domain_error("domain dim must be >= 1");
  const auto params = j.value("params", std::vector<double>{});
  Domain d = Domain::unit_ball(dim);
  if (kind == "ball") {
    if (params.size() > 1) throw domain_error("ball takes at most one param (radius)");
    d = Domain::ball(dim, params.empty() ? 1.0 : params[0]);
  } else if (kind == "polydisc" || kind == "ellipsoid") {
    if (params.size() != static_cast<std::size_t>(dim)) throw domain_error(kind + " needs one param per dimension");
    d = kind == "polydisc" ? Domain::polydisc(params) : Domain::ellipsoid(params);
  } else {
    throw domain_error("unknown domain kind '" + kind + "'");
  }
  if (j.contains("center")) {
    ComplexPoint c(static_cast<std::size_t>(dim));
    const auto& arr = j.at("center");
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(dim)) throw domain_error("center needs dim entries");
    for (std::size_t k = 0; k < c.dim(); ++k) {
      c[k] = arr[k].is_array() ? Complex(arr[k].at(0).get<double>(), arr[k].at(1).get<double>())
                               : Complex(arr[k].get<double>(), 0.0);
    }
    d = d.translated(c);
  }
  return d;
}

inline json domain_to_json(const Domain& d) {
  json j;
  j["kind"] = to_string(d.kind());
  j["dim"] = d.dim();
  j["params"] = d.kind() == DomainKind::Ball ? json::array({d.axis(0)})
                                             : json(std::vector<double>(d.axes().begin(), d.axes().end()));
  if (!d.centered()) {
    json c = json::array();
    for (const auto& v : d.center()) c.push_back({v.real(), v.imag()});
    j["center"] = c;
  }
  return j;
}

/// Named presets ("identity", "projection", "scale:c", "unitary:a,b", "swap", "diag:c1,...,cn")
/// or a list of component polynomials in the polyalg text form.
inline HolomorphicMap map_from_json(const json& spec, std::size_t n) {
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    const auto colon = s.find(':');
    const auto name = s.substr(0, colon);
    const auto args = colon == std::string::npos ? std::string{} : s.substr(colon + 1);
    if (name == "identity") return HolomorphicMap::identity(n);
    if (name == "projection") return HolomorphicMap::projection(n);
    if (name == "scale") return HolomorphicMap::scaling(n, detail::parse_number(args));
    if (name == "swap") {
      if (n != 2) throw domain_error("swap is defined for dim 2");
      return HolomorphicMap::swap();
    }
    if (name == "unitary") {
      if (n != 2) throw domain_error("unitary is defined for dim 2");
      const auto v = detail::parse_number_list(args);
      if (v.size() != 2) throw domain_error("unitary needs 'unitary:a,b'");
      return HolomorphicMap::unitary(v[0], v[1]);
    }
    if (name == "diag") {
      const auto v = detail::parse_number_list(args);
      if (v.size() != n) throw domain_error("diag needs one entry per dimension");
      ComplexMatrix m(n, std::vector<Complex>(n));
      for (std::size_t k = 0; k < n; ++k) m[k][k] = v[k];
      return HolomorphicMap::linear(m);
    }
    throw domain_error("unknown map preset '" + s + "'");
  }
  const json& comps = spec.is_object() ? spec.at("components") : spec;
  if (!comps.is_array() || comps.size() != n) throw domain_error("map needs one polynomial per dimension");
  std::vector<MultiPoly> c;
  for (const auto& p : comps) c.push_back(MultiPoly::from_text(p.get<std::string>(), n));
  return HolomorphicMap(std::move(c));
}

/// "1", "z1", "z1*z2", "z1^3" or polynomial text.
inline MultiPoly function_from_string(const std::string& s, std::size_t n) {
  if (s.find(':') != std::string::npos) return MultiPoly::from_text(s, n);
  MultiIndex a(n);
  if (s != "1") {
    std::size_t pos = 0;
    while (pos < s.size()) {
      auto end = s.find('*', pos);
      auto factor = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      pos = end == std::string::npos ? s.size() : end + 1;
      if (factor.size() < 2 || factor[0] != 'z') throw domain_error("bad function factor '" + factor + "'");
      const auto caret = factor.find('^');
      const int k = std::stoi(factor.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
      const int e = caret == std::string::npos ? 1 : std::stoi(factor.substr(caret + 1));
      if (k < 1 || static_cast<std::size_t>(k) > n || e < 0) throw domain_error("bad function factor '" + factor + "'");
      a.bump(static_cast<std::size_t>(k - 1), e);
    }
  }
  return MultiPoly::monomial(a, 1.0);
}

inline QuadratureSpec quadrature_from_json(const json& j) {
  QuadratureSpec q;
  const auto method = j.value("method", std::string("MonteCarlo"));
  if (method == "MonteCarlo") {
    q.method = QuadratureMethod::MonteCarlo;
  } else if (method == "StratifiedMonteCarlo") {
    q.method = QuadratureMethod::StratifiedMonteCarlo;
  } else {
    throw domain_error("unknown quadrature method '" + method + "'");
  }
  q.samples = j.value("samples", std::size_t{100000});
  q.seed = j.value("seed", std::uint64_t{1});
  q.strata = j.value("strata", 32);
  if (j.contains("focus")) q.focus = Complex(j.at("focus").at(0).get<double>(), j.at("focus").at(1).get<double>());
  q.validate();
  return q;
}

inline json quadrature_to_json(const QuadratureSpec& q) {
  json j{{"method", to_string(q.method)}, {"samples", q.samples}, {"seed", q.seed}, {"strata", q.strata}};
  if (q.focus) j["focus"] = {q.focus->real(), q.focus->imag()};
  return j;
}

inline json default_catalog() {
  return json::array({"identity", "projection", "scale:0.5", "unitary:0.6,0.8", "swap",
                      json::array({"0.5,0:0,0;0.5,0:1,0", ""}), json::array({"1,0:2,0", ""})});
}

/// Parses and validates a config; errors name the offending line.
inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error("line " + std::to_string(detail::line_of(text, e.byte ? e.byte - 1 : 0)) +
                       ": JSON syntax error: " + e.what());
  }
  if (!j.is_object()) throw config_error("line 1: config must be a JSON object");

  static const std::vector<std::string> known{"experiment", "domain", "map",      "quadrature", "degrees",
                                              "tau",        "j_list", "betas",    "beta_grid",  "delta",
                                              "eps",        "boundary_samples", "tol", "max_degree", "family",
                                              "dom1",       "B",      "catalog",  "functions",  "output"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw config_error(detail::key_location(text, it.key()) + ": unknown key '" + it.key() + "'");
    }
  }

  ExperimentConfig c;
  std::string current = "experiment";
  try {
    c.experiment = j.at("experiment").get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
      throw domain_error("unknown experiment '" + c.experiment + "'");
    }
    current = "domain";
    if (j.contains("domain")) c.domain = domain_from_json(j.at("domain"));
    const std::size_t n = c.domain.dim();
    current = "map";
    c.map_spec = j.value("map", json(c.experiment == "counterexample" ? "projection" : "identity"));
    c.map = map_from_json(c.map_spec, n);
    current = "quadrature";
    c.quad = quadrature_from_json(j.value("quadrature", json::object()));
    current = "degrees";
    c.degrees = j.value("degrees", c.degrees);
    current = "tau";
    c.tau = j.value("tau", c.tau);
    if (!(c.tau > 0.0)) throw domain_error("tau must be positive");
    current = "j_list";
    c.j_list = j.value("j_list", c.j_list);
    for (int v : c.j_list) {
      if (v < 1) throw domain_error("indices must be >= 1");
    }
    current = "betas";
    c.betas = j.value("betas", c.betas);
    current = "beta_grid";
    c.beta_grid = j.value("beta_grid", std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6});
    current = "delta";
    c.delta = j.value("delta", c.delta);
    current = "eps";
    c.eps = j.value("eps", c.eps);
    current = "boundary_samples";
    c.boundary_samples = j.value("boundary_samples", c.boundary_samples);
    if (c.boundary_samples < 1) throw domain_error("boundary_samples must be >= 1");
    current = "tol";
    c.tol = j.value("tol", c.tol);
    current = "max_degree";
    c.max_degree = j.value("max_degree", c.max_degree);
    current = "family";
    const auto fam = j.value("family", std::string("f"));
    if (fam != "f" && fam != "g") throw domain_error("family must be 'f' or 'g'");
    c.family = fam == "f" ? FamilyKind::F : FamilyKind::G;
    current = "dom1";
    if (j.contains("dom1")) c.dom1 = domain_from_json(j.at("dom1"));
    current = "B";
    if (j.contains("B")) {
      c.b_spec = j.at("B");
      c.b = map_from_json(c.b_spec, n);
      c.b->linear_matrix();
      inverse_linear(*c.b);
    }
    current = "catalog";
    c.catalog = j.value("catalog", default_catalog());
    for (const auto& m : c.catalog) map_from_json(m, n);
    current = "functions";
    c.functions = j.value("functions", std::vector<std::string>{"1", "z1", "z1*z2"});
    for (const auto& f : c.functions) function_from_string(f, n);
    current = "output";
    c.output = j.value("output", std::string{});

    current = "experiment";
    if (c.experiment == "conjugation" && (!c.dom1 || !c.b)) {
      throw domain_error("conjugation needs 'dom1' and 'B'");
    }
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(detail::key_location(text, current) + ": invalid '" + current + "': " + e.what());
  }

  c.resolved = json{{"experiment", c.experiment},
                    {"domain", domain_to_json(c.domain)},
                    {"map", c.map_spec},
                    {"quadrature", quadrature_to_json(c.quad)},
                    {"degrees", c.degrees},
                    {"tau", c.tau},
                    {"j_list", c.j_list},
                    {"betas", c.betas},
                    {"beta_grid", c.beta_grid},
                    {"delta", c.delta},
                    {"eps", c.eps},
                    {"boundary_samples", c.boundary_samples},
                    {"tol", c.tol},
                    {"max_degree", c.max_degree},
                    {"family", to_string(c.family)},
                    {"catalog", c.catalog},
                    {"functions", c.functions},
                    {"output", c.output}};
  if (c.dom1) c.resolved["dom1"] = domain_to_json(*c.dom1);
  if (c.b) c.resolved["B"] = c.b_spec;
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

struct ExperimentOutput {
  json report;
  std::map<std::string, std::string> csv;  // file suffix -> body
  bool ok = true;                          // false on a numeric failure recorded in the report
};

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string sigma_csv(const CompactnessDiagnostic& d) {
  std::string out = "degree,k,sigma\n";
  for (std::size_t i = 0; i < d.degrees.size(); ++i) {
    for (std::size_t k = 0; k < d.singular_profiles[i].size(); ++k) {
      out += std::to_string(d.degrees[i]) + "," + std::to_string(k) + "," + fmt(d.singular_profiles[i][k]) + "\n";
    }
  }
  return out;
}

inline json diagnostic_json(const CompactnessDiagnostic& d) {
  json j{{"degrees", d.degrees}, {"tau", d.tau}, {"plateau_counts", d.plateau_counts}, {"verdict", to_string(d.verdict)}};
  std::vector<double> top;
  for (const auto& p : d.singular_profiles) top.push_back(p.empty() ? 0.0 : p.front());
  j["operator_norms"] = top;
  j["essential_lower_bound"] = d.essential_lower_bound ? json(*d.essential_lower_bound) : json(nullptr);
  return j;
}

inline json jacobian_json(const JacobianReport& r) {
  json pt = json::array();
  for (const auto& c : r.argmin_point) pt.push_back({c.real(), c.imag()});
  return json{{"min_abs", r.min_abs}, {"max_abs", r.max_abs}, {"argmin_point", pt}, {"samples", r.samples}};
}

inline json integral_json(const IntegralResult& r) {
  return json{{"value", r.divergent ? json(nullptr) : json(r.real())},
              {"std_error", r.divergent ? json(nullptr) : json(r.std_error)},
              {"divergent", r.divergent},
              {"samples_used", r.samples_used}};
}

inline std::string alpha_header(std::size_t n) {
  std::string h;
  for (std::size_t k = 0; k < n; ++k) h += "a" + std::to_string(k + 1) + ",";
  return h;
}

inline std::string alpha_cells(const MultiIndex& a) {
  std::string c;
  for (std::size_t k = 0; k < a.size(); ++k) c += std::to_string(a[k]) + ",";
  return c;
}

inline std::string map_label(const json& spec) { return spec.is_string() ? spec.get<std::string>() : spec.dump(); }

}  // namespace detail

/// Runs one experiment; the report embeds the resolved config.
inline ExperimentOutput run_experiment(const ExperimentConfig& c) {
  using namespace detail;
  ExperimentOutput out;
  json& r = out.report;
  r["config"] = c.resolved;
  r["experiment"] = c.experiment;
  r["map"] = map_label(c.map_spec);
  r["domain"] = c.domain.describe();
  const std::size_t n = c.domain.dim();
  const auto& e = c.experiment;

  if (e == "norms") {
    std::string csv = alpha_header(n) + "closed_form,monte_carlo,std_error,z_score\n";
    json rows = json::array();
    bool all_within = true;
    for (const auto& a : enumerate_multi_indices(n, c.max_degree)) {
      const auto p = MultiPoly::monomial(a);
      const double exact = monomial_norm_sq(a, c.domain);
      const auto mc = integrate(c.domain, [&](const ComplexPoint& z) { return std::norm(p.evaluate(z)); }, c.quad);
      const double diff = mc.real() - exact;
      const double z = diff == 0.0 ? 0.0 : diff / mc.std_error;
      all_within = all_within && std::abs(z) <= 3.0;
      rows.push_back({{"alpha", a.str()}, {"closed_form", exact}, {"monte_carlo", mc.real()}, {"std_error", mc.std_error}});
      csv += alpha_cells(a) + fmt(exact) + "," + fmt(mc.real()) + "," + fmt(mc.std_error) + "," + fmt(z) + "\n";
    }
    r["monomials"] = rows;
    r["all_within_3_sigma"] = all_within;
    out.csv["norms"] = csv;
  } else if (e == "carleson") {
    std::string csv = alpha_header(n) + "degree,ratio,std_error\n";
    json rows = json::array();
    bool all_at_least_one = true;
    std::vector<double> mean_by_degree(static_cast<std::size_t>(c.max_degree) + 1, 0.0);
    std::vector<int> count_by_degree(mean_by_degree.size(), 0);
    for (const auto& a : enumerate_multi_indices(n, c.max_degree)) {
      const auto p = MultiPoly::monomial(a);
      const auto ratio = reverse_carleson_ratio([&](const ComplexPoint& z) { return p.evaluate(z); }, c.domain,
                                                c.delta, c.quad);
      all_at_least_one = all_at_least_one && ratio.ratio >= 1.0;
      mean_by_degree[a.total_degree()] += ratio.ratio;
      count_by_degree[a.total_degree()] += 1;
      rows.push_back({{"alpha", a.str()}, {"ratio", ratio.ratio}, {"std_error", ratio.std_error}});
      csv += alpha_cells(a) + std::to_string(a.total_degree()) + "," + fmt(ratio.ratio) + "," +
             fmt(ratio.std_error) + "\n";
    }
    bool decreasing = true;
    for (std::size_t d = 0; d < mean_by_degree.size(); ++d) {
      mean_by_degree[d] /= count_by_degree[d];
      if (d && !(mean_by_degree[d] < mean_by_degree[d - 1])) decreasing = false;
    }
    r["ratios"] = rows;
    r["mean_ratio_by_degree"] = mean_by_degree;
    r["all_at_least_one"] = all_at_least_one;
    r["decreasing_in_degree"] = decreasing;
    out.csv["ratios"] = csv;
  } else if (e == "conjugation") {
    json rows = json::array();
    for (const auto& f : c.functions) {
      const auto p = function_from_string(f, n);
      const auto cv = change_of_variables_check([&](const ComplexPoint& z) { return p.evaluate(z); }, *c.b, *c.dom1,
                                                c.domain, c.quad);
      rows.push_back({{"h", f}, {"lhs", integral_json(cv.lhs)}, {"rhs", integral_json(cv.rhs)}, {"residual", cv.residual}});
    }
    r["change_of_variables"] = rows;
    const auto chk = conjugation_invariance_check(c.map, *c.b, *c.dom1, c.domain, c.degrees, c.tau, c.quad);
    r["original"] = diagnostic_json(chk.original);
    r["conjugated"] = diagnostic_json(chk.conjugated);
    r["verdicts_agree"] = chk.verdicts_agree;
    r["max_profile_difference"] = chk.max_profile_difference;
    out.csv["sigma"] = sigma_csv(chk.original);
  } else if (e == "jac-scan") {
    r["jacobian"] = jacobian_json(boundary_jacobian_scan(c.map, c.domain, c.boundary_samples, c.quad.seed));
  } else if (e == "bounded-scan") {
    const auto jac = boundary_jacobian_scan(c.map, c.domain, c.boundary_samples, c.quad.seed);
    r["jacobian"] = jacobian_json(jac);
    r["jacobian_nonvanishing"] = jac.min_abs > 1e-6;
    const auto self = is_self_map(c.map, c.domain, c.boundary_samples, c.quad.seed);
    r["self_map"] = {{"is_self_map", self.is_self_map}, {"worst_violation", self.worst_violation}};
    if (self.is_self_map) {
      const auto diag = compactness_diagnostic(c.map, c.domain, c.degrees, c.tau, c.quad);
      r["diagnostic"] = diagnostic_json(diag);
      const auto& prof = diag.singular_profiles;
      const double prev = prof[prof.size() - 2].front();
      const double last = prof.back().front();
      r["norm_trend_stable"] = std::abs(last - prev) <= 1e-3 * std::max(prev, 1e-12);
      out.csv["sigma"] = sigma_csv(diag);
    }
  } else if (e == "compact-range") {
    const auto self = is_self_map(c.map, c.domain, c.boundary_samples, c.quad.seed);
    r["self_map"] = {{"is_self_map", self.is_self_map}, {"worst_violation", self.worst_violation}};
    if (!self.is_self_map) throw domain_error("compact-range: map is not a self-map of the domain");
    const auto range = range_compactly_contained(c.map, c.domain, c.boundary_samples, c.quad.seed);
    r["range"] = {{"compactly_contained", range.compactly_contained}, {"margin", range.margin}};
    const auto diag = compactness_diagnostic(c.map, c.domain, c.degrees, c.tau, c.quad);
    r["diagnostic"] = diagnostic_json(diag);
    out.csv["sigma"] = sigma_csv(diag);
  } else if (e == "singular-preimage") {
    json rows = json::array();
    bool consistent = true;
    for (const auto& spec : c.catalog) {
      const auto m = map_from_json(spec, n);
      json row{{"map", map_label(spec)}};
      const auto self = is_self_map(m, c.domain, c.boundary_samples, c.quad.seed);
      row["is_self_map"] = self.is_self_map;
      if (!self.is_self_map) {
        rows.push_back(row);
        continue;
      }
      const auto diag = compactness_diagnostic(m, c.domain, c.degrees, c.tau, c.quad);
      const auto pre = boundary_preimage_samples(m, c.domain, c.boundary_samples, c.tol, c.quad.seed);
      row["verdict"] = to_string(diag.verdict);
      row["plateau_counts"] = diag.plateau_counts;
      row["preimage_count"] = pre.size();
      if (!pre.empty()) {
        const auto jac = jacobian_scan(m, pre);
        row["preimage_min_abs_jacobian"] = jac.min_abs;
        if (diag.verdict == Verdict::CompactLikely && !(jac.min_abs < 1e-6)) consistent = false;
      }
      rows.push_back(row);
    }
    r["maps"] = rows;
    r["compact_maps_singular_on_preimage"] = consistent;
  } else if (e == "counterexample") {
    const auto diag_domain = c.domain;
    auto diag = compactness_diagnostic(c.map, diag_domain, c.degrees, c.tau, c.quad);
    const auto bound = c.betas.empty() ? essential_lower_bound(c.map, c.family, c.domain, c.j_list, c.quad)
                                       : essential_lower_bound(c.map, c.family, c.domain, c.betas, c.quad);
    diag.essential_lower_bound = bound.bound;
    r["diagnostic"] = diagnostic_json(diag);
    json members = json::array();
    for (const auto& m : bound.members) {
      members.push_back({{"beta", m.beta}, {"alpha", m.alpha}, {"composed_norm", m.composed_norm}, {"std_error", m.std_error}});
    }
    r["family_members"] = members;
    r["verdict"] = to_string(diag.verdict);
    r["essential_lower_bound"] = bound.bound;
    out.csv["sigma"] = sigma_csv(diag);
  } else if (e == "threshold") {
    const auto rep = blowup_threshold(c.domain, c.beta_grid, c.quad, c.family);
    std::string csv = "beta,norm_sq,std_error,divergence_flag\n";
    json curve = json::array();
    for (const auto& p : rep.curve) {
      csv += fmt(p.beta) + "," + fmt(p.norm_sq) + "," + fmt(p.std_error) + "," + (p.divergent ? "1" : "0") + "\n";
      curve.push_back({{"beta", p.beta},
                       {"norm_sq", p.divergent ? json(nullptr) : json(p.norm_sq)},
                       {"std_error", p.divergent ? json(nullptr) : json(p.std_error)},
                       {"divergent", p.divergent}});
    }
    r["curve"] = curve;
    r["beta_star"] = rep.beta_star ? json(*rep.beta_star) : json(nullptr);
    out.csv["curve"] = csv;
  } else if (e == "weak-null") {
    const auto rep = weak_null_report(c.family, c.domain, c.j_list, c.eps, c.quad);
    json rows = json::array();
    for (const auto& en : rep.entries) {
      rows.push_back({{"j", en.j},
                      {"beta", en.beta},
                      {"alpha", en.alpha},
                      {"alpha_std_error", en.alpha_std_error},
                      {"norm", en.norm},
                      {"norm_std_error", en.norm_std_error},
                      {"sup_compact", en.sup_compact}});
    }
    r["members"] = rows;
    r["alpha_decreasing"] = rep.alpha_decreasing;
    r["sup_decreasing"] = rep.sup_decreasing;
    r["alpha_limit"] = rep.alpha_limit ? json(*rep.alpha_limit) : json(nullptr);
    r["alpha_limit_std_error"] = rep.alpha_limit ? json(rep.alpha_limit_std_error) : json(nullptr);
    r["weak_null"] = rep.weak_null ? json(*rep.weak_null) : json("inconclusive");
  }
  return out;
}

/// Writes <prefix>.json and <prefix>_<name>.csv files (LF endings).
inline std::vector<std::string> write_outputs(const ExperimentOutput& out, const std::string& prefix) {
  std::vector<std::string> written;
  auto put = [&](const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot write '" + path + "'");
    f << body;
    written.push_back(path);
  };
  put(prefix + ".json", out.report.dump(2) + "\n");
  for (const auto& [name, body] : out.csv) put(prefix + "_" + name + ".csv", body);
  return written;
}

}  // namespace bergman_lab

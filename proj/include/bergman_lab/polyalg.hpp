#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace bergman_lab {

/// Exponent vector of a monomial z^alpha.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : e_(n, 0) {}
  MultiIndex(std::initializer_list<int> e) : e_(e) { check(); }
  explicit MultiIndex(std::vector<int> e) : e_(std::move(e)) { check(); }

  static MultiIndex unit(std::size_t n, std::size_t k) {
    MultiIndex m(n);
    m.e_[k] = 1;
    return m;
  }

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t k) const { return e_[k]; }
  std::span<const int> exponents() const { return e_; }
  int total_degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }

  MultiIndex& bump(std::size_t k, int by) {
    e_[k] += by;
    check();
    return *this;
  }

  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
    require_same_dimension(a.size(), b.size(), "MultiIndex addition");
    for (std::size_t k = 0; k < a.size(); ++k) a.e_[k] += b.e_[k];
    return a;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string str() const {
    std::string s = "(";
    for (std::size_t k = 0; k < e_.size(); ++k) s += (k ? "," : "") + std::to_string(e_[k]);
    return s + ")";
  }

private:
  void check() const {
    for (int v : e_) {
      if (v < 0) throw domain_error("MultiIndex: exponents must be nonnegative");
    }
  }
  std::vector<int> e_;
};

/// Graded-lex order: lower total degree first; within a degree, larger leading exponents first,
/// so (0,0) < (1,0) < (0,1) < (2,0) < (1,1) < (0,2).
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int da = a.total_degree();
    const int db = b.total_degree();
    if (da != db) return da < db;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] != b[k]) return a[k] > b[k];
    }
    return false;
  }
};

/// All multi-indices of length n with total degree <= d, in graded-lex order.
inline std::vector<MultiIndex> enumerate_multi_indices(std::size_t n, int d) {
  if (d < 0) throw domain_error("enumerate_multi_indices: degree must be >= 0");
  std::vector<MultiIndex> out;
  for (int deg = 0; deg <= d; ++deg) {
    // Exponent vectors of exact degree deg, leading exponent descending.
    std::vector<int> e(n, 0);
    auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
      if (k + 1 == n) {
        e[k] = remaining;
        out.emplace_back(e);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        e[k] = v;
        self(self, k + 1, remaining - v);
      }
    };
    if (n == 0) {
      if (deg == 0) out.emplace_back(std::vector<int>{});
      continue;
    }
    rec(rec, 0, deg);
  }
  return out;
}

/// Sparse polynomial in n complex variables with complex coefficients.
/// Zero coefficients are never stored; the zero polynomial has degree -1.
class MultiPoly {
public:
  using Terms = std::map<MultiIndex, Complex, GradedLexLess>;

  explicit MultiPoly(std::size_t n = 0) : n_(n) {}

  static MultiPoly constant(std::size_t n, Complex c) { return monomial(MultiIndex(n), c); }

  static MultiPoly variable(std::size_t n, std::size_t k) {
    if (k >= n) throw domain_error("MultiPoly::variable: axis out of range");
    return monomial(MultiIndex::unit(n, k), 1.0);
  }

  static MultiPoly monomial(const MultiIndex& alpha, Complex c = 1.0) {
    MultiPoly p(alpha.size());
    if (c != Complex{}) p.terms_.emplace(alpha, c);
    return p;
  }

  std::size_t dim() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const { return terms_.empty() ? -1 : std::prev(terms_.end())->first.total_degree(); }

  Complex coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Complex{} : it->second;
  }

  // Adds c to the coefficient of z^alpha, dropping it if the sum is exactly zero.
  void accumulate(const MultiIndex& alpha, Complex c) {
    require_same_dimension(alpha.size(), n_, "MultiPoly::accumulate");
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex{}) terms_.erase(it);
    }
  }

  MultiPoly& operator+=(const MultiPoly& q) {
    require_same_dimension(n_, q.n_, "MultiPoly addition");
    for (const auto& [a, c] : q.terms_) accumulate(a, c);
    return *this;
  }

  MultiPoly& operator-=(const MultiPoly& q) {
    require_same_dimension(n_, q.n_, "MultiPoly subtraction");
    for (const auto& [a, c] : q.terms_) accumulate(a, -c);
    return *this;
  }

  MultiPoly& operator*=(Complex s) {
    if (s == Complex{}) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = (it->second == Complex{}) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend MultiPoly operator+(MultiPoly p, const MultiPoly& q) { return p += q; }
  friend MultiPoly operator-(MultiPoly p, const MultiPoly& q) { return p -= q; }
  friend MultiPoly operator-(MultiPoly p) { return p *= -1.0; }
  friend MultiPoly operator*(Complex s, MultiPoly p) { return p *= s; }
  friend MultiPoly operator*(MultiPoly p, Complex s) { return p *= s; }

  friend MultiPoly operator*(const MultiPoly& p, const MultiPoly& q) {
    require_same_dimension(p.n_, q.n_, "MultiPoly multiplication");
    MultiPoly r(p.n_);
    for (const auto& [a, ca] : p.terms_) {
      for (const auto& [b, cb] : q.terms_) r.accumulate(a + b, ca * cb);
    }
    return r;
  }

  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

  Complex evaluate(const ComplexPoint& z) const {
    require_same_dimension(z.dim(), n_, "MultiPoly::evaluate");
    if (terms_.empty()) return {};
    // Power table per variable, then one product per term.
    std::vector<std::vector<Complex>> powers(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      int top = 0;
      for (const auto& [a, c] : terms_) top = std::max(top, a[k]);
      powers[k].resize(static_cast<std::size_t>(top) + 1);
      powers[k][0] = 1.0;
      for (int e = 1; e <= top; ++e) powers[k][e] = powers[k][e - 1] * z[k];
    }
    Complex sum;
    for (const auto& [a, c] : terms_) {
      Complex t = c;
      for (std::size_t k = 0; k < n_; ++k) {
        if (a[k]) t *= powers[k][a[k]];
      }
      sum += t;
    }
    return sum;
  }

  /// Formal complex partial derivative along axis k (0-based).
  MultiPoly partial_derivative(std::size_t k) const {
    if (k >= n_) throw domain_error("partial_derivative: axis out of range");
    MultiPoly r(n_);
    for (const auto& [a, c] : terms_) {
      if (a[k] == 0) continue;
      MultiIndex b = a;
      b.bump(k, -1);
      r.accumulate(b, c * static_cast<double>(a[k]));
    }
    return r;
  }

  /// Drops coefficients with modulus <= tol.
  MultiPoly chopped(double tol) const {
    MultiPoly r(n_);
    for (const auto& [a, c] : terms_) {
      if (std::abs(c) > tol) r.terms_.emplace(a, c);
    }
    return r;
  }

  /// One "re,im:e1,...,en" line per term, graded-lex sorted.
  std::string to_text() const {
    std::string out;
    for (const auto& [a, c] : terms_) {
      out += format_double(c.real());
      out += ',';
      out += format_double(c.imag());
      out += ':';
      for (std::size_t k = 0; k < n_; ++k) {
        if (k) out += ',';
        out += std::to_string(a[k]);
      }
      out += '\n';
    }
    return out;
  }

  /// Parses the text form. Terms are separated by newlines or ';'; blank lines are skipped.
  /// n = 0 infers the dimension from the first term.
  static MultiPoly from_text(std::string_view text, std::size_t n = 0) {
    MultiPoly p(n);
    bool have_dim = n != 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = text.find_first_of("\n;", pos);
      std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
      pos = (end == std::string_view::npos) ? text.size() + 1 : end + 1;
      ++line_no;
      line = trim(line);
      if (line.empty()) continue;
      auto fail = [&](const std::string& why) {
        throw domain_error("polynomial term " + std::to_string(line_no) + " ('" + std::string(line) + "'): " + why);
      };
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) fail("missing ':'");
      const auto coeff = line.substr(0, colon);
      const auto comma = coeff.find(',');
      if (comma == std::string_view::npos) fail("coefficient must be 're,im'");
      double re = 0.0, im = 0.0;
      if (!parse_double(trim(coeff.substr(0, comma)), re) || !parse_double(trim(coeff.substr(comma + 1)), im)) {
        fail("bad coefficient");
      }
      std::vector<int> exps;
      std::string_view rest = line.substr(colon + 1);
      while (true) {
        const auto c = rest.find(',');
        const auto tok = trim(rest.substr(0, c));
        int v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) fail("bad exponent");
        exps.push_back(v);
        if (c == std::string_view::npos) break;
        rest = rest.substr(c + 1);
      }
      if (!have_dim) {
        p.n_ = exps.size();
        have_dim = true;
      }
      if (exps.size() != p.n_) fail("expected " + std::to_string(p.n_) + " exponents");
      p.accumulate(MultiIndex(std::move(exps)), Complex(re, im));
    }
    return p;
  }

private:
  static std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  }

  static bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  std::size_t n_;
  Terms terms_;
};

/// p(maps_1, ..., maps_n), expanded exactly. Powers of each component are memoized.
inline MultiPoly compose(const MultiPoly& p, std::span<const MultiPoly> maps) {
  require_same_dimension(maps.size(), p.dim(), "compose: number of components");
  if (maps.empty()) return p;
  const std::size_t m = maps.front().dim();
  for (const auto& q : maps) require_same_dimension(q.dim(), m, "compose: component dimension");

  std::vector<std::vector<MultiPoly>> powers(maps.size());
  auto power = [&](std::size_t k, int e) -> const MultiPoly& {
    auto& cache = powers[k];
    if (cache.empty()) cache.push_back(MultiPoly::constant(m, 1.0));
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * maps[k]);
    return cache[static_cast<std::size_t>(e)];
  };

  MultiPoly result(m);
  for (const auto& [alpha, c] : p.terms()) {
    MultiPoly term = MultiPoly::constant(m, c);
    for (std::size_t k = 0; k < maps.size() && !term.is_zero(); ++k) {
      if (alpha[k]) term = term * power(k, alpha[k]);
    }
    result += term;
  }
  return result;
}

inline MultiPoly compose(const MultiPoly& p, std::initializer_list<MultiPoly> maps) {
  return compose(p, std::span<const MultiPoly>(maps.begin(), maps.size()));
}

}  // namespace bergman_lab

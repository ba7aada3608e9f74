#include <gtest/gtest.h>

#include <random>

#include <bergman_lab/polyalg.hpp>

using namespace bergman_lab;

namespace {

MultiPoly z(std::size_t k) { return MultiPoly::variable(2, k); }

// Random polynomial with small integer coefficients, so ring identities hold exactly.
MultiPoly random_int_poly(std::mt19937_64& g, std::size_t n, int deg, int terms) {
  std::uniform_int_distribution<int> coef(-5, 5), e(0, deg);
  MultiPoly p(n);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> a(n);
    int left = deg;
    for (auto& x : a) {
      x = std::uniform_int_distribution<int>(0, left)(g);
      left -= x;
    }
    p.accumulate(MultiIndex(a), Complex(coef(g), coef(g)));
  }
  return p;
}

MultiPoly random_real_poly(std::mt19937_64& g, std::size_t n, int deg, int terms) {
  std::uniform_real_distribution<double> c(-1, 1);
  MultiPoly p(n);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> a(n);
    int left = deg;
    for (auto& x : a) {
      x = std::uniform_int_distribution<int>(0, left)(g);
      left -= x;
    }
    p.accumulate(MultiIndex(a), Complex(c(g), c(g)));
  }
  return p;
}

ComplexPoint random_point(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> c(-1, 1);
  ComplexPoint p(n);
  for (std::size_t k = 0; k < n; ++k) p[k] = Complex(c(g), c(g));
  return p;
}

}  // namespace

TEST(MultiIndex, Basics) {
  const MultiIndex a{2, 1};
  EXPECT_EQ(a.total_degree(), 3);
  EXPECT_EQ((a + MultiIndex{1, 0}), (MultiIndex{3, 1}));
  EXPECT_THROW(MultiIndex({1, -1}), domain_error);
  EXPECT_EQ(a.str(), "(2,1)");
}

TEST(MultiIndex, GradedLexOrder) {
  const auto idx = enumerate_multi_indices(2, 2);
  const std::vector<MultiIndex> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(idx, want);
  EXPECT_EQ(enumerate_multi_indices(2, 0).size(), 1u);
  EXPECT_EQ(enumerate_multi_indices(2, 8).size(), 45u);
  EXPECT_EQ(enumerate_multi_indices(3, 4).size(), 35u);
  EXPECT_THROW(enumerate_multi_indices(2, -1), domain_error);
}

TEST(MultiPoly, Arithmetic) {
  EXPECT_EQ(z(0) * z(1), MultiPoly::monomial({1, 1}));
  const auto s = (z(0) + z(1)) * (z(0) + z(1));
  EXPECT_EQ(s, MultiPoly::monomial({2, 0}) + 2.0 * MultiPoly::monomial({1, 1}) + MultiPoly::monomial({0, 2}));
  const auto p = s + MultiPoly::constant(2, Complex(0, 3));
  const auto zero = p + (-1.0) * p;
  EXPECT_TRUE(zero.is_zero());
  EXPECT_TRUE(zero.terms().empty());
  EXPECT_EQ(zero.degree(), -1);
  EXPECT_EQ(p.degree(), 2);
  EXPECT_THROW(z(0) + MultiPoly::variable(3, 0), dimension_error);
  EXPECT_THROW(MultiPoly::variable(2, 2), domain_error);
}

TEST(MultiPoly, RingAxiomsExactOnIntegers) {
  std::mt19937_64 g(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_int_poly(g, 3, 3, 5);
    const auto q = random_int_poly(g, 3, 3, 5);
    const auto r = random_int_poly(g, 3, 2, 4);
    EXPECT_EQ(p + q, q + p);
    EXPECT_EQ((p + q) + r, p + (q + r));
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ((p * q) * r, p * (q * r));
    EXPECT_EQ(p * (q + r), p * q + p * r);
    EXPECT_EQ(p * MultiPoly::constant(3, 1.0), p);
    EXPECT_TRUE((p - p).is_zero());
    EXPECT_TRUE((p * MultiPoly(3)).is_zero());
  }
}

TEST(MultiPoly, Compose) {
  const auto p = MultiPoly::monomial({2, 0});
  EXPECT_EQ(compose(p, {z(0) + z(1), z(1)}), (z(0) + z(1)) * (z(0) + z(1)));
  std::mt19937_64 g(1);
  const auto q = random_int_poly(g, 2, 4, 6);
  EXPECT_EQ(compose(q, {z(0), z(1)}), q);
  EXPECT_THROW(compose(q, {z(0)}), dimension_error);
}

TEST(MultiPoly, ComposeCommutesWithEvaluation) {
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_real_poly(g, 2, 4, 6);
    const std::vector<MultiPoly> maps{random_real_poly(g, 2, 2, 3), random_real_poly(g, 2, 2, 3)};
    const auto pt = random_point(g, 2);
    const ComplexPoint images{maps[0].evaluate(pt), maps[1].evaluate(pt)};
    EXPECT_LT(std::abs(compose(p, maps).evaluate(pt) - p.evaluate(images)), 1e-12);
  }
}

TEST(MultiPoly, PartialDerivative) {
  EXPECT_EQ(MultiPoly::monomial({2, 1}).partial_derivative(0), 2.0 * MultiPoly::monomial({1, 1}));
  EXPECT_TRUE(MultiPoly::monomial({3, 0}).partial_derivative(1).is_zero());
  EXPECT_THROW(z(0).partial_derivative(2), domain_error);
}

TEST(MultiPoly, LeibnizRuleExact) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_int_poly(g, 2, 3, 5);
    const auto q = random_int_poly(g, 2, 3, 5);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ((p * q).partial_derivative(k), p.partial_derivative(k) * q + p * q.partial_derivative(k));
    }
  }
}

TEST(MultiPoly, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 g(5);
  const auto p = random_real_poly(g, 2, 5, 8);
  const auto pt = random_point(g, 2);
  const double h = 1e-6;
  for (std::size_t k = 0; k < 2; ++k) {
    ComplexPoint a = pt, b = pt;
    a[k] += h;
    b[k] -= h;
    const Complex fd = (p.evaluate(a) - p.evaluate(b)) / (2 * h);
    EXPECT_LT(std::abs(fd - p.partial_derivative(k).evaluate(pt)), 1e-6);
  }
}

TEST(MultiPoly, Evaluate) {
  const auto p = MultiPoly::monomial({2, 0}) + z(1);
  EXPECT_EQ(p.evaluate({2.0, Complex(0, 3)}), Complex(4, 3));
  EXPECT_EQ(MultiPoly(2).evaluate({Complex(1, 2), 5.0}), Complex{});
  EXPECT_THROW(p.evaluate({1.0}), dimension_error);
}

TEST(MultiPoly, TextRoundTrip) {
  std::mt19937_64 g(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_real_poly(g, 3, 4, 6);
    EXPECT_EQ(MultiPoly::from_text(p.to_text(), 3), p);
  }
  const auto q = MultiPoly::from_text("0.5,0:0,0;0.5,0:1,0", 2);
  EXPECT_EQ(q, 0.5 * MultiPoly::constant(2, 1.0) + 0.5 * z(0));
  EXPECT_TRUE(MultiPoly::from_text("", 2).is_zero());
  EXPECT_THROW(MultiPoly::from_text("1,0:1", 2), domain_error);
  EXPECT_THROW(MultiPoly::from_text("x,0:1,0", 2), domain_error);
  EXPECT_THROW(MultiPoly::from_text("1,0:1,-1", 2), domain_error);
}

TEST(MultiPoly, Chopped) {
  const auto p = z(0) + 1e-14 * z(1);
  EXPECT_EQ(p.chopped(1e-12), z(0));
}

TEST(Invariants, ComposeIsAssociative) {
  std::mt19937_64 g(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_int_poly(g, 2, 3, 4);
    const std::vector<MultiPoly> f{random_int_poly(g, 2, 2, 3), random_int_poly(g, 2, 2, 3)};
    const std::vector<MultiPoly> h{random_int_poly(g, 2, 2, 3), random_int_poly(g, 2, 2, 3)};
    const std::vector<MultiPoly> fh{compose(f[0], h), compose(f[1], h)};
    EXPECT_EQ(compose(compose(p, f), h), compose(p, fh));
  }
}

TEST(Invariants, MixedPartialsCommute) {
  std::mt19937_64 g(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_real_poly(g, 3, 5, 8);
    EXPECT_EQ(p.partial_derivative(0).partial_derivative(1), p.partial_derivative(1).partial_derivative(0));
    EXPECT_EQ(p.partial_derivative(2).partial_derivative(1), p.partial_derivative(1).partial_derivative(2));
  }
}

TEST(Invariants, TextFormIsAFixedPoint) {
  std::mt19937_64 g(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_real_poly(g, 2, 4, 6).to_text();
    EXPECT_EQ(MultiPoly::from_text(t, 2).to_text(), t);
  }
}

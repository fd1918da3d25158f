// Jet arithmetic is checked against a second, independent route: evaluating
// the expression tree directly in truncated Taylor arithmetic (composition
// with the univariate series of each elementary function), versus the
// production route of symbolic partials evaluated at the point.

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oneill/geometry.hpp"
#include "oneill/jet.hpp"

namespace oneill {
namespace {

// f(a) for a jet `a` given f^(k)(a0)/k! for k = 0..order.
Jet compose(Jet const& a, std::vector<double> const& taylor) {
  Jet h = a;
  h.coefficients()[0] = 0.0;
  Jet result = Jet::constant(a.space_ptr(), a.order(), taylor[0]);
  Jet power = Jet::constant(a.space_ptr(), a.order(), 1.0);
  for (std::size_t k = 1; k < taylor.size(); ++k) {
    power = power * h;
    result += taylor[k] * power;
  }
  return result;
}

Jet jet_eval(Expr const& e, std::vector<std::string> const& names,
             std::vector<double> const& p,
             std::shared_ptr<JetSpace const> const& space, int order) {
  auto rec = [&](auto&& self, Expr const& x) -> Jet {
    switch (x.op()) {
      case Op::kConstant:
        return Jet::constant(space, order, x.value());
      case Op::kVariable: {
        int const i = static_cast<int>(
            std::find(names.begin(), names.end(), x.name()) - names.begin());
        return Jet::coordinate(space, order, i, p[i]);
      }
      case Op::kAdd: return self(self, x.lhs()) + self(self, x.rhs());
      case Op::kSub: return self(self, x.lhs()) - self(self, x.rhs());
      case Op::kMul: return self(self, x.lhs()) * self(self, x.rhs());
      case Op::kDiv: return self(self, x.lhs()) / self(self, x.rhs());
      case Op::kNeg: return -self(self, x.lhs());
      default: break;
    }
    Jet const a = self(self, x.lhs());
    double const a0 = a.value();
    std::vector<double> t(order + 1);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      double dk = 0.0;
      switch (x.op()) {
        case Op::kSin: dk = std::sin(a0 + k * M_PI / 2); break;
        case Op::kCos: dk = std::cos(a0 + k * M_PI / 2); break;
        case Op::kExp: dk = std::exp(a0); break;
        case Op::kLog:
          dk = k == 0 ? std::log(a0)
                      : std::pow(-1.0, k - 1) * std::tgamma(k) / std::pow(a0, k);
          break;
        case Op::kPow:
        case Op::kSqrt: {
          double const n = x.op() == Op::kSqrt ? 0.5 : x.value();
          double falling = 1.0;
          for (int j = 0; j < k; ++j) falling *= (n - j);
          dk = falling * std::pow(a0, n - k);
          break;
        }
        default:
          ADD_FAILURE() << "unsupported op in oracle";
      }
      t[k] = dk / fact;
    }
    return compose(a, t);
  };
  return rec(rec, e);
}

TEST(JetSpaceTest, GradedLayout) {
  JetSpace const s(3, 4);
  EXPECT_EQ(s.size(0), 1u);
  EXPECT_EQ(s.size(1), 4u);
  EXPECT_EQ(s.size(2), 10u);
  EXPECT_EQ(s.size(4), 35u);
  for (std::size_t m = 0; m < s.size(4); ++m) {
    EXPECT_EQ(s.index(s.exponents(m)), m);
  }
}

TEST(JetTest, PolynomialProductAndDerivative) {
  auto const space = JetSpace::make(2, 3);
  Jet const x = Jet::coordinate(space, 3, 0, 2.0);
  Jet const y = Jet::coordinate(space, 3, 1, -1.0);
  Jet const f = x * x * y;  // x^2 y
  EXPECT_DOUBLE_EQ(f.value(), -4.0);
  EXPECT_DOUBLE_EQ(f.partial(std::array{1, 0}), -4.0);   // 2xy
  EXPECT_DOUBLE_EQ(f.partial(std::array{0, 1}), 4.0);    // x^2
  EXPECT_DOUBLE_EQ(f.partial(std::array{2, 1}), 2.0);    // 2
  EXPECT_DOUBLE_EQ(f.partial(std::array{1, 1}), 4.0);    // 2x
  Jet const fx = f.derivative(0);
  EXPECT_EQ(fx.order(), 2);
  EXPECT_DOUBLE_EQ(fx.partial(std::array{0, 1}), 4.0);
}

TEST(JetTest, ReciprocalInvertsProduct) {
  auto const space = JetSpace::make(2, 4);
  Jet const x = Jet::coordinate(space, 4, 0, 0.3);
  Jet const y = Jet::coordinate(space, 4, 1, 1.1);
  Jet const a = Jet::constant(space, 4, 2.0) + x * y + x * x * x;
  Jet const one = a * reciprocal(a);
  EXPECT_NEAR(one.value(), 1.0, 1e-15);
  for (std::size_t m = 1; m < one.coefficients().size(); ++m) {
    EXPECT_NEAR(one.coefficients()[m], 0.0, 1e-14);
  }
}

TEST(JetTest, NullJetIsExactZero) {
  auto const space = JetSpace::make(2, 2);
  Jet const x = Jet::coordinate(space, 2, 0, 1.0);
  Jet const zero;
  EXPECT_TRUE((zero * x).is_null());
  EXPECT_DOUBLE_EQ((zero + x).value(), 1.0);
  EXPECT_DOUBLE_EQ((zero - x).value(), -1.0);
  EXPECT_TRUE(zero.derivative(0).is_null());
}

TEST(JetTest, MixedOrdersTruncateToMinimum) {
  auto const space = JetSpace::make(1, 4);
  Jet const a = Jet::coordinate(space, 4, 0, 1.0);
  Jet const b = Jet::coordinate(space, 2, 0, 1.0);
  EXPECT_EQ((a + b).order(), 2);
  EXPECT_EQ((a * b).order(), 2);
}

// Symbolic partials vs direct Taylor arithmetic, order 4 in three variables.
TEST(JetTest, SymbolicPartialsAgreeWithTaylorArithmetic) {
  std::vector<std::string> const names{"x", "y", "z"};
  Chart const chart(names);
  char const* const cases[] = {
      "sin(x)^2*exp(y) + z",
      "exp(2*x)*(y - 0.5*z)^2",
      "log(1 + x^2 + y^2)/sqrt(2 + z)",
      "cos(x*y*z) - x^3/(1 + y^2)",
      "(x + 2)^(-1.5) * sin(y)",
  };
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  auto const space = JetSpace::make(3, 4);
  for (char const* text : cases) {
    Expr const e = parse(text, names);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> const p{u(rng), u(rng), u(rng)};
      Jet const symbolic = expr_jet(e, chart, p, space, 4);
      Jet const taylor = jet_eval(e, names, p, space, 4);
      ASSERT_EQ(symbolic.coefficients().size(), taylor.coefficients().size());
      for (std::size_t m = 0; m < taylor.coefficients().size(); ++m) {
        double const a = symbolic.coefficients()[m];
        double const b = taylor.coefficients()[m];
        EXPECT_NEAR(a, b, 1e-10 * (1 + std::abs(b))) << text << " monomial " << m;
      }
    }
  }
}

TEST(JetMatrixTest, InverseSeriesMatchesTaylorOfInverse) {
  std::vector<std::string> const names{"x", "y"};
  Chart const chart(names);
  auto const space = JetSpace::make(2, 4);
  std::vector<double> const p{0.4, -0.3};
  // M = [[2 + x^2, x*y], [x*y, 1 + exp(y)]]
  char const* const entries[2][2] = {{"2 + x^2", "x*y"}, {"x*y", "1 + exp(y)"}};
  JetMatrix m(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m(i, j) = expr_jet(parse(entries[i][j], names), chart, p, space, 4);
    }
  }
  JetMatrix const inv = inverse(m);
  // Closed-form inverse of a 2x2, differentiated symbolically.
  Expr const det = parse("(2 + x^2)*(1 + exp(y)) - (x*y)^2", names);
  Expr const inv00 = parse("1 + exp(y)", names) / det;
  Expr const inv01 = -parse("x*y", names) / det;
  Jet const a = expr_jet(inv00, chart, p, space, 4);
  Jet const b = expr_jet(inv01, chart, p, space, 4);
  for (std::size_t k = 0; k < a.coefficients().size(); ++k) {
    EXPECT_NEAR(inv(0, 0).coefficients()[k], a.coefficients()[k], 1e-12);
    EXPECT_NEAR(inv(0, 1).coefficients()[k], b.coefficients()[k], 1e-12);
  }
}

}  // namespace
}  // namespace oneill

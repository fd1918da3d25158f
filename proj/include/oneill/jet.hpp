#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace oneill {

// Index tables for truncated multivariate Taylor polynomials in `vars`
// variables up to total degree `order`. Monomials are stored in graded order,
// so a jet of lower order is a prefix of one of higher order.
class JetSpace {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  JetSpace(int vars, int order);

  int vars() const { return vars_; }
  int order() const { return order_; }

  // Number of monomials of degree <= order.
  std::size_t size(int order) const { return sizes_[order]; }
  int degree(std::size_t monomial) const { return degrees_[monomial]; }
  std::span<int const> exponents(std::size_t monomial) const;
  std::size_t index(std::span<int const> exponents) const;

  // Pairs of monomials whose product has degree <= order, ordered by the
  // degree of the product.
  std::span<Product const> products(int order) const;

  // For d/dx_var: source monomial (alpha + e_var) and factor (alpha_var + 1)
  // for every alpha of degree <= order - 1.
  std::span<std::uint32_t const> shift_source(int var) const;
  std::span<double const> shift_factor(int var) const;

  static std::shared_ptr<JetSpace const> make(int vars, int order);

 private:
  int vars_;
  int order_;
  std::vector<int> exponents_;  // size() * vars_, row-major
  std::vector<int> degrees_;
  std::vector<std::size_t> sizes_;
  std::vector<Product> products_;
  std::vector<std::size_t> products_end_;  // by output degree
  std::vector<std::vector<std::uint32_t>> shift_source_;
  std::vector<std::vector<double>> shift_factor_;
};

// Truncated Taylor expansion of a smooth function about a point, stored as
// coefficients f_alpha / alpha!. The default value is an exact zero that
// carries no space and absorbs in products.
class Jet {
 public:
  // Order reported by the null jet, which is exact to every order.
  static constexpr int kExactOrder = 1 << 20;

  Jet() = default;
  Jet(std::shared_ptr<JetSpace const> space, int order);

  static Jet constant(std::shared_ptr<JetSpace const> space, int order,
                      double value);
  // The coordinate function x_var expanded about a point where it equals
  // `value`.
  static Jet coordinate(std::shared_ptr<JetSpace const> space, int order,
                        int var, double value);

  bool is_null() const { return space_ == nullptr; }
  int order() const { return space_ ? order_ : kExactOrder; }
  JetSpace const& space() const { return *space_; }
  std::shared_ptr<JetSpace const> const& space_ptr() const { return space_; }

  double value() const { return coefficients_.empty() ? 0.0 : coefficients_[0]; }
  std::span<double const> coefficients() const { return coefficients_; }
  std::span<double> coefficients() { return coefficients_; }

  // Partial derivative d^alpha f at the expansion point.
  double partial(std::span<int const> alpha) const;

  // Exact partial derivative jet; order drops by one.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet& operator+=(Jet const& other);
  Jet& operator-=(Jet const& other);
  Jet& operator*=(double s);

 private:
  std::shared_ptr<JetSpace const> space_;
  int order_ = 0;
  std::vector<double> coefficients_;
};

Jet operator+(Jet const& a, Jet const& b);
Jet operator-(Jet const& a, Jet const& b);
Jet operator-(Jet const& a);
Jet operator*(Jet const& a, Jet const& b);
Jet operator*(double s, Jet const& a);
Jet operator*(Jet const& a, double s);
// Requires b.value() != 0.
Jet operator/(Jet const& a, Jet const& b);
Jet reciprocal(Jet const& a);

}  // namespace oneill

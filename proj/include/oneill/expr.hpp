#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oneill {

enum class Op {
  kConstant,
  kVariable,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPow,
  kSin,
  kCos,
  kTan,
  kExp,
  kLog,
  kSqrt,
};

class Expr;

namespace internal_expr {
struct Node;
}  // namespace internal_expr

// Immutable scalar expression over named chart coordinates. Copies share the
// underlying tree; all operations are pure.
class Expr {
 public:
  // Zero constant.
  Expr();

  static Expr constant(double value);
  static Expr variable(std::string name);

  // Raw node constructors: build exactly the requested node, no folding.
  static Expr make_binary(Op op, Expr lhs, Expr rhs);
  static Expr make_unary(Op op, Expr arg);
  static Expr make_pow(Expr base, double exponent);

  Op op() const;
  // Constant value, or exponent of a kPow node.
  double value() const;
  std::string const& name() const;
  // Operands: lhs() for unary and pow nodes, lhs()/rhs() for binary ones.
  Expr lhs() const;
  Expr rhs() const;

  bool is_constant() const { return op() == Op::kConstant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  // Identity of the shared node; stable for the lifetime of any copy.
  void const* id() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<internal_expr::Node const> node);

  std::shared_ptr<internal_expr::Node const> node_;
};

// Folding arithmetic: constant folding and 0/1 absorption at construction.
Expr operator+(Expr const& a, Expr const& b);
Expr operator-(Expr const& a, Expr const& b);
Expr operator*(Expr const& a, Expr const& b);
Expr operator/(Expr const& a, Expr const& b);
Expr operator-(Expr const& a);
Expr pow(Expr const& base, double exponent);
Expr sin(Expr const& a);
Expr cos(Expr const& a);
Expr tan(Expr const& a);
Expr exp(Expr const& a);
Expr log(Expr const& a);
Expr sqrt(Expr const& a);

// Structural equality of trees.
bool equal(Expr const& a, Expr const& b);

std::set<std::string> free_variables(Expr const& e);

// Parses `text` under the exprlang grammar. Every identifier must name one of
// `vars` or a function applied to a parenthesized argument.
Expr parse(std::string_view text, std::span<std::string const> vars);
Expr parse(std::string_view text, std::initializer_list<std::string> vars);

// Exact partial derivative. Results are memoized per (node, variable).
Expr diff(Expr const& e, std::string const& var);

// Simultaneous substitution; unbound variables are left in place.
Expr substitute(Expr const& e, std::map<std::string, Expr> const& bindings);

// Constant folding, 0/1 absorption, x - x -> 0. Value preserving; no
// canonical form.
Expr simplify(Expr const& e);

// Evaluation against a point given as parallel name/value lists.
double eval(Expr const& e, std::span<std::string const> names,
            std::span<double const> values);
double eval(Expr const& e, std::map<std::string, double> const& point);

// Text that parses back to the identical tree.
std::string to_string(Expr const& e);

std::size_t derivative_cache_size();

}  // namespace oneill

#include "oneill/expr.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "oneill/errors.hpp"

namespace oneill {

namespace internal_expr {

struct Node {
  Op op = Op::kConstant;
  double value = 0.0;
  std::string name;
  std::shared_ptr<Node const> lhs;
  std::shared_ptr<Node const> rhs;
};

}  // namespace internal_expr

using internal_expr::Node;

namespace {

bool is_unary_function(Op op) {
  switch (op) {
    case Op::kSin:
    case Op::kCos:
    case Op::kTan:
    case Op::kExp:
    case Op::kLog:
    case Op::kSqrt:
      return true;
    default:
      return false;
  }
}

char const* function_name(Op op) {
  switch (op) {
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kTan: return "tan";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kSqrt: return "sqrt";
    default: return "?";
  }
}

}  // namespace

Expr::Expr() {
  static auto const zero = std::make_shared<Node const>();
  node_ = zero;
}

Expr::Expr(std::shared_ptr<Node const> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConstant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::kVariable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::make_binary(Op op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs.node_);
  n->rhs = std::move(rhs.node_);
  return Expr(std::move(n));
}

Expr Expr::make_unary(Op op, Expr arg) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(arg.node_);
  return Expr(std::move(n));
}

Expr Expr::make_pow(Expr base, double exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::kPow;
  n->value = exponent;
  n->lhs = std::move(base.node_);
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
std::string const& Expr::name() const { return node_->name; }
Expr Expr::lhs() const { return Expr(node_->lhs); }
Expr Expr::rhs() const { return Expr(node_->rhs); }

// ---------------------------------------------------------------------------
// Folding constructors.

namespace {

// Folds f(c) when it is finite; otherwise keeps the node so that evaluation
// reports the domain error.
Expr fold_unary(Op op, Expr const& a) {
  if (a.is_constant()) {
    double const c = a.value();
    double r = NAN;
    switch (op) {
      case Op::kSin: r = std::sin(c); break;
      case Op::kCos: r = std::cos(c); break;
      case Op::kTan: r = std::tan(c); break;
      case Op::kExp: r = std::exp(c); break;
      case Op::kLog: r = c > 0 ? std::log(c) : NAN; break;
      case Op::kSqrt: r = c >= 0 ? std::sqrt(c) : NAN; break;
      default: break;
    }
    if (std::isfinite(r)) return Expr::constant(r);
  }
  return Expr::make_unary(op, a);
}

}  // namespace

Expr operator+(Expr const& a, Expr const& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.value() + b.value());
  }
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.op() == Op::kNeg) return a - b.lhs();
  return Expr::make_binary(Op::kAdd, a, b);
}

Expr operator-(Expr const& a, Expr const& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.value() - b.value());
  }
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (equal(a, b)) return Expr::constant(0.0);
  if (b.op() == Op::kNeg) return a + b.lhs();
  return Expr::make_binary(Op::kSub, a, b);
}

Expr operator*(Expr const& a, Expr const& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.value() * b.value());
  }
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (b.is_constant()) return b * a;
  // c1 * (c2 * x) -> (c1 c2) * x
  if (a.is_constant() && b.op() == Op::kMul && b.lhs().is_constant()) {
    return Expr::constant(a.value() * b.lhs().value()) * b.rhs();
  }
  if (a.op() == Op::kNeg) return -(a.lhs() * b);
  if (b.op() == Op::kNeg) return -(a * b.lhs());
  return Expr::make_binary(Op::kMul, a, b);
}

Expr operator/(Expr const& a, Expr const& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) {
    return Expr::constant(a.value() / b.value());
  }
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(-1.0)) return -a;
  if (b.is_constant() && b.value() != 0.0) {
    return Expr::constant(1.0 / b.value()) * a;
  }
  return Expr::make_binary(Op::kDiv, a, b);
}

Expr operator-(Expr const& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.op() == Op::kNeg) return a.lhs();
  return Expr::make_unary(Op::kNeg, a);
}

Expr pow(Expr const& base, double exponent) {
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    double const r = std::pow(base.value(), exponent);
    if (std::isfinite(r)) return Expr::constant(r);
  }
  // (x^a)^k -> x^(a k) only for integer k, where the identity holds
  // everywhere x^a is defined.
  if (base.op() == Op::kPow && std::floor(exponent) == exponent) {
    return pow(base.lhs(), base.value() * exponent);
  }
  return Expr::make_pow(base, exponent);
}

Expr sin(Expr const& a) { return fold_unary(Op::kSin, a); }
Expr cos(Expr const& a) { return fold_unary(Op::kCos, a); }
Expr tan(Expr const& a) { return fold_unary(Op::kTan, a); }
Expr exp(Expr const& a) { return fold_unary(Op::kExp, a); }
Expr log(Expr const& a) { return fold_unary(Op::kLog, a); }
Expr sqrt(Expr const& a) { return fold_unary(Op::kSqrt, a); }

bool equal(Expr const& a, Expr const& b) {
  if (a.id() == b.id()) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::kConstant:
      return a.value() == b.value();
    case Op::kVariable:
      return a.name() == b.name();
    case Op::kPow:
      return a.value() == b.value() && equal(a.lhs(), b.lhs());
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
      return equal(a.lhs(), b.lhs()) && equal(a.rhs(), b.rhs());
    default:
      return equal(a.lhs(), b.lhs());
  }
}

namespace {

void collect_variables(Expr const& e, std::set<std::string>& out) {
  switch (e.op()) {
    case Op::kConstant:
      return;
    case Op::kVariable:
      out.insert(e.name());
      return;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
      return;
    default:
      collect_variables(e.lhs(), out);
  }
}

}  // namespace

std::set<std::string> free_variables(Expr const& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation.

namespace {

struct CacheKey {
  void const* node;
  std::string var;
  bool operator==(CacheKey const&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(CacheKey const& k) const {
    return std::hash<void const*>()(k.node) ^
           (std::hash<std::string>()(k.var) * 0x9e3779b97f4a7c15ULL);
  }
};

struct CacheEntry {
  Expr source;  // keeps the keyed node alive
  Expr derivative;
};

std::mutex cache_mutex;
std::unordered_map<CacheKey, CacheEntry, CacheKeyHash>& derivative_cache() {
  static std::unordered_map<CacheKey, CacheEntry, CacheKeyHash> cache;
  return cache;
}

Expr diff_uncached(Expr const& e, std::string const& v) {
  Expr const one = Expr::constant(1.0);
  switch (e.op()) {
    case Op::kConstant:
      return Expr::constant(0.0);
    case Op::kVariable:
      return Expr::constant(e.name() == v ? 1.0 : 0.0);
    case Op::kAdd:
      return diff(e.lhs(), v) + diff(e.rhs(), v);
    case Op::kSub:
      return diff(e.lhs(), v) - diff(e.rhs(), v);
    case Op::kMul:
      return diff(e.lhs(), v) * e.rhs() + e.lhs() * diff(e.rhs(), v);
    case Op::kDiv: {
      Expr const& u = e.lhs();
      Expr const& w = e.rhs();
      Expr const du = diff(u, v);
      Expr const dw = diff(w, v);
      if (dw.is_constant(0.0)) return du / w;
      return (du * w - u * dw) / pow(w, 2.0);
    }
    case Op::kNeg:
      return -diff(e.lhs(), v);
    case Op::kPow: {
      double const n = e.value();
      return Expr::constant(n) * pow(e.lhs(), n - 1.0) * diff(e.lhs(), v);
    }
    case Op::kSin:
      return cos(e.lhs()) * diff(e.lhs(), v);
    case Op::kCos:
      return -(sin(e.lhs()) * diff(e.lhs(), v));
    case Op::kTan:
      return diff(e.lhs(), v) / pow(cos(e.lhs()), 2.0);
    case Op::kExp:
      return e * diff(e.lhs(), v);
    case Op::kLog:
      return diff(e.lhs(), v) / e.lhs();
    case Op::kSqrt:
      return diff(e.lhs(), v) / (Expr::constant(2.0) * e);
  }
  return Expr::constant(0.0);
}

}  // namespace

Expr diff(Expr const& e, std::string const& var) {
  if (e.op() == Op::kConstant) return Expr::constant(0.0);
  if (e.op() == Op::kVariable) return Expr::constant(e.name() == var ? 1 : 0);
  CacheKey key{e.id(), var};
  {
    std::lock_guard lock(cache_mutex);
    auto& cache = derivative_cache();
    if (auto it = cache.find(key); it != cache.end()) {
      return it->second.derivative;
    }
  }
  Expr d = diff_uncached(e, var);
  std::lock_guard lock(cache_mutex);
  derivative_cache().try_emplace(key, CacheEntry{e, d});
  return d;
}

std::size_t derivative_cache_size() {
  std::lock_guard lock(cache_mutex);
  return derivative_cache().size();
}

// ---------------------------------------------------------------------------
// Substitution and simplification.

namespace {

Expr rebuild(Expr const& e, Expr const& lhs, Expr const& rhs) {
  switch (e.op()) {
    case Op::kAdd: return lhs + rhs;
    case Op::kSub: return lhs - rhs;
    case Op::kMul: return lhs * rhs;
    case Op::kDiv: return lhs / rhs;
    case Op::kNeg: return -lhs;
    case Op::kPow: return pow(lhs, e.value());
    default: return fold_unary(e.op(), lhs);
  }
}

bool is_binary(Op op) {
  return op == Op::kAdd || op == Op::kSub || op == Op::kMul || op == Op::kDiv;
}

}  // namespace

Expr substitute(Expr const& e, std::map<std::string, Expr> const& bindings) {
  switch (e.op()) {
    case Op::kConstant:
      return e;
    case Op::kVariable: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    default:
      break;
  }
  Expr const lhs = substitute(e.lhs(), bindings);
  if (is_binary(e.op())) {
    return Expr::make_binary(e.op(), lhs, substitute(e.rhs(), bindings));
  }
  if (e.op() == Op::kPow) return Expr::make_pow(lhs, e.value());
  return Expr::make_unary(e.op(), lhs);
}

Expr simplify(Expr const& e) {
  if (e.op() == Op::kConstant || e.op() == Op::kVariable) return e;
  Expr const lhs = simplify(e.lhs());
  Expr const rhs = is_binary(e.op()) ? simplify(e.rhs()) : Expr();
  return rebuild(e, lhs, rhs);
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace {

template <typename Lookup>
double eval_with(Expr const& e, Lookup const& lookup) {
  switch (e.op()) {
    case Op::kConstant:
      return e.value();
    case Op::kVariable:
      return lookup(e.name());
    case Op::kAdd:
      return eval_with(e.lhs(), lookup) + eval_with(e.rhs(), lookup);
    case Op::kSub:
      return eval_with(e.lhs(), lookup) - eval_with(e.rhs(), lookup);
    case Op::kMul:
      return eval_with(e.lhs(), lookup) * eval_with(e.rhs(), lookup);
    case Op::kDiv: {
      double const den = eval_with(e.rhs(), lookup);
      if (den == 0.0) throw DomainError("division by zero", to_string(e));
      return eval_with(e.lhs(), lookup) / den;
    }
    case Op::kNeg:
      return -eval_with(e.lhs(), lookup);
    case Op::kPow: {
      double const b = eval_with(e.lhs(), lookup);
      double const n = e.value();
      if (b < 0.0 && std::floor(n) != n) {
        throw DomainError("fractional power of negative base", to_string(e));
      }
      if (b == 0.0 && n < 0.0) {
        throw DomainError("negative power of zero", to_string(e));
      }
      return std::pow(b, n);
    }
    case Op::kSin:
      return std::sin(eval_with(e.lhs(), lookup));
    case Op::kCos:
      return std::cos(eval_with(e.lhs(), lookup));
    case Op::kTan: {
      double const a = eval_with(e.lhs(), lookup);
      if (std::cos(a) == 0.0) throw DomainError("tan pole", to_string(e));
      return std::tan(a);
    }
    case Op::kExp:
      return std::exp(eval_with(e.lhs(), lookup));
    case Op::kLog: {
      double const a = eval_with(e.lhs(), lookup);
      if (!(a > 0.0)) {
        throw DomainError("log of non-positive value", to_string(e));
      }
      return std::log(a);
    }
    case Op::kSqrt: {
      double const a = eval_with(e.lhs(), lookup);
      if (a < 0.0) throw DomainError("sqrt of negative value", to_string(e));
      return std::sqrt(a);
    }
  }
  return NAN;
}

}  // namespace

double eval(Expr const& e, std::span<std::string const> names,
            std::span<double const> values) {
  return eval_with(e, [&](std::string const& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values[i];
    }
    throw InputError("unbound variable `" + name + "`");
  });
}

double eval(Expr const& e, std::map<std::string, double> const& point) {
  return eval_with(e, [&](std::string const& name) {
    auto it = point.find(name);
    if (it == point.end()) throw InputError("unbound variable `" + name + "`");
    return it->second;
  });
}

// ---------------------------------------------------------------------------
// Printing. Parenthesization follows the grammar so that parse(to_string(e))
// reproduces the tree exactly.

namespace {

std::string format_number(double v) {
  char buffer[64];
  auto const result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

// An atom in the grammar: a non-negative literal, identifier, function call,
// or anything parenthesized.
bool prints_as_atom(Expr const& e) {
  return (e.op() == Op::kConstant && !std::signbit(e.value())) ||
         e.op() == Op::kVariable || is_unary_function(e.op());
}

std::string print(Expr const& e);

std::string print_atom(Expr const& e) {
  return prints_as_atom(e) ? print(e) : "(" + print(e) + ")";
}

// Operand of '*' or '/': any factor. Factors are atoms, pow, negation of an
// atom or pow, and negative literals.
std::string print_factor(Expr const& e) {
  switch (e.op()) {
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
      return "(" + print(e) + ")";
    default:
      return print(e);
  }
}

std::string print(Expr const& e) {
  switch (e.op()) {
    case Op::kConstant:
      return format_number(e.value());
    case Op::kVariable:
      return e.name();
    case Op::kAdd:
    case Op::kSub: {
      char const* sym = e.op() == Op::kAdd ? " + " : " - ";
      Op const r = e.rhs().op();
      bool const wrap_rhs = r == Op::kAdd || r == Op::kSub;
      return print(e.lhs()) + sym +
             (wrap_rhs ? "(" + print(e.rhs()) + ")" : print(e.rhs()));
    }
    case Op::kMul:
    case Op::kDiv: {
      char const* sym = e.op() == Op::kMul ? "*" : "/";
      Op const l = e.lhs().op();
      std::string const lhs = (l == Op::kAdd || l == Op::kSub)
                                  ? "(" + print(e.lhs()) + ")"
                                  : print(e.lhs());
      Op const r = e.rhs().op();
      std::string const rhs =
          (r == Op::kAdd || r == Op::kSub || r == Op::kMul || r == Op::kDiv)
              ? "(" + print(e.rhs()) + ")"
              : print_factor(e.rhs());
      return lhs + sym + rhs;
    }
    case Op::kNeg: {
      Expr const& a = e.lhs();
      // A literal after a leading '-' would fold into a negative constant.
      bool const bare = (prints_as_atom(a) && a.op() != Op::kConstant) ||
                        (a.op() == Op::kPow && prints_as_atom(a.lhs()) &&
                         a.lhs().op() != Op::kConstant);
      return bare ? "-" + print(a) : "-(" + print(a) + ")";
    }
    case Op::kPow:
      return print_atom(e.lhs()) + "^" + format_number(e.value());
    default:
      return std::string(function_name(e.op())) + "(" + print(e.lhs()) + ")";
  }
}

}  // namespace

std::string to_string(Expr const& e) { return print(e); }

}  // namespace oneill

#include "oneill/jet.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <stdexcept>

namespace oneill {

namespace {

// All exponent vectors in `vars` variables of total degree exactly `degree`,
// in lexicographically descending order.
void monomials_of_degree(int vars, int degree, std::vector<int>& current,
                         int var, std::vector<std::vector<int>>& out) {
  if (var == vars - 1) {
    current[var] = degree;
    out.push_back(current);
    return;
  }
  for (int k = degree; k >= 0; --k) {
    current[var] = k;
    monomials_of_degree(vars, degree - k, current, var + 1, out);
  }
}

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace

JetSpace::JetSpace(int vars, int order) : vars_(vars), order_(order) {
  if (vars < 1 || order < 0) throw std::invalid_argument("bad jet space");
  std::vector<std::vector<int>> all;
  sizes_.assign(order + 1, 0);
  for (int d = 0; d <= order; ++d) {
    std::vector<int> current(vars, 0);
    monomials_of_degree(vars, d, current, 0, all);
    sizes_[d] = all.size();
  }
  for (auto const& m : all) {
    exponents_.insert(exponents_.end(), m.begin(), m.end());
    int deg = 0;
    for (int e : m) deg += e;
    degrees_.push_back(deg);
  }
  std::size_t const n = all.size();

  // Products grouped by output degree.
  std::vector<std::vector<Product>> by_degree(order + 1);
  std::vector<int> sum(vars);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (degrees_[i] + degrees_[j] > order) continue;
      for (int v = 0; v < vars; ++v) sum[v] = all[i][v] + all[j][v];
      std::size_t const k = index(sum);
      by_degree[degrees_[i] + degrees_[j]].push_back(
          {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
           static_cast<std::uint32_t>(k)});
    }
  }
  for (auto const& group : by_degree) {
    products_.insert(products_.end(), group.begin(), group.end());
    products_end_.push_back(products_.size());
  }

  shift_source_.resize(vars);
  shift_factor_.resize(vars);
  std::size_t const lower = order > 0 ? sizes_[order - 1] : 0;
  for (int v = 0; v < vars; ++v) {
    for (std::size_t a = 0; a < lower; ++a) {
      std::vector<int> shifted = all[a];
      shifted[v] += 1;
      shift_source_[v].push_back(static_cast<std::uint32_t>(index(shifted)));
      shift_factor_[v].push_back(static_cast<double>(all[a][v] + 1));
    }
  }
}

std::span<int const> JetSpace::exponents(std::size_t monomial) const {
  return {exponents_.data() + monomial * vars_, static_cast<std::size_t>(vars_)};
}

std::size_t JetSpace::index(std::span<int const> exps) const {
  int deg = 0;
  for (int e : exps) deg += e;
  std::size_t const begin = deg == 0 ? 0 : sizes_[deg - 1];
  std::size_t const end = sizes_[deg];
  for (std::size_t m = begin; m < end; ++m) {
    if (std::equal(exps.begin(), exps.end(), exponents(m).begin())) return m;
  }
  throw std::out_of_range("monomial not in jet space");
}

std::span<JetSpace::Product const> JetSpace::products(int order) const {
  return {products_.data(), products_end_[order]};
}

std::span<std::uint32_t const> JetSpace::shift_source(int var) const {
  return shift_source_[var];
}

std::span<double const> JetSpace::shift_factor(int var) const {
  return shift_factor_[var];
}

std::shared_ptr<JetSpace const> JetSpace::make(int vars, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<JetSpace const>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{vars, order}];
  if (!slot) slot = std::make_shared<JetSpace const>(vars, order);
  return slot;
}

// ---------------------------------------------------------------------------

Jet::Jet(std::shared_ptr<JetSpace const> space, int order)
    : space_(std::move(space)), order_(order) {
  assert(order <= space_->order());
  coefficients_.assign(space_->size(order), 0.0);
}

Jet Jet::constant(std::shared_ptr<JetSpace const> space, int order,
                  double value) {
  Jet j(std::move(space), order);
  j.coefficients_[0] = value;
  return j;
}

Jet Jet::coordinate(std::shared_ptr<JetSpace const> space, int order, int var,
                    double value) {
  Jet j(std::move(space), order);
  j.coefficients_[0] = value;
  if (order >= 1) j.coefficients_[1 + var] = 1.0;
  return j;
}

double Jet::partial(std::span<int const> alpha) const {
  if (!space_) return 0.0;
  double scale = 1.0;
  for (int a : alpha) scale *= factorial(a);
  return coefficients_[space_->index(alpha)] * scale;
}

Jet Jet::derivative(int var) const {
  if (!space_) return {};
  int const o = order();
  if (o == 0) throw std::logic_error("derivative of an order-0 jet");
  Jet d(space_, o - 1);
  auto const src = space_->shift_source(var);
  auto const fac = space_->shift_factor(var);
  for (std::size_t a = 0; a < d.coefficients_.size(); ++a) {
    d.coefficients_[a] = fac[a] * coefficients_[src[a]];
  }
  return d;
}

Jet Jet::truncated(int order) const {
  if (!space_ || order >= this->order()) return *this;
  Jet t(space_, order);
  std::copy_n(coefficients_.begin(), t.coefficients_.size(),
              t.coefficients_.begin());
  return t;
}

Jet& Jet::operator+=(Jet const& other) {
  if (other.is_null()) return *this;
  if (is_null()) return *this = other;
  order_ = std::min(order_, other.order_);
  std::size_t const n = space_->size(order_);
  coefficients_.resize(n);
  for (std::size_t i = 0; i < n; ++i) coefficients_[i] += other.coefficients_[i];
  return *this;
}

Jet& Jet::operator-=(Jet const& other) {
  if (other.is_null()) return *this;
  if (is_null()) return *this = -other;
  order_ = std::min(order_, other.order_);
  std::size_t const n = space_->size(order_);
  coefficients_.resize(n);
  for (std::size_t i = 0; i < n; ++i) coefficients_[i] -= other.coefficients_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coefficients_) c *= s;
  return *this;
}

Jet operator+(Jet const& a, Jet const& b) {
  Jet r = a;
  r += b;
  return r;
}

Jet operator-(Jet const& a, Jet const& b) {
  Jet r = a;
  r -= b;
  return r;
}

Jet operator-(Jet const& a) {
  Jet r = a;
  r *= -1.0;
  return r;
}

Jet operator*(double s, Jet const& a) {
  Jet r = a;
  r *= s;
  return r;
}

Jet operator*(Jet const& a, double s) { return s * a; }

Jet operator*(Jet const& a, Jet const& b) {
  if (a.is_null() || b.is_null()) return {};
  int const o = std::min(a.order(), b.order());
  Jet r(a.space_ptr(), o);
  auto out = r.coefficients();
  auto const ca = a.coefficients();
  auto const cb = b.coefficients();
  for (auto const& p : a.space().products(o)) {
    out[p.out] += ca[p.lhs] * cb[p.rhs];
  }
  return r;
}

Jet reciprocal(Jet const& a) {
  if (a.is_null() || a.value() == 0.0) {
    throw std::domain_error("reciprocal of a jet with zero value");
  }
  int const o = a.order();
  Jet r(a.space_ptr(), o);
  auto out = r.coefficients();
  auto const ca = a.coefficients();
  double const inv0 = 1.0 / ca[0];
  out[0] = inv0;
  // a * r = 1: for each output monomial k of positive degree,
  // a_0 r_k = -sum_{i>0} a_i r_j. Products are sorted by output degree, so
  // every r_j needed is complete before it is used.
  auto const products = a.space().products(o);
  std::vector<double> acc(out.size(), 0.0);
  std::size_t p = 0;
  for (int d = 1; d <= o; ++d) {
    std::size_t const begin = a.space().size(d - 1);
    std::size_t const end = a.space().size(d);
    for (; p < products.size() && a.space().degree(products[p].out) <= d; ++p) {
      auto const& t = products[p];
      if (a.space().degree(t.out) < d || t.lhs == 0) continue;
      acc[t.out] += ca[t.lhs] * out[t.rhs];
    }
    for (std::size_t k = begin; k < end; ++k) out[k] = -inv0 * acc[k];
  }
  return r;
}

Jet operator/(Jet const& a, Jet const& b) {
  if (a.is_null()) return {};
  return a * reciprocal(b);
}

}  // namespace oneill

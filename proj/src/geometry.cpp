#include "oneill/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "oneill/errors.hpp"

namespace oneill {

Box::Box(std::vector<Interval> ranges) : ranges_(std::move(ranges)) {
  for (auto const& r : ranges_) {
    if (!(r.lo < r.hi)) throw InputError("empty interval in domain box");
  }
}

bool Box::contains(std::span<double const> p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!(p[i] > ranges_[i].lo && p[i] < ranges_[i].hi)) return false;
  }
  return true;
}

Point Box::center() const {
  Point c(ranges_.size());
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    c[i] = 0.5 * (ranges_[i].lo + ranges_[i].hi);
  }
  return c;
}

std::vector<Point> halton_points(Box const& box, int count,
                                 std::uint64_t seed) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (box.dim() > static_cast<int>(std::size(kPrimes))) {
    throw InputError("sampling supports at most 10 coordinates");
  }
  std::vector<Point> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::uint64_t const k = static_cast<std::uint64_t>(i) + seed + 1;
    Point p(box.dim());
    for (int d = 0; d < box.dim(); ++d) {
      double const base = kPrimes[d];
      double f = 1.0, v = 0.0;
      for (std::uint64_t n = k; n > 0; n /= kPrimes[d]) {
        f /= base;
        v += f * static_cast<double>(n % kPrimes[d]);
      }
      auto const& r = box.range(d);
      p[d] = r.lo + (r.hi - r.lo) * v;
    }
    out.push_back(std::move(p));
  }
  return out;
}

Chart::Chart(std::vector<std::string> names, std::optional<Box> domain)
    : names_(std::move(names)), domain_(std::move(domain)) {
  std::set<std::string> const unique(names_.begin(), names_.end());
  if (unique.size() != names_.size()) {
    throw InputError("chart coordinate names must be distinct");
  }
  if (domain_ && domain_->dim() != dim()) {
    throw InputError("domain box dimension differs from chart dimension");
  }
}

int Chart::index_of(std::string const& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

bool Chart::contains(std::span<double const> p) const {
  return !domain_ || domain_->contains(p);
}

MetricField::MetricField(Chart chart,
                         std::vector<std::vector<Expr>> components)
    : chart_(std::move(chart)) {
  int const n = chart_.dim();
  if (static_cast<int>(components.size()) != n) {
    throw InputError("metric must be a square matrix of the chart dimension");
  }
  components_.reserve(n * n);
  for (auto const& row : components) {
    if (static_cast<int>(row.size()) != n) {
      throw InputError("metric must be a square matrix of the chart dimension");
    }
    for (auto const& e : row) {
      for (auto const& v : free_variables(e)) {
        if (chart_.index_of(v) < 0) {
          throw InputError("metric uses undeclared coordinate `" + v + "`");
        }
      }
      components_.push_back(e);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!equal(simplify(components_[i * n + j]),
                 simplify(components_[j * n + i]))) {
        throw InputError("metric is not symmetric at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
      components_[j * n + i] = components_[i * n + j];
    }
  }
}

Eigen::MatrixXd MetricField::at(std::span<double const> p) const {
  int const n = dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m(i, j) = m(j, i) = eval(component(i, j), chart_.names(), p);
    }
  }
  // Pivoted Cholesky (LDL^T with symmetric pivoting).
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success ||
      (ldlt.vectorD().array() <= 1e-12).any()) {
    throw StructuralError("metric is not positive definite at the point");
  }
  return m;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).value();
  }
  return m;
}

JetMatrix operator*(JetMatrix const& a, JetMatrix const& b) {
  JetMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      Jet sum;
      for (int k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      c(i, j) = std::move(sum);
    }
  }
  return c;
}

JetMatrix operator+(JetMatrix const& a, JetMatrix const& b) {
  JetMatrix c = a;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  }
  return c;
}

JetMatrix operator-(JetMatrix const& a, JetMatrix const& b) {
  JetMatrix c = a;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  }
  return c;
}

JetMatrix transpose(JetMatrix const& a) {
  JetMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

JetMatrix to_jet_matrix(Tensor<Jet> const& t) {
  JetMatrix m(t.dim(0), t.dim(1));
  for (int i = 0; i < t.dim(0); ++i) {
    for (int j = 0; j < t.dim(1); ++j) m(i, j) = t.at({i, j});
  }
  return m;
}

Tensor<Jet> to_tensor(JetMatrix const& m, Variance row, Variance col) {
  Tensor<Jet> t({m.rows(), m.cols()}, {row, col});
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) t.at({i, j}) = m(i, j);
  }
  return t;
}

JetMatrix inverse(JetMatrix const& m) {
  int const n = m.rows();
  Eigen::MatrixXd const v = m.values();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (!lu.isInvertible()) throw StructuralError("singular matrix");
  Eigen::MatrixXd const v_inv = lu.inverse();

  // Any non-null entry provides the jet space and order.
  Jet const* probe = nullptr;
  int order = Jet::kExactOrder;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!m(i, j).is_null()) {
        probe = &m(i, j);
        order = std::min(order, m(i, j).order());
      }
    }
  }
  if (!probe) throw StructuralError("singular matrix");
  auto const& space = probe->space_ptr();

  JetMatrix base_inv(n, n);
  JetMatrix remainder(n, n);  // -(M - M0) M0^-1 ... applied on the left
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      base_inv(i, j) = Jet::constant(space, order, v_inv(i, j));
      Jet d = m(i, j).is_null() ? Jet() : m(i, j).truncated(order);
      if (!d.is_null()) d.coefficients()[0] = 0.0;
      remainder(i, j) = d;
    }
  }
  // (M0 + D)^-1 = sum_k (-M0^-1 D)^k M0^-1, terminating at k = order.
  JetMatrix step = base_inv * remainder;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) step(i, j) *= -1.0;
  }
  JetMatrix term = base_inv;
  JetMatrix result = base_inv;
  for (int k = 1; k <= order; ++k) {
    term = step * term;
    result = result + term;
  }
  return result;
}

Jet expr_jet(Expr const& e, Chart const& chart, std::span<double const> p,
             std::shared_ptr<JetSpace const> const& space, int order) {
  if (e.is_constant(0.0)) return {};
  Jet j(space, order);
  auto c = j.coefficients();
  std::size_t const n = space->size(order);
  std::vector<Expr> partials(n);
  partials[0] = e;
  c[0] = eval(e, chart.names(), p);
  std::vector<int> parent;
  for (std::size_t m = 1; m < n; ++m) {
    auto const alpha = space->exponents(m);
    int v = 0;
    while (alpha[v] == 0) ++v;
    parent.assign(alpha.begin(), alpha.end());
    parent[v] -= 1;
    Expr const& up = partials[space->index(parent)];
    partials[m] = diff(up, chart.name(v));
    if (partials[m].is_constant(0.0)) continue;
    double scale = 1.0;
    for (int a : alpha) {
      for (int k = 2; k <= a; ++k) scale *= k;
    }
    c[m] = eval(partials[m], chart.names(), p) / scale;
  }
  return j;
}

Tensor<Jet> expr_tensor_jet(Tensor<Expr> const& t, Chart const& chart,
                            std::span<double const> p,
                            std::shared_ptr<JetSpace const> const& space,
                            int order) {
  Tensor<Jet> out(t.dims(), t.variance());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i] = expr_jet(t[i], chart, p, space, order);
  }
  return out;
}

TensorValue values(Tensor<Jet> const& t) {
  TensorValue out(t.dims(), t.variance());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].value();
  return out;
}

// ---------------------------------------------------------------------------

MetricGerm::MetricGerm(MetricField const& g, std::span<double const> p,
                       int order)
    : dim_(g.dim()),
      order_(order),
      point_(p.begin(), p.end()),
      chart_(g.chart()),
      space_(JetSpace::make(g.dim(), std::max(order, 0))) {
  if (order < 1) throw std::invalid_argument("metric germ needs order >= 1");
  g.at(p);  // positive-definiteness check
  int const n = dim_;
  metric_ = JetMatrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Jet const e = expr_jet(g.component(i, j), chart_, p, space_, order);
      metric_(i, j) = e;
      metric_(j, i) = e;
    }
  }
  inverse_ = inverse(metric_);

  // dg[l][i][j] = d_l g_ij
  std::vector<Jet> dg(n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        dg[(l * n + i) * n + j] = metric_(i, j).derivative(l);
      }
    }
  }
  auto d = [&](int l, int i, int j) -> Jet const& {
    return dg[(l * n + i) * n + j];
  };
  christoffel_ = Tensor<Jet>(n, {Variance::kUpper, Variance::kLower,
                                 Variance::kLower});
  // Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<Jet> first_kind(n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Jet s = d(i, j, l) + d(j, i, l) - d(l, i, j);
        s *= 0.5;
        first_kind[(l * n + i) * n + j] = s;
        first_kind[(l * n + j) * n + i] = s;
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Jet sum;
        for (int l = 0; l < n; ++l) {
          sum += inverse_(k, l) * first_kind[(l * n + i) * n + j];
        }
        christoffel_.at({k, i, j}) = sum;
        christoffel_.at({k, j, i}) = sum;
      }
    }
  }
}

Tensor<Jet> const& MetricGerm::riemann() const {
  if (riemann_) return *riemann_;
  if (order_ < 2) throw std::logic_error("curvature needs germ order >= 2");
  int const n = dim_;
  auto const& gam = christoffel_;
  Tensor<Jet> r(n, {Variance::kUpper, Variance::kLower, Variance::kLower,
                    Variance::kLower});
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          Jet v = gam.at({l, j, k}).derivative(i) -
                  gam.at({l, i, k}).derivative(j);
          for (int m = 0; m < n; ++m) {
            v += gam.at({l, i, m}) * gam.at({m, j, k});
            v -= gam.at({l, j, m}) * gam.at({m, i, k});
          }
          r.at({l, k, i, j}) = v;
          r.at({l, k, j, i}) = -v;
        }
      }
    }
  }
  riemann_ = std::move(r);
  return *riemann_;
}

Tensor<Jet> MetricGerm::covariant_derivative(Tensor<Jet> const& t) const {
  int const n = dim_;
  for (int s = 0; s < t.rank(); ++s) {
    if (t.dim(s) != n) {
      throw std::invalid_argument("covariant derivative of non-coordinate tensor");
    }
  }
  std::vector<Variance> var{Variance::kLower};
  var.insert(var.end(), t.variance().begin(), t.variance().end());
  Tensor<Jet> out(n, var);
  auto const& gam = christoffel_;
  std::vector<int> src(t.rank());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto const idx = out.unflatten(f);
    int const c = idx[0];
    std::copy(idx.begin() + 1, idx.end(), src.begin());
    Jet v = t.at(std::span<int const>(src)).derivative(c);
    for (int s = 0; s < t.rank(); ++s) {
      int const a = src[s];
      for (int e = 0; e < n; ++e) {
        src[s] = e;
        Jet const& te = t.at(std::span<int const>(src));
        if (!te.is_null()) {
          if (t.variance(s) == Variance::kUpper) {
            v += gam.at({a, c, e}) * te;
          } else {
            v -= gam.at({e, c, a}) * te;
          }
        }
      }
      src[s] = a;
    }
    out[f] = std::move(v);
  }
  return out;
}

Tensor<Jet> MetricGerm::lower(Tensor<Jet> const& t, int slot) const {
  if (t.variance(slot) != Variance::kUpper) {
    throw std::invalid_argument("lower: slot is not upper");
  }
  return transform_slot(t, slot, metric_, Variance::kLower);
}

Tensor<Jet> MetricGerm::raise(Tensor<Jet> const& t, int slot) const {
  if (t.variance(slot) != Variance::kLower) {
    throw std::invalid_argument("raise: slot is not lower");
  }
  return transform_slot(t, slot, inverse_, Variance::kUpper);
}

Jet MetricGerm::jet(Expr const& e, int order) const {
  return expr_jet(e, chart_, point_, space_, std::min(order, order_));
}

// ---------------------------------------------------------------------------

TensorValue christoffel_at(MetricField const& g, std::span<double const> p) {
  return values(MetricGerm(g, p, 1).christoffel());
}

TensorValue riemann_at(MetricField const& g, std::span<double const> p) {
  return values(MetricGerm(g, p, 2).riemann());
}

double sectional(TensorValue const& riemann, Eigen::MatrixXd const& g,
                 Eigen::VectorXd const& x, Eigen::VectorXd const& y) {
  int const n = static_cast<int>(g.rows());
  double const xx = x.dot(g * x);
  double const yy = y.dot(g * y);
  double const xy = x.dot(g * y);
  double const den = xx * yy - xy * xy;
  if (den < 1e-12) throw std::invalid_argument("degenerate plane");
  Eigen::VectorXd const gx = g * x;
  double num = 0.0;
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          num += gx(l) * riemann.at({l, k, i, j}) * y(k) * x(i) * y(j);
        }
      }
    }
  }
  return num / den;
}

double sectional_at(MetricField const& g, std::span<double const> p,
                    Eigen::VectorXd const& x, Eigen::VectorXd const& y) {
  MetricGerm const germ(g, p, 2);
  return sectional(values(germ.riemann()), germ.metric_value(), x, y);
}

Tensor<Jet> covariant_derivative_field(Tensor<Expr> const& field,
                                       MetricField const& g, int k,
                                       std::span<double const> p,
                                       int extra_order) {
  int const order = k + extra_order;
  MetricGerm const germ(g, p, std::max(order, 1));
  Tensor<Jet> t = expr_tensor_jet(field, g.chart(), p, germ.space(), order);
  for (int i = 0; i < k; ++i) t = germ.covariant_derivative(t);
  return t;
}

double divergence_at(std::vector<Expr> const& field, MetricField const& g,
                     std::span<double const> p) {
  Tensor<Expr> x({g.dim()}, {Variance::kUpper});
  if (static_cast<int>(field.size()) != g.dim()) {
    throw std::invalid_argument("divergence: field dimension");
  }
  for (int i = 0; i < g.dim(); ++i) x[i] = field[i];
  auto const nabla = covariant_derivative_field(x, g, 1, p);
  return values(contract(nabla, 0, 1))[0];
}

TensorValue ricci(TensorValue const& riemann) {
  return contract(riemann, 0, 2);
}

double scalar_curvature(TensorValue const& riemann,
                        Eigen::MatrixXd const& g_inv) {
  TensorValue const ric = ricci(riemann);
  double s = 0.0;
  for (int k = 0; k < ric.dim(0); ++k) {
    for (int j = 0; j < ric.dim(1); ++j) s += g_inv(k, j) * ric.at({k, j});
  }
  return s;
}

}  // namespace oneill

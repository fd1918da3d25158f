#include "oneill/submersion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "oneill/errors.hpp"

namespace oneill {

namespace {

std::string point_text(std::span<double const> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

// Modified Gram-Schmidt in the inner product g. Vectors whose remaining norm
// falls below `skip` are dropped.
Eigen::MatrixXd gram_schmidt(Eigen::MatrixXd const& candidates,
                             Eigen::MatrixXd const& g, double skip) {
  std::vector<Eigen::VectorXd> out;
  for (int c = 0; c < candidates.cols(); ++c) {
    Eigen::VectorXd v = candidates.col(c);
    for (auto const& e : out) v -= e.dot(g * v) * e;
    double const norm = std::sqrt(std::max(0.0, v.dot(g * v)));
    if (norm < skip) continue;
    out.push_back(v / norm);
  }
  Eigen::MatrixXd m(candidates.rows(), static_cast<int>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) m.col(i) = out[i];
  return m;
}

// Nullspace basis of a full-row-rank matrix by Gauss-Jordan elimination with
// complete pivoting: the largest absolute entry wins, ties go to the lowest
// column and then the lowest row. Basis vectors are ordered by free column.
Eigen::MatrixXd nullspace(Eigen::MatrixXd a) {
  int const rows = static_cast<int>(a.rows());
  int const cols = static_cast<int>(a.cols());
  double const scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  std::vector<bool> row_used(rows, false);
  std::vector<int> pivot_row(cols, -1);
  for (int step = 0; step < rows; ++step) {
    int br = -1, bc = -1;
    double best = -1.0;
    for (int c = 0; c < cols; ++c) {
      if (pivot_row[c] >= 0) continue;
      for (int r = 0; r < rows; ++r) {
        if (row_used[r]) continue;
        if (std::abs(a(r, c)) > best) {
          best = std::abs(a(r, c));
          br = r;
          bc = c;
        }
      }
    }
    if (best <= 1e-10 * scale) {
      throw StructuralError("projection Jacobian is rank deficient");
    }
    a.row(br) /= a(br, bc);
    for (int r = 0; r < rows; ++r) {
      if (r != br) a.row(r) -= a(r, bc) * a.row(br);
    }
    row_used[br] = true;
    pivot_row[bc] = br;
  }
  std::vector<Eigen::VectorXd> basis;
  for (int f = 0; f < cols; ++f) {
    if (pivot_row[f] >= 0) continue;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(cols);
    v(f) = 1.0;
    for (int c = 0; c < cols; ++c) {
      if (pivot_row[c] >= 0) v(c) = -a(pivot_row[c], f);
    }
    basis.push_back(v);
  }
  Eigen::MatrixXd m(cols, static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) m.col(i) = basis[i];
  return m;
}

Eigen::MatrixXd horizontal_projection_value(SubmersionSpec const& spec,
                                            std::span<double const> p,
                                            Eigen::MatrixXd const& g) {
  Eigen::MatrixXd const j = spec.jacobian_at(p);
  Point const b = spec.project(p);
  Eigen::MatrixXd const gb = spec.base().at(b);
  return g.ldlt().solve(j.transpose() * gb * j);
}

// t(u, v) for a value tensor with slots (b, c, a).
Eigen::VectorXd apply(TensorValue const& t, Eigen::VectorXd const& u,
                      Eigen::VectorXd const& v) {
  int const n = t.dim(2);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int b = 0; b < t.dim(0); ++b) {
    if (u(b) == 0.0) continue;
    for (int c = 0; c < t.dim(1); ++c) {
      if (v(c) == 0.0) continue;
      for (int a = 0; a < n; ++a) out(a) += t.at({b, c, a}) * u(b) * v(c);
    }
  }
  return out;
}

Eigen::VectorXd vector_value(Tensor<Jet> const& t) {
  Eigen::VectorXd v(t.dim(0));
  for (int i = 0; i < t.dim(0); ++i) v(i) = t[i].value();
  return v;
}

// A random orthonormal pair inside span(basis), basis g-orthonormal.
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_pair(
    Eigen::MatrixXd const& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  int const k = static_cast<int>(basis.cols());
  Eigen::VectorXd a(k), b(k);
  for (;;) {
    for (int i = 0; i < k; ++i) {
      a(i) = z(rng);
      b(i) = z(rng);
    }
    a.normalize();
    b -= a.dot(b) * a;
    if (b.norm() > 1e-3) break;
  }
  b.normalize();
  return {basis * a, basis * b};
}

}  // namespace

SubmersionSpec::SubmersionSpec(MetricField total, MetricField base,
                               std::vector<Expr> map)
    : total_(std::move(total)), base_(std::move(base)), map_(std::move(map)) {
  int const n = base_dim();
  int const dim = this->dim();
  if (static_cast<int>(map_.size()) != n) {
    throw InputError("projection needs one component per base coordinate");
  }
  if (n < 1 || n >= dim) {
    throw InputError("base dimension must be between 1 and dim M - 1");
  }
  for (auto const& e : map_) {
    for (auto const& v : free_variables(e)) {
      if (total_.chart().index_of(v) < 0) {
        throw InputError("projection uses undeclared coordinate `" + v + "`");
      }
    }
  }
  jacobian_.reserve(n * dim);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < dim; ++b) {
      jacobian_.push_back(diff(map_[a], total_.chart().name(b)));
    }
  }
  std::map<std::string, Expr> bindings;
  for (int a = 0; a < n; ++a) bindings[base_.chart().name(a)] = map_[a];
  pulled_base_.reserve(n * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      pulled_base_.push_back(simplify(substitute(base_.component(a, b), bindings)));
    }
  }
}

Point SubmersionSpec::project(std::span<double const> p) const {
  return map_point(map_, total_.chart(), p);
}

Eigen::MatrixXd SubmersionSpec::jacobian_at(std::span<double const> p) const {
  Eigen::MatrixXd j(base_dim(), dim());
  for (int a = 0; a < base_dim(); ++a) {
    for (int b = 0; b < dim(); ++b) {
      j(a, b) = eval(jacobian_expr(a, b), total_.chart().names(), p);
    }
  }
  return j;
}

// ---------------------------------------------------------------------------

SubmersionReport check_submersion(SubmersionSpec const& spec,
                                  std::vector<Point> const& points,
                                  Tolerances const& tol) {
  SubmersionReport report;
  int const n = spec.base_dim();
  for (auto const& p : points) {
    Eigen::MatrixXd const g = spec.total().at(p);
    Eigen::MatrixXd const j = spec.jacobian_at(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    auto const& s = svd.singularValues();
    double const cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    int const rank = static_cast<int>((s.array() > cut).count());
    if (rank < n) {
      throw StructuralError("projection loses rank (" + std::to_string(rank) +
                            " < " + std::to_string(n) + ") at " + point_text(p));
    }
    Eigen::MatrixXd const candidates = g.ldlt().solve(j.transpose());
    Eigen::MatrixXd const x = gram_schmidt(candidates, g, 1e-12);
    Eigen::MatrixXd const jx = j * x;
    Eigen::MatrixXd const gb = spec.base().at(spec.project(p));
    Eigen::MatrixXd const defect =
        jx.transpose() * gb * jx - Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(defect);
    double const dev = eig.eigenvalues().cwiseAbs().maxCoeff();
    report.points.push_back({p, rank, dev});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.passed = report.max_deviation <= tol.structural;
  return report;
}

void require_submersion(SubmersionSpec const& spec, std::span<double const> p,
                        Tolerances const& tol) {
  auto const r = check_submersion(spec, {Point(p.begin(), p.end())}, tol);
  if (!r.passed) {
    throw StructuralError("not a Riemannian submersion at " + point_text(p) +
                          ": isometry defect " + std::to_string(r.max_deviation));
  }
}

Projections projections_at(SubmersionSpec const& spec, std::span<double const> p) {
  Eigen::MatrixXd const g = spec.total().at(p);
  Eigen::MatrixXd const ph = horizontal_projection_value(spec, p, g);
  Eigen::MatrixXd const pv = Eigen::MatrixXd::Identity(spec.dim(), spec.dim()) - ph;
  return {from_matrix(ph, Variance::kUpper, Variance::kLower),
          from_matrix(pv, Variance::kUpper, Variance::kLower)};
}

AdaptedFrame adapted_frame_at(SubmersionSpec const& spec,
                              std::span<double const> p) {
  Eigen::MatrixXd const g = spec.total().at(p);
  Eigen::MatrixXd const j = spec.jacobian_at(p);
  AdaptedFrame frame;
  frame.point.assign(p.begin(), p.end());
  frame.vertical = gram_schmidt(nullspace(j), g, 1e-8);
  if (frame.vertical.cols() != spec.fiber_dim()) {
    throw StructuralError("vertical Gram-Schmidt breakdown at " + point_text(p));
  }
  Eigen::MatrixXd const ph = horizontal_projection_value(spec, p, g);
  frame.horizontal = gram_schmidt(ph, g, 1e-8);
  if (frame.horizontal.cols() != spec.base_dim()) {
    throw StructuralError("horizontal Gram-Schmidt breakdown at " +
                          point_text(p) + "; check the domain box");
  }
  return frame;
}

AdaptedFrame rotate_frame(AdaptedFrame const& frame, Eigen::MatrixXd const& qh,
                          Eigen::MatrixXd const& qv) {
  return {frame.point, frame.horizontal * qh, frame.vertical * qv};
}

// ---------------------------------------------------------------------------

SubmersionGerm::SubmersionGerm(SubmersionSpec const& spec,
                               std::span<double const> p, int order)
    : spec_(&spec), metric_(spec.total(), p, order) {
  int const dim = spec.dim();
  int const n = spec.base_dim();
  auto const& space = metric_.space();
  Chart const& chart = spec.total().chart();

  JetMatrix j(n, dim);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < dim; ++b) {
      j(a, b) = expr_jet(spec.jacobian_expr(a, b), chart, p, space, order);
    }
  }
  JetMatrix gb(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      gb(a, b) = expr_jet(spec.pulled_base(a, b), chart, p, space, order);
      gb(b, a) = gb(a, b);
    }
  }
  JetMatrix const ph = metric_.inverse_metric() * (transpose(j) * gb * j);
  JetMatrix pv(dim, dim);
  JetMatrix split(dim, dim);  // P_V - P_H
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      pv(a, b) = -ph(a, b);
      if (a == b) pv(a, b) += Jet::constant(space, order, 1.0);
      split(a, b) = pv(a, b) - ph(a, b);
    }
  }
  p_h_ = to_tensor(ph, Variance::kUpper, Variance::kLower);
  p_v_ = to_tensor(pv, Variance::kUpper, Variance::kLower);

  // d_slot(d, c, a) = [(P_V - P_H) nabla_d P_H]^a_c
  Tensor<Jet> const nabla = metric_.covariant_derivative(p_h_);
  std::vector<Jet> d_slot(dim * dim * dim);
  for (int d = 0; d < dim; ++d) {
    for (int c = 0; c < dim; ++c) {
      for (int a = 0; a < dim; ++a) {
        Jet s;
        for (int e = 0; e < dim; ++e) s += split(a, e) * nabla.at({d, e, c});
        d_slot[(d * dim + c) * dim + a] = std::move(s);
      }
    }
  }
  std::vector<Variance> const var{Variance::kLower, Variance::kLower,
                                  Variance::kUpper};
  a_ = Tensor<Jet>(dim, var);
  t_ = Tensor<Jet>(dim, var);
  for (int b = 0; b < dim; ++b) {
    for (int c = 0; c < dim; ++c) {
      for (int a = 0; a < dim; ++a) {
        Jet sa, st;
        for (int d = 0; d < dim; ++d) {
          Jet const& x = d_slot[(d * dim + c) * dim + a];
          sa += ph(d, b) * x;
          st += pv(d, b) * x;
        }
        a_.at({b, c, a}) = std::move(sa);
        t_.at({b, c, a}) = std::move(st);
      }
    }
  }
  h_ = Tensor<Jet>({dim}, {Variance::kUpper});
  JetMatrix const& gi = metric_.inverse_metric();
  for (int a = 0; a < dim; ++a) {
    Jet s;
    for (int b = 0; b < dim; ++b) {
      for (int c = 0; c < dim; ++c) s += t_.at({b, c, a}) * gi(b, c);
    }
    h_[a] = std::move(s);
  }
}

// ---------------------------------------------------------------------------

TensorValue oneill_A_at(SubmersionSpec const& spec, AdaptedFrame const& frame) {
  SubmersionGerm const germ(spec, frame.point, 1);
  TensorValue const a = values(germ.A());
  Eigen::MatrixXd const g = germ.metric().metric_value();
  int const n = spec.base_dim();
  int const m = spec.fiber_dim();
  Eigen::MatrixXd const ge = g * frame.vertical;
  TensorValue out(std::vector<int>{n, n, m},
                  {Variance::kLower, Variance::kLower, Variance::kUpper});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd const v =
          apply(a, frame.horizontal.col(i), frame.horizontal.col(j));
      for (int al = 0; al < m; ++al) out.at({i, j, al}) = v.dot(ge.col(al));
    }
  }
  return out;
}

TensorValue oneill_A_at(SubmersionSpec const& spec, std::span<double const> p) {
  return oneill_A_at(spec, adapted_frame_at(spec, p));
}

TensorValue oneill_T_at(SubmersionSpec const& spec, AdaptedFrame const& frame) {
  SubmersionGerm const germ(spec, frame.point, 1);
  TensorValue const t = values(germ.T());
  Eigen::MatrixXd const g = germ.metric().metric_value();
  int const n = spec.base_dim();
  int const m = spec.fiber_dim();
  Eigen::MatrixXd const gx = g * frame.horizontal;
  TensorValue out(std::vector<int>{m, m, n},
                  {Variance::kLower, Variance::kLower, Variance::kUpper});
  for (int al = 0; al < m; ++al) {
    for (int be = 0; be < m; ++be) {
      Eigen::VectorXd const v =
          apply(t, frame.vertical.col(al), frame.vertical.col(be));
      for (int i = 0; i < n; ++i) out.at({al, be, i}) = v.dot(gx.col(i));
    }
  }
  return out;
}

TensorValue oneill_T_at(SubmersionSpec const& spec, std::span<double const> p) {
  return oneill_T_at(spec, adapted_frame_at(spec, p));
}

Eigen::VectorXd mean_curvature_at(SubmersionSpec const& spec,
                                  AdaptedFrame const& frame) {
  SubmersionGerm const germ(spec, frame.point, 1);
  TensorValue const t = values(germ.T());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(spec.dim());
  for (int al = 0; al < spec.fiber_dim(); ++al) {
    h += apply(t, frame.vertical.col(al), frame.vertical.col(al));
  }
  return h;
}

Eigen::VectorXd mean_curvature_at(SubmersionSpec const& spec,
                                  std::span<double const> p) {
  return mean_curvature_at(spec, adapted_frame_at(spec, p));
}

OrderZero order_zero_at(SubmersionSpec const& spec, std::span<double const> p) {
  SubmersionGerm const germ(spec, p, 1);
  Eigen::MatrixXd const g = germ.metric().metric_value();
  // The full norms also count A_X U and T_U X, which mirror A_X Y and T_U V.
  return {0.5 * norm_sq(values(germ.A()), g), 0.5 * norm_sq(values(germ.T()), g),
          norm_sq(values(germ.H()), g)};
}

// ---------------------------------------------------------------------------

IdentityCheck verify_horizontal_identity(SubmersionSpec const& spec,
                                         std::span<double const> p, int trials,
                                         std::uint64_t seed) {
  IdentityCheck check;
  if (spec.base_dim() < 2) {
    check.applicable = false;
    check.note = "base dimension < 2: no horizontal planes";
    return check;
  }
  SubmersionGerm const germ(spec, p, 2);
  Eigen::MatrixXd const g = germ.metric().metric_value();
  TensorValue const r_total = values(germ.metric().riemann());
  TensorValue const a = values(germ.A());
  Point const b = spec.project(p);
  MetricGerm const base(spec.base(), b, 2);
  TensorValue const r_base = values(base.riemann());
  Eigen::MatrixXd const gb = base.metric_value();
  Eigen::MatrixXd const j = spec.jacobian_at(p);
  AdaptedFrame const frame = adapted_frame_at(spec, p);

  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    auto const [x, y] = random_pair(frame.horizontal, rng);
    double const k_total = sectional(r_total, g, x, y);
    double const k_base = sectional(r_base, gb, j * x, j * y);
    Eigen::VectorXd const axy = apply(a, x, y);
    double const corr = 3.0 * axy.dot(g * axy);
    double const res = std::abs(k_base - k_total - corr);
    check.samples.push_back({k_base, k_total, corr, res});
    check.max_residual = std::max(check.max_residual, res);
  }
  return check;
}

IdentityCheck verify_gauss_identity(SubmersionSpec const& spec,
                                    FiberMetric const& fiber,
                                    std::span<double const> p, int trials,
                                    std::uint64_t seed) {
  IdentityCheck check;
  int const m = spec.fiber_dim();
  if (m < 2) {
    check.applicable = false;
    check.note = "fiber dimension < 2: no vertical planes";
    return check;
  }
  Chart const& chart = spec.total().chart();
  if (static_cast<int>(fiber.coordinates.size()) != m) {
    throw InputError("fiber metric needs one coordinate per fiber dimension");
  }
  std::vector<int> idx;
  for (auto const& c : fiber.coordinates) {
    int const i = chart.index_of(c);
    if (i < 0) throw InputError("fiber coordinate `" + c + "` is not in the total chart");
    idx.push_back(i);
  }
  Eigen::MatrixXd const j = spec.jacobian_at(p);
  for (int i : idx) {
    if (j.col(i).cwiseAbs().maxCoeff() > 1e-10) {
      throw InputError("fiber coordinate `" + chart.name(i) +
                       "` is not vertical at " + point_text(p));
    }
  }
  // Freeze the other coordinates at p.
  std::map<std::string, Expr> frozen;
  for (int i = 0; i < chart.dim(); ++i) {
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) {
      frozen[chart.name(i)] = Expr::constant(p[i]);
    }
  }
  std::vector<std::vector<Expr>> comps;
  for (auto const& row : fiber.components) {
    auto& out = comps.emplace_back();
    for (auto const& e : row) out.push_back(simplify(substitute(e, frozen)));
  }
  MetricField const fiber_metric(Chart(fiber.coordinates), std::move(comps));
  Point pf;
  for (int i : idx) pf.push_back(p[i]);
  MetricGerm const fgerm(fiber_metric, pf, 2);
  TensorValue const r_fiber = values(fgerm.riemann());
  Eigen::MatrixXd const gf = fgerm.metric_value();

  SubmersionGerm const germ(spec, p, 2);
  Eigen::MatrixXd const g = germ.metric().metric_value();
  TensorValue const r_total = values(germ.metric().riemann());
  TensorValue const t = values(germ.T());
  AdaptedFrame const frame = adapted_frame_at(spec, p);

  auto restrict = [&](Eigen::VectorXd const& v) {
    Eigen::VectorXd out(m);
    for (int k = 0; k < m; ++k) out(k) = v(idx[k]);
    return out;
  };
  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    auto const [u, v] = random_pair(frame.vertical, rng);
    double const k_total = sectional(r_total, g, u, v);
    double const k_fiber = sectional(r_fiber, gf, restrict(u), restrict(v));
    Eigen::VectorXd const tuu = apply(t, u, u);
    Eigen::VectorXd const tvv = apply(t, v, v);
    Eigen::VectorXd const tuv = apply(t, u, v);
    double const corr = tuv.dot(g * tuv) - tuu.dot(g * tvv);
    double const res = std::abs(k_total - k_fiber - corr);
    check.samples.push_back({k_total, k_fiber, corr, res});
    check.max_residual = std::max(check.max_residual, res);
  }
  return check;
}

IntegrabilityReport integrability_check(SubmersionSpec const& spec,
                                        std::vector<Point> const& points,
                                        Tolerances const& tol) {
  IntegrabilityReport report;
  for (auto const& p : points) {
    TensorValue const a = oneill_A_at(spec, p);
    double s = 0.0;
    for (double c : a.components()) s += c * c;
    report.max_norm = std::max(report.max_norm, std::sqrt(s));
  }
  report.verdict = report.max_norm <= tol.structural
                       ? Integrability::kIntegrable
                       : Integrability::kNotIntegrable;
  return report;
}

double bracket_identity_residual(SubmersionSpec const& spec,
                                 std::span<double const> p) {
  SubmersionGerm const germ(spec, p, 1);
  AdaptedFrame const frame = adapted_frame_at(spec, p);
  int const dim = spec.dim();
  int const n = spec.base_dim();
  auto const& ph = germ.horizontal_projection();
  Eigen::MatrixXd const pv = to_matrix(values(germ.vertical_projection()));
  TensorValue const a = values(germ.A());
  // dx[i](a, b) = d_b of the a-th component of P_H X_i(p).
  std::vector<Eigen::MatrixXd> dx(n, Eigen::MatrixXd::Zero(dim, dim));
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        Jet const& e = ph.at({r, c});
        if (e.is_null()) continue;
        for (int b = 0; b < dim; ++b) {
          dx[i](r, b) += e.derivative(b).value() * frame.horizontal(c, i);
        }
      }
    }
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd const xi = frame.horizontal.col(i);
      Eigen::VectorXd const xj = frame.horizontal.col(j);
      Eigen::VectorXd const bracket = dx[j] * xi - dx[i] * xj;
      Eigen::VectorXd const diff = pv * bracket - 2.0 * apply(a, xi, xj);
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

Point map_point(std::vector<Expr> const& map, Chart const& chart,
                std::span<double const> p) {
  Point out;
  out.reserve(map.size());
  for (auto const& e : map) out.push_back(eval(e, chart.names(), p));
  return out;
}

Eigen::MatrixXd map_jacobian(std::vector<Expr> const& map, Chart const& chart,
                             std::span<double const> p) {
  Eigen::MatrixXd j(static_cast<int>(map.size()), chart.dim());
  for (std::size_t a = 0; a < map.size(); ++a) {
    for (int b = 0; b < chart.dim(); ++b) {
      j(a, b) = eval(diff(map[a], chart.name(b)), chart.names(), p);
    }
  }
  return j;
}

double pullback_residual(MetricField const& source, MetricField const& target,
                         std::vector<Expr> const& map,
                         std::span<double const> p) {
  if (static_cast<int>(map.size()) != target.dim()) {
    throw InputError("map needs one component per target coordinate");
  }
  Eigen::MatrixXd const j = map_jacobian(map, source.chart(), p);
  Point const y = map_point(map, source.chart(), p);
  Eigen::MatrixXd const pulled = j.transpose() * target.at(y) * j;
  return (pulled - source.at(p)).cwiseAbs().maxCoeff();
}

NaturalityReport verify_naturality(SubmersionSpec const& a,
                                   SubmersionSpec const& b,
                                   std::vector<Expr> const& phi,
                                   std::vector<Expr> const& psi,
                                   std::vector<Point> const& points,
                                   Tolerances const& tol) {
  if (static_cast<int>(phi.size()) != b.dim() ||
      static_cast<int>(psi.size()) != b.base_dim()) {
    throw InputError("candidate maps do not match the target dimensions");
  }
  NaturalityReport report;
  for (auto const& p : points) {
    Point const image = map_point(phi, a.total().chart(), p);
    Point const base_point = a.project(p);
    Point const base_image = map_point(psi, a.base().chart(), base_point);
    if (!b.total().chart().contains(image) ||
        !b.base().chart().contains(base_image)) {
      ++report.skipped;
      report.warnings.push_back("image of " + point_text(p) +
                                " leaves the target chart domain; skipped");
      continue;
    }
    NaturalityPoint np;
    np.point = p;
    np.image = image;
    np.metric_residual = pullback_residual(a.total(), b.total(), phi, p);
    np.base_residual = pullback_residual(a.base(), b.base(), psi, base_point);
    Point const lhs = b.project(image);
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      np.commute_residual =
          std::max(np.commute_residual, std::abs(lhs[k] - base_image[k]));
    }
    OrderZero const za = order_zero_at(a, p);
    OrderZero const zb = order_zero_at(b, image);
    np.invariant_residual = std::max({std::abs(za.a2 - zb.a2),
                                      std::abs(za.t2 - zb.t2),
                                      std::abs(za.h2 - zb.h2)});
    report.max_metric = std::max(report.max_metric, np.metric_residual);
    report.max_base = std::max(report.max_base, np.base_residual);
    report.max_commute = std::max(report.max_commute, np.commute_residual);
    report.max_invariant = std::max(report.max_invariant, np.invariant_residual);
    report.points.push_back(std::move(np));
  }
  if (report.points.empty()) {
    throw InputError("naturality check: every sample point was skipped");
  }
  report.passed = report.max_metric <= tol.identity &&
                  report.max_base <= tol.identity &&
                  report.max_commute <= tol.identity &&
                  report.max_invariant <= tol.identity;
  return report;
}

}  // namespace oneill

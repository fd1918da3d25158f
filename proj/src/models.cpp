#include "oneill/models.hpp"

#include <cmath>
#include <map>
#include <set>

#include "oneill/errors.hpp"

namespace oneill {

namespace {

std::vector<std::string> joined_names(Chart const& a, Chart const& b) {
  std::vector<std::string> names = a.names();
  std::set<std::string> seen(names.begin(), names.end());
  for (auto const& n : b.names()) {
    if (!seen.insert(n).second) {
      throw InputError("coordinate name `" + n + "` is used by base and fiber");
    }
    names.push_back(n);
  }
  return names;
}

std::optional<Box> joined_box(std::optional<Box> const& a,
                              std::optional<Box> const& b) {
  if (!a || !b) return std::nullopt;
  std::vector<Interval> r = a->ranges();
  r.insert(r.end(), b->ranges().begin(), b->ranges().end());
  return Box(std::move(r));
}

std::vector<Expr> coordinate_map(Chart const& chart) {
  std::vector<Expr> out;
  for (auto const& n : chart.names()) out.push_back(Expr::variable(n));
  return out;
}

void check_uses_only(Expr const& e, Chart const& chart, char const* what) {
  for (auto const& v : free_variables(e)) {
    if (chart.index_of(v) < 0) {
      throw InputError(std::string(what) + " uses `" + v +
                       "`, which is not a base coordinate");
    }
  }
}

// Positivity of a base function over the base domain (or at the origin when
// the base has no domain box).
void check_positive(Expr const& f, Chart const& chart, char const* what) {
  std::vector<Point> pts;
  if (chart.domain()) {
    pts = halton_points(*chart.domain(), 64, 0);
    pts.push_back(chart.domain()->center());
  } else {
    pts.emplace_back(chart.dim(), 0.0);
  }
  for (auto const& p : pts) {
    if (!(eval(f, chart.names(), p) > 0.0)) {
      throw InputError(std::string(what) + " must be positive on the domain");
    }
  }
}

std::string index_text(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

// Tracks the worst residual of a named check.
struct Tracker {
  CheckItem item;
  double tol;

  Tracker(std::string name, double t) : tol(t) { item.name = std::move(name); }

  void see(double r, std::span<double const> p, std::string component) {
    if (r > item.max_residual || item.where.empty()) {
      item.max_residual = std::max(item.max_residual, r);
      item.where.assign(p.begin(), p.end());
      item.component = std::move(component);
    }
  }
  void see_matrix(Eigen::MatrixXd const& d, std::span<double const> p) {
    for (int i = 0; i < d.rows(); ++i) {
      for (int j = 0; j < d.cols(); ++j) see(std::abs(d(i, j)), p, index_text(i, j));
    }
  }
  CheckItem done() {
    item.passed = item.max_residual <= tol;
    return item;
  }
};

Eigen::MatrixXd pullback_defect(MetricField const& source,
                                MetricField const& target, double scale,
                                std::vector<Expr> const& map,
                                std::span<double const> p) {
  if (static_cast<int>(map.size()) != target.dim()) {
    throw InputError("map needs one component per target coordinate");
  }
  Eigen::MatrixXd const j = map_jacobian(map, source.chart(), p);
  Point const y = map_point(map, source.chart(), p);
  return scale * j.transpose() * target.at(y) * j - source.at(p);
}

Eigen::VectorXd log_gradient(Expr const& f, Chart const& chart,
                             std::span<double const> b) {
  double const v = eval(f, chart.names(), b);
  Eigen::VectorXd d(chart.dim());
  for (int a = 0; a < chart.dim(); ++a) {
    d(a) = eval(diff(f, chart.name(a)), chart.names(), b) / v;
  }
  return d;
}

Eigen::MatrixXd eval_matrix(std::vector<std::vector<Expr>> const& m,
                            Chart const& chart, std::span<double const> p) {
  int const n = static_cast<int>(m.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = eval(m[i][j], chart.names(), p);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SubmersionSpec build_product(MetricField const& base, MetricField const& fiber) {
  WarpedProductSpec w{base, fiber, Expr::constant(1.0)};
  return build_warped(w);
}

SubmersionSpec build_warped(WarpedProductSpec const& w) {
  Chart const& bc = w.base.chart();
  Chart const& fc = w.fiber.chart();
  Chart total_chart(joined_names(bc, fc), joined_box(bc.domain(), fc.domain()));
  check_uses_only(w.f, bc, "warping function");
  check_positive(w.f, bc, "warping function");
  int const n = bc.dim();
  int const m = fc.dim();
  Expr const f2 = w.f.is_constant(1.0) ? w.f : pow(w.f, 2.0);
  std::vector<std::vector<Expr>> g(n + m, std::vector<Expr>(n + m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g[i][j] = w.base.component(i, j);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g[n + i][n + j] = f2 * w.fiber.component(i, j);
  }
  return SubmersionSpec(MetricField(std::move(total_chart), std::move(g)),
                        w.base, coordinate_map(bc));
}

FiberMetric warped_fiber_metric(WarpedProductSpec const& w) {
  FiberMetric out;
  out.coordinates = w.fiber.chart().names();
  Expr const f2 = w.f.is_constant(1.0) ? w.f : pow(w.f, 2.0);
  int const m = w.fiber.dim();
  for (int i = 0; i < m; ++i) {
    auto& row = out.components.emplace_back();
    for (int j = 0; j < m; ++j) row.push_back(f2 * w.fiber.component(i, j));
  }
  return out;
}

WarpedClosedForm warped_closed_form_TH(WarpedProductSpec const& w,
                                       AdaptedFrame const& frame) {
  Chart const& bc = w.base.chart();
  int const n = bc.dim();
  int const m = w.fiber.dim();
  int const dim = n + m;
  std::span<double const> const b(frame.point.data(), n);
  Eigen::VectorXd const dlog = log_gradient(w.f, bc, b);
  Eigen::VectorXd covector = Eigen::VectorXd::Zero(dim);
  covector.head(n) = dlog;

  WarpedClosedForm out;
  out.t = TensorValue(std::vector<int>{m, m, n},
                      {Variance::kLower, Variance::kLower, Variance::kUpper});
  for (int i = 0; i < n; ++i) {
    double const slope = covector.dot(frame.horizontal.col(i));
    for (int al = 0; al < m; ++al) out.t.at({al, al, i}) = -slope;
  }
  // Reassemble g from its blocks to avoid depending on the total spec.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  g.topLeftCorner(n, n) = w.base.at(b);
  double const f = eval(w.f, bc.names(), b);
  g.bottomRightCorner(m, m) =
      f * f * w.fiber.at(std::span<double const>(frame.point.data() + n, m));
  out.h = -static_cast<double>(m) * g.ldlt().solve(covector);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                              0.5384693101056831, 0.9061798459386640};
constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};

class PathIntegrand {
 public:
  PathIntegrand(SubmersionSpec const& spec, int m, Point anchor)
      : spec_(spec), m_(m), last_(std::move(anchor)) {}

  // du/ds at parameter s of the segment b0 -> b1.
  double operator()(Point const& b0, Point const& b1, double s) {
    int const n = spec_.base_dim();
    Point b(n);
    Eigen::VectorXd tangent(n);
    for (int a = 0; a < n; ++a) {
      b[a] = b0[a] + s * (b1[a] - b0[a]);
      tangent(a) = b1[a] - b0[a];
    }
    Point const q = lift(b);
    SubmersionGerm const germ(spec_, q, 1);
    Eigen::MatrixXd const g = germ.metric().metric_value();
    double const a2 = 0.5 * norm_sq(values(germ.A()), g);
    max_a_ = std::max(max_a_, std::sqrt(std::max(0.0, a2)));
    if (max_a_ > 1e-6) {
      throw StructuralError("|A| = " + std::to_string(max_a_) +
                            " along the path: not of warped type");
    }
    Eigen::VectorXd h(spec_.dim());
    for (int i = 0; i < spec_.dim(); ++i) h(i) = germ.H()[i].value();
    Eigen::VectorXd const dh = spec_.jacobian_at(q) * h;
    ++evaluations_;
    return -(dh.dot(spec_.base().at(b) * tangent)) / m_;
  }

  // A total-space point over b, by Newton iteration from the last lift.
  Point lift(Point const& b) {
    Point q = last_;
    for (int it = 0; it < 60; ++it) {
      Point const pb = spec_.project(q);
      Eigen::VectorXd r(b.size());
      for (std::size_t a = 0; a < b.size(); ++a) r(a) = pb[a] - b[a];
      if (r.cwiseAbs().maxCoeff() < 1e-14) break;
      Eigen::MatrixXd const j = spec_.jacobian_at(q);
      Eigen::VectorXd const step =
          j.transpose() * (j * j.transpose()).ldlt().solve(r);
      for (int i = 0; i < spec_.dim(); ++i) q[i] -= step(i);
    }
    Point const pb = spec_.project(q);
    for (std::size_t a = 0; a < b.size(); ++a) {
      if (std::abs(pb[a] - b[a]) > 1e-10) {
        throw StructuralError("could not lift a base point of the path");
      }
    }
    if (!spec_.total().chart().contains(q)) {
      throw InputError("lifted path leaves the total chart domain");
    }
    last_ = q;
    return q;
  }

  double max_a() const { return max_a_; }
  int evaluations() const { return evaluations_; }

 private:
  SubmersionSpec const& spec_;
  int m_;
  Point last_;
  double max_a_ = 0.0;
  int evaluations_ = 0;
};

double gauss5(PathIntegrand& f, Point const& b0, Point const& b1, double lo,
              double hi) {
  double const mid = 0.5 * (lo + hi);
  double const half = 0.5 * (hi - lo);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += kWeights[k] * f(b0, b1, mid + half * kNodes[k]);
  return s * half;
}

double adaptive(PathIntegrand& f, Point const& b0, Point const& b1, double lo,
                double hi, double whole, double tol, int depth) {
  double const mid = 0.5 * (lo + hi);
  double const left = gauss5(f, b0, b1, lo, mid);
  double const right = gauss5(f, b0, b1, mid, hi);
  if (std::abs(left + right - whole) <= tol || depth >= 24) return left + right;
  return adaptive(f, b0, b1, lo, mid, left, 0.5 * tol, depth + 1) +
         adaptive(f, b0, b1, mid, hi, right, 0.5 * tol, depth + 1);
}

}  // namespace

Reconstruction reconstruct_warp(SubmersionSpec const& spec,
                                std::vector<Point> const& path, int m,
                                std::optional<Point> anchor, double tol) {
  if (path.size() < 2) throw InputError("reconstruction path needs two vertices");
  if (m < 1) throw InputError("fiber dimension must be positive");
  for (auto const& v : path) {
    if (static_cast<int>(v.size()) != spec.base_dim()) {
      throw InputError("path vertex dimension differs from the base");
    }
  }
  Point start = anchor.value_or(
      spec.total().chart().domain() ? spec.total().chart().domain()->center()
                                    : Point(spec.dim(), 0.0));
  PathIntegrand f(spec, m, std::move(start));
  f.lift(path.front());
  Reconstruction out;
  out.vertices = path;
  out.u.push_back(0.0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    double const whole = gauss5(f, path[k - 1], path[k], 0.0, 1.0);
    out.u.push_back(out.u.back() +
                    adaptive(f, path[k - 1], path[k], 0.0, 1.0, whole, tol, 0));
  }
  out.max_a = f.max_a();
  out.evaluations = f.evaluations();
  return out;
}

EquivalenceVerdict warped_equivalence_check(WarpedProductSpec const& a,
                                            WarpedProductSpec const& b,
                                            std::vector<Expr> const& psi,
                                            double c,
                                            std::vector<Expr> const& fiber_iso,
                                            std::vector<Point> const& base_points,
                                            std::vector<Point> const& fiber_points,
                                            double tol) {
  if (!(c > 0.0)) throw InputError("warping constant c must be positive");
  Tracker base("base isometry", tol);
  Tracker warp("warping relation", tol);
  Tracker fiber("fiber homothety", tol);
  Chart const& bc = a.base.chart();
  for (auto const& p : base_points) {
    base.see_matrix(pullback_defect(a.base, b.base, 1.0, psi, p), p);
    Point const q = map_point(psi, bc, p);
    double const lhs = eval(b.f, b.base.chart().names(), q);
    double const rhs = c * eval(a.f, bc.names(), p);
    warp.see(std::abs(lhs - rhs), p, "f");
  }
  for (auto const& y : fiber_points) {
    fiber.see_matrix(pullback_defect(a.fiber, b.fiber, c * c, fiber_iso, y), y);
  }
  EquivalenceVerdict v;
  v.checks = {base.done(), fiber.done(), warp.done()};
  for (auto const& item : v.checks) v.passed = v.passed && item.passed;
  return v;
}

// ---------------------------------------------------------------------------

SubmersionSpec build_hopf() {
  double const lo = 0.1;
  double const hi = M_PI / 2 - 0.1;
  std::vector<std::string> const names{"eta", "xi1", "xi2"};
  Chart total(names, Box({{lo, hi}, {0.0, 2 * M_PI}, {0.0, 2 * M_PI}}));
  auto P = [&](char const* s) { return parse(s, names); };
  MetricField g(std::move(total), {{P("1"), P("0"), P("0")},
                                   {P("0"), P("sin(eta)^2"), P("0")},
                                   {P("0"), P("0"), P("cos(eta)^2")}});
  std::vector<std::string> const bnames{"eta", "psi"};
  Chart base(bnames, Box({{lo, hi}, {-2 * M_PI, 2 * M_PI}}));
  MetricField gb(std::move(base),
                 {{parse("1", bnames), parse("0", bnames)},
                  {parse("0", bnames), parse("sin(eta)^2*cos(eta)^2", bnames)}});
  return SubmersionSpec(std::move(g), std::move(gb), {P("eta"), P("xi1 - xi2")});
}

// ---------------------------------------------------------------------------

KillingModel build_killing_total(KillingOrbitSpec const& k) {
  Chart const& bc = k.base.chart();
  int const n = bc.dim();
  if (static_cast<int>(k.alpha.size()) != n) {
    throw InputError("alpha needs one component per base coordinate");
  }
  check_uses_only(k.phi, bc, "phi");
  for (auto const& e : k.alpha) check_uses_only(e, bc, "alpha");
  check_positive(k.phi, bc, "phi");
  std::optional<Box> fiber_box;
  if (bc.domain()) fiber_box = Box({k.fiber_range});
  Chart const fiber_chart({k.fiber_name}, fiber_box);
  Chart total_chart(joined_names(bc, fiber_chart),
                    joined_box(bc.domain(), fiber_chart.domain()));

  Expr const phi2 = k.phi.is_constant(1.0) ? k.phi : pow(k.phi, 2.0);
  std::vector<std::vector<Expr>> g(n + 1, std::vector<Expr>(n + 1));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      g[a][b] = g[b][a] = k.base.component(a, b) + phi2 * k.alpha[a] * k.alpha[b];
    }
    g[a][n] = g[n][a] = phi2 * k.alpha[a];
  }
  g[n][n] = phi2;
  std::vector<Expr> killing(n + 1, Expr::constant(0.0));
  killing[n] = Expr::constant(1.0);
  return {SubmersionSpec(MetricField(std::move(total_chart), std::move(g)),
                         k.base, coordinate_map(bc)),
          std::move(killing)};
}

std::vector<std::vector<Expr>> curvature_form(KillingOrbitSpec const& k) {
  Chart const& bc = k.base.chart();
  int const n = bc.dim();
  std::vector<std::vector<Expr>> omega(n, std::vector<Expr>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      omega[a][b] = simplify(diff(k.alpha[b], bc.name(a)) -
                             diff(k.alpha[a], bc.name(b)));
    }
  }
  return omega;
}

KillingReport killing_check(SubmersionSpec const& spec,
                            std::vector<Expr> const& killing,
                            std::vector<Point> const& points, double tol) {
  MetricField const& g = spec.total();
  int const dim = g.dim();
  if (static_cast<int>(killing.size()) != dim) {
    throw InputError("Killing field needs one component per total coordinate");
  }
  Tensor<Expr> field({dim}, {Variance::kUpper});
  for (int i = 0; i < dim; ++i) field[i] = killing[i];
  KillingReport report;
  report.min_norm = std::numeric_limits<double>::infinity();
  for (auto const& p : points) {
    Eigen::MatrixXd const gm = g.at(p);
    TensorValue const nabla = values(covariant_derivative_field(field, g, 1, p));
    Eigen::MatrixXd const d = to_matrix(nabla);  // (d, a) = nabla_d K^a
    Eigen::MatrixXd const low = d * gm;          // (d, b) = nabla_d K_b
    Eigen::MatrixXd const sym = low + low.transpose();
    Eigen::MatrixXd const chol = gm.llt().matrixL();
    Eigen::MatrixXd const frame =
        chol.transpose().triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXd::Identity(dim, dim));
    double const res = (frame.transpose() * sym * frame).cwiseAbs().maxCoeff();
    Eigen::VectorXd kv(dim);
    for (int i = 0; i < dim; ++i) kv(i) = eval(killing[i], g.chart().names(), p);
    double const norm = std::sqrt(kv.dot(gm * kv));
    if (res > report.max_residual || report.where.empty()) {
      report.where = p;
    }
    report.max_residual = std::max(report.max_residual, res);
    report.min_norm = std::min(report.min_norm, norm);
  }
  report.passed = report.max_residual <= tol && report.min_norm > tol;
  return report;
}

KillingClosedForm killing_closed_form_AH(KillingOrbitSpec const& k,
                                         AdaptedFrame const& frame) {
  Chart const& bc = k.base.chart();
  int const n = bc.dim();
  int const dim = n + 1;
  std::span<double const> const b(frame.point.data(), n);
  double const phi = eval(k.phi, bc.names(), b);
  Eigen::MatrixXd const omega = eval_matrix(curvature_form(k), bc, b);
  Eigen::VectorXd const dlog = log_gradient(k.phi, bc, b);

  KillingModel const model = build_killing_total(k);
  Eigen::MatrixXd const g = model.spec.total().at(frame.point);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  u(n) = 1.0 / phi;  // K / phi

  KillingClosedForm out;
  int const m = static_cast<int>(frame.vertical.cols());
  out.a = TensorValue(std::vector<int>{n, n, m},
                      {Variance::kLower, Variance::kLower, Variance::kUpper});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd const xi = frame.horizontal.col(i).head(n);
      Eigen::VectorXd const xj = frame.horizontal.col(j).head(n);
      double const w = xi.dot(omega * xj);
      for (int al = 0; al < m; ++al) {
        out.a.at({i, j, al}) = -0.5 * phi * w * u.dot(g * frame.vertical.col(al));
      }
    }
  }
  Eigen::VectorXd covector = Eigen::VectorXd::Zero(dim);
  covector.head(n) = dlog;
  out.h = -g.ldlt().solve(covector);
  return out;
}

EquivalenceVerdict killing_equivalence_check(KillingOrbitSpec const& a,
                                             KillingOrbitSpec const& b,
                                             std::vector<Expr> const& psi,
                                             std::vector<Point> const& base_points,
                                             double tol) {
  Chart const& ac = a.base.chart();
  Chart const& bc = b.base.chart();
  int const n = ac.dim();
  if (bc.dim() != n || static_cast<int>(psi.size()) != n) {
    throw InputError("candidate base map does not match the base dimensions");
  }
  auto const omega_a = curvature_form(a);
  auto const omega_b = curvature_form(b);

  // beta = alpha - psi^* alpha', d beta symbolically.
  std::map<std::string, Expr> to_b;
  for (int k = 0; k < n; ++k) to_b[bc.name(k)] = psi[k];
  std::vector<Expr> beta(n);
  for (int c = 0; c < n; ++c) {
    Expr pulled = Expr::constant(0.0);
    for (int k = 0; k < n; ++k) {
      pulled = pulled + substitute(b.alpha[k], to_b) * diff(psi[k], ac.name(c));
    }
    beta[c] = a.alpha[c] - pulled;
  }
  std::vector<std::vector<Expr>> dbeta(n, std::vector<Expr>(n));
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      dbeta[c][d] = simplify(diff(beta[d], ac.name(c)) - diff(beta[c], ac.name(d)));
    }
  }

  Tracker metric("base isometry", tol);
  Tracker phi("phi", tol);
  Tracker omega("Omega", tol);
  Tracker closed("closedness of alpha - psi^* alpha'", tol);
  for (auto const& p : base_points) {
    metric.see_matrix(pullback_defect(a.base, b.base, 1.0, psi, p), p);
    Point const q = map_point(psi, ac, p);
    phi.see(std::abs(eval(b.phi, bc.names(), q) - eval(a.phi, ac.names(), p)), p,
            "phi");
    Eigen::MatrixXd const j = map_jacobian(psi, ac, p);
    omega.see_matrix(j.transpose() * eval_matrix(omega_b, bc, q) * j -
                         eval_matrix(omega_a, ac, p),
                     p);
    closed.see_matrix(eval_matrix(dbeta, ac, p), p);
  }
  EquivalenceVerdict v;
  v.checks = {metric.done(), phi.done(), omega.done(), closed.done()};
  for (auto const& item : v.checks) v.passed = v.passed && item.passed;
  return v;
}

}  // namespace oneill

// Acceptance run: one PASS/FAIL line per criterion. Exits non-zero only when
// a criterion could not be evaluated (an unexpected exception); a FAIL line is
// a reported outcome, not a crash.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "oneill/errors.hpp"
#include "oneill/invariants.hpp"
#include "oneill/models.hpp"
#include "oneill/submersion.hpp"

namespace fs = std::filesystem;
using namespace oneill;
using fixtures::samples;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Expr> exprs(std::vector<std::string> const& src,
                        std::vector<std::string> const& names) {
  std::vector<Expr> out;
  for (auto const& s : src) out.push_back(parse(s, names));
  return out;
}

double sum_sq(TensorValue const& t) {
  double s = 0.0;
  for (double c : t.components()) s += c * c;
  return s;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = z(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  // Mix in reflections so both components of O(n) are exercised.
  if (rng() % 2 == 0) q.col(0) *= -1.0;
  return q;
}

// ---------------------------------------------------------------- AC1

Outcome ac1() {
  struct Case {
    std::string name;
    SubmersionSpec spec;
  };
  std::vector<Case> const cases{
      {"RxR", build_product(fixtures::line("x", -1, 1), fixtures::line("y", -1, 1))},
      {"RxS1", build_product(fixtures::line("x", -1, 1), fixtures::line("s", -3, 3))},
      {"RxS2", build_product(fixtures::line("x", -1, 1), fixtures::round_sphere())},
  };
  // Invariants built from A, T, H and their derivatives; the rest are
  // curvature scalars of the total space.
  std::vector<std::string> const curvature{"scal", "ricci2", "riem2", "gradScal2",
                                           "grad2Riem2"};
  bool pass = true;
  std::ostringstream d;
  for (auto const& c : cases) {
    double worst = 0.0, worst_oneill = 0.0;
    std::vector<std::string> over;
    for (auto const& p : samples(c.spec, 100, 3)) {
      InvariantProfile const prof = profile_at(c.spec, p, kMaxProfileOrder);
      for (std::size_t i = 0; i < prof.values.size(); ++i) {
        double const v = std::abs(prof.values[i]);
        worst = std::max(worst, v);
        bool const is_curv =
            std::find(curvature.begin(), curvature.end(), prof.names[i]) != curvature.end();
        if (!is_curv) worst_oneill = std::max(worst_oneill, v);
        if (v > 1e-9 && std::find(over.begin(), over.end(), prof.names[i]) == over.end()) {
          over.push_back(prof.names[i]);
        }
      }
    }
    if (worst > 1e-9) pass = false;
    d << c.name << " max " << fmt(worst) << " (A/T/H-derived " << fmt(worst_oneill) << ")";
    if (!over.empty()) {
      d << " over 1e-9:";
      for (auto const& n : over) d << " " << n;
    }
    d << "; ";
  }
  return {pass, d.str()};
}

// ---------------------------------------------------------------- AC2

// Independent reference: Christoffel symbols by central differences of the
// metric components, no jets or symbolic derivatives. Valid for a warped
// product over a 1-d base with a flat fiber in Cartesian coordinates.
struct WarpOracle {
  MetricField const& g;

  // Gamma^k_{ij} at p.
  std::vector<double> christoffel(Point const& p) const {
    int const n = g.dim();
    double const h = 1e-5;
    std::vector<Eigen::MatrixXd> dg(n);
    for (int l = 0; l < n; ++l) {
      Point a = p, b = p;
      a[l] += h;
      b[l] -= h;
      dg[l] = (g.at(a) - g.at(b)) / (2 * h);
    }
    Eigen::MatrixXd const gi = g.at(p).inverse();
    std::vector<double> out(n * n * n, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += gi(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
          }
          out[(k * n + i) * n + j] = 0.5 * s;
        }
      }
    }
    return out;
  }

  // Base coordinate component of H at p.
  double h0(Point const& p) const {
    int const n = g.dim();
    auto const gam = christoffel(p);
    Eigen::MatrixXd const m = g.at(p);
    double s = 0.0;
    for (int a = 1; a < n; ++a) s += gam[(0 * n + a) * n + a] / m(a, a);
    return s;
  }

  double t2(Point const& p) const {
    int const n = g.dim();
    auto const gam = christoffel(p);
    Eigen::MatrixXd const m = g.at(p);
    double s = 0.0;
    for (int a = 1; a < n; ++a) {
      for (int b = 1; b < n; ++b) {
        double const c = gam[(0 * n + a) * n + b] / std::sqrt(m(a, a) * m(b, b));
        s += m(0, 0) * c * c;
      }
    }
    return s;
  }

  double h2(Point const& p) const {
    double const h = h0(p);
    return g.at(p)(0, 0) * h * h;
  }

  // div H = (1/sqrt det g) d_x(sqrt det g H^x).
  double div_h(Point const& p) const {
    double const e = 1e-3;
    auto flux = [&](double dx) {
      Point q = p;
      q[0] += dx;
      return std::sqrt(g.at(q).determinant()) * h0(q);
    };
    return (flux(e) - flux(-e)) / (2 * e) / std::sqrt(g.at(p).determinant());
  }
};

Outcome ac2() {
  bool pass = true;
  std::ostringstream d;

  SubmersionSpec const s1 = build_warped(fixtures::warped("exp(x)"));
  WarpOracle const o1{s1.total()};
  double e_t2 = 0, e_h2 = 0, e_a2 = 0, e_div = 0, oracle = 0;
  for (auto const& p : samples(s1, 100, 4)) {
    InvariantProfile const prof = profile_at(s1, p, 1);
    e_t2 = std::max(e_t2, std::abs(prof.value("T2") - 1.0));
    e_h2 = std::max(e_h2, std::abs(prof.value("H2") - 1.0));
    e_a2 = std::max(e_a2, std::abs(prof.value("A2")));
    e_div = std::max(e_div, std::abs(prof.value("divH") + 1.0));
    oracle = std::max({oracle, std::abs(o1.t2(p) - 1.0), std::abs(o1.h2(p) - 1.0),
                       std::abs(o1.div_h(p) + 1.0)});
  }
  pass = pass && e_t2 <= 1e-7 && e_h2 <= 1e-7 && e_a2 <= 1e-9 && e_div <= 1e-7;

  SubmersionSpec const s2 = build_warped(fixtures::warped("exp(x)", 2));
  WarpOracle const o2{s2.total()};
  double e_h2m = 0;
  for (auto const& p : samples(s2, 100, 4)) {
    e_h2m = std::max(e_h2m, std::abs(profile_at(s2, p, 0).value("H2") - 4.0));
    oracle = std::max(oracle, std::abs(o2.h2(p) - 4.0));
  }
  pass = pass && e_h2m <= 1e-7;
  // The oracle itself must reproduce the formula values before it vouches
  // for anything; finite differences limit it to about 1e-6.
  pass = pass && oracle <= 1e-5;

  d << "m=1 |T2-1| " << fmt(e_t2) << ", |H2-1| " << fmt(e_h2) << ", A2 " << fmt(e_a2)
    << ", |divH+1| " << fmt(e_div) << "; m=2 |H2-4| " << fmt(e_h2m)
    << "; Christoffel oracle vs formula " << fmt(oracle);
  return {pass, d.str()};
}

// ---------------------------------------------------------------- AC3

Outcome ac3() {
  SubmersionSpec const s = build_warped(fixtures::warped("exp(x^2)", 1, -0.5, 1.5));
  Reconstruction const r = reconstruct_warp(s, {{0.0}, {1.0}}, 1);
  double const du = r.u.back() - r.u.front();
  return {std::abs(du - 1.0) <= 1e-5,
          "du = " + std::to_string(du) + ", |du-1| " + fmt(std::abs(du - 1.0))};
}

// ---------------------------------------------------------------- AC4

Outcome ac4() {
  SubmersionSpec const hopf = build_hopf();
  auto const pts = samples(hopf, 32, 5);
  double th = 0.0;
  std::vector<double> a2;
  for (auto const& p : pts) {
    OrderZero const z = order_zero_at(hopf, p);
    th = std::max({th, std::abs(z.t2), std::abs(z.h2)});
    a2.push_back(z.a2);
  }
  double mean = 0.0;
  for (double v : a2) mean += v;
  mean /= a2.size();
  double var = 0.0;
  for (double v : a2) var += (v - mean) * (v - mean);
  double const sd = std::sqrt(var / a2.size());

  // 50 pairs: 10 points, 5 random horizontal orthonormal pairs each.
  int pairs = 0;
  double gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    IdentityCheck const c = verify_horizontal_identity(hopf, pts[i], 5, 100 + i);
    for (auto const& s : c.samples) {
      gap = std::max(gap, std::abs(s.lhs - s.rhs - 3.0));
      ++pairs;
    }
  }
  bool const pass = th <= 1e-8 && pairs == 50 && gap <= 1e-7 && sd <= 1e-7;
  return {pass, "max(T2,H2) " + fmt(th) + ", |K_B-K_M-3| " + fmt(gap) + " over " +
                    std::to_string(pairs) + " pairs, A2 mean " + fmt(mean) +
                    " stddev " + fmt(sd)};
}

// ---------------------------------------------------------------- AC5

Outcome ac5() {
  KillingOrbitSpec const k = fixtures::killing("exp(x)", "0", "x");
  SubmersionSpec const spec = build_killing_total(k).spec;
  double cf = 0.0, eh = 0.0, ea = 0.0;
  for (auto const& p : samples(spec, 100, 9)) {
    AdaptedFrame const f = adapted_frame_at(spec, p);
    KillingClosedForm const c = killing_closed_form_AH(k, f);
    TensorValue const a = oneill_A_at(spec, f);
    for (std::size_t i = 0; i < a.components().size(); ++i) {
      cf = std::max(cf, std::abs(a.components()[i] - c.a.components()[i]));
    }
    cf = std::max(cf, (mean_curvature_at(spec, f) - c.h).cwiseAbs().maxCoeff());
    InvariantProfile const prof = profile_at(spec, p, 0);
    eh = std::max(eh, std::abs(prof.value("H2") - 1.0));
    ea = std::max(ea, std::abs(prof.value("A2") - std::exp(2 * p[0]) / 2));
  }
  return {cf <= 1e-8 && eh <= 1e-7 && ea <= 1e-7,
          "closed form vs direct " + fmt(cf) + ", |H2-1| " + fmt(eh) +
              ", |A2-e^{2x}/2| " + fmt(ea)};
}

// ---------------------------------------------------------------- AC6

Outcome ac6() {
  std::vector<std::string> const xy{"x", "y"};
  auto const pts = halton_points(Box({{-1, 1}, {-1, 1}}), 30, 0);
  KillingOrbitSpec const a = fixtures::killing("exp(x)", "0", "x");
  // h = x y, alpha + dh = y dx + 2x dy
  KillingOrbitSpec const gauge = fixtures::killing("exp(x)", "y", "2*x");
  KillingOrbitSpec const other = fixtures::killing("exp(2*x)", "0", "x");
  auto const id = exprs(xy, xy);
  EquivalenceVerdict const good = killing_equivalence_check(a, gauge, id, pts);
  EquivalenceVerdict const bad = killing_equivalence_check(a, other, id, pts);

  bool localized = !bad.passed;
  std::string where;
  for (auto const& c : bad.checks) {
    if (c.passed == (c.name == "phi")) localized = false;
    if (c.name == "phi") {
      where = "phi residual " + fmt(c.max_residual) + " at (";
      for (std::size_t i = 0; i < c.where.size(); ++i) {
        where += (i ? ", " : "") + fmt(c.where[i]);
      }
      where += ")";
      if (c.where.empty()) localized = false;
    }
  }
  return {good.passed && localized,
          std::string("gauge ") + (good.passed ? "passes" : "fails") + "; mismatch " +
              (bad.passed ? "passes" : "fails") + ", " + where};
}

// ---------------------------------------------------------------- AC7

Outcome ac7() {
  std::vector<std::string> const x{"x"};
  auto const base_pts = halton_points(Box({{-1, 1}}), 20, 0);
  auto const fib_pts = halton_points(Box({{-1, 1}}), 20, 1);
  WarpedProductSpec const a = fixtures::warped("exp(x)");
  WarpedProductSpec const b = fixtures::warped("2*exp(x)");
  WarpedProductSpec const c = fixtures::warped("exp(2*x)");
  bool const scaled = warped_equivalence_check(a, b, exprs(x, x), 2.0,
                                               {parse("y/2", {"y"})}, base_pts, fib_pts)
                          .passed;
  bool const bad = warped_equivalence_check(a, c, exprs(x, x), 1.0,
                                            {Expr::variable("y")}, base_pts, fib_pts)
                       .passed;

  SubmersionSpec const sa = build_warped(a), sc = build_warped(c);
  Box const box = *sa.total().chart().domain();
  SignatureSample const xa = sample_signatures(sa, box, 32, 0, 2, "a");
  SignatureSample const xc = sample_signatures(sc, box, 32, 0, 2, "c");
  Comparison const cmp =
      compare(xa, genericity_rank(sa, xa), xc, genericity_rank(sc, xc), 1e-6);
  bool const pass = scaled && !bad && cmp.verdict == Verdict::kDistinct && cmp.order == 0;
  return {pass, std::string("(e^x, 2e^x, c=2) ") + (scaled ? "passes" : "fails") +
                    "; (e^x, e^{2x}) " + (bad ? "passes" : "fails") + ", compare " +
                    std::string(verdict_name(cmp.verdict)) + " at order " +
                    std::to_string(cmp.order)};
}

// ---------------------------------------------------------------- AC8

Outcome ac8() {
  struct Case {
    std::string name;
    SubmersionSpec spec;
    std::vector<std::string> phi;
  };
  std::vector<Case> const cases{
      {"RxR", build_product(fixtures::line("x", -1, 1), fixtures::line("y", -1, 1)),
       {"x", "y + 0.3"}},
      {"RxS1", build_product(fixtures::line("x", -1, 1), fixtures::line("s", -3, 3)),
       {"x", "s + 0.3"}},
      {"RxS2", build_product(fixtures::line("x", -1, 1), fixtures::round_sphere()),
       {"x", "th", "ph + 0.5"}},
      {"warped e^x", build_warped(fixtures::warped("exp(x)")), {"x", "y + 0.3"}},
      {"warped m=2", build_warped(fixtures::warped("exp(x)", 2)),
       {"x", "0.6*y - 0.8*z", "0.8*y + 0.6*z"}},
      {"warped e^(x^2)", build_warped(fixtures::warped("exp(x^2)", 1, 0.5, 1.5)),
       {"x", "y + 0.3"}},
      {"hopf", build_hopf(), {"eta", "xi1 + 0.4", "xi2 + 0.4"}},
      {"killing", build_killing_total(fixtures::killing("exp(x)", "0", "x")).spec,
       {"x", "y", "t + 0.2"}},
      {"killing hopf data", build_killing_total(fixtures::hopf_killing()).spec,
       {"eta", "psi", "t + 0.2"}},
      {"killing lumpy",
       build_killing_total(fixtures::killing("1 + 0.3*x^2 + 0.1*y", "sin(y)", "x*y")).spec,
       {"x", "y", "t + 0.2"}},
  };
  bool pass = true;
  double prof_gap = 0.0, rot_gap = 0.0;
  int compared = 0;
  std::string failed;
  std::mt19937_64 rng(8);
  for (auto const& c : cases) {
    auto const& names = c.spec.total().chart().names();
    auto const phi = exprs(c.phi, names);
    auto const psi = exprs(c.spec.base().chart().names(), c.spec.base().chart().names());
    auto const pts = samples(c.spec, 12, 2);
    if (!verify_naturality(c.spec, c.spec, phi, psi, pts).passed) {
      pass = false;
      failed += " " + c.name + "(isometry)";
      continue;
    }
    Box const& dom = *c.spec.total().chart().domain();
    double case_gap = 0.0;
    for (auto const& p : pts) {
      Point const q = map_point(phi, c.spec.total().chart(), p);
      if (!dom.contains(q)) continue;
      InvariantProfile const pa = profile_at(c.spec, p, kMaxProfileOrder);
      InvariantProfile const pb = profile_at(c.spec, q, kMaxProfileOrder);
      for (std::size_t i = 0; i < pa.values.size(); ++i) {
        case_gap = std::max(case_gap, std::abs(pa.values[i] - pb.values[i]));
      }
      ++compared;
    }
    if (case_gap > 1e-7) {
      pass = false;
      failed += " " + c.name + "(profile)";
    }
    prof_gap = std::max(prof_gap, case_gap);

    // 100 rotations spread over 5 points.
    double case_rot = 0.0;
    int const n = c.spec.base_dim(), m = c.spec.fiber_dim();
    for (int i = 0; i < 5; ++i) {
      Point const& p = pts[i];
      AdaptedFrame const f = adapted_frame_at(c.spec, p);
      Eigen::MatrixXd const g = c.spec.total().at(p);
      Eigen::VectorXd const h = mean_curvature_at(c.spec, f);
      double const a2 = sum_sq(oneill_A_at(c.spec, f));
      double const t2 = sum_sq(oneill_T_at(c.spec, f));
      double const h2 = h.dot(g * h);
      for (int r = 0; r < 20; ++r) {
        AdaptedFrame const fr =
            rotate_frame(f, random_orthogonal(n, rng), random_orthogonal(m, rng));
        Eigen::VectorXd const hr = mean_curvature_at(c.spec, fr);
        case_rot = std::max({case_rot, std::abs(sum_sq(oneill_A_at(c.spec, fr)) - a2),
                             std::abs(sum_sq(oneill_T_at(c.spec, fr)) - t2),
                             std::abs(hr.dot(g * hr) - h2)});
      }
    }
    if (case_rot > 1e-9) {
      pass = false;
      failed += " " + c.name + "(rotation)";
    }
    rot_gap = std::max(rot_gap, case_rot);
  }
  std::string d = std::to_string(cases.size()) + " models, " + std::to_string(compared) +
                  " point pairs, profile gap " + fmt(prof_gap) + ", rotation gap " +
                  fmt(rot_gap);
  if (!failed.empty()) d += "; failed:" + failed;
  return {pass, d};
}

// ---------------------------------------------------------------- AC9

Outcome ac9() {
  double anti = 0, sym = 0, bracket = 0, bianchi = 0, dg = 0;
  auto const models = fixtures::all_models();
  for (auto const& [name, spec] : models) {
    int const n = spec.base_dim(), m = spec.fiber_dim(), d = spec.dim();
    Tensor<Expr> gt(d, {Variance::kLower, Variance::kLower});
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) gt.at({i, j}) = spec.total().component(i, j);
    }
    for (auto const& p : samples(spec, 20, 6)) {
      AdaptedFrame const f = adapted_frame_at(spec, p);
      TensorValue const a = oneill_A_at(spec, f);
      TensorValue const t = oneill_T_at(spec, f);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int al = 0; al < m; ++al) {
            anti = std::max(anti, std::abs(a.at({i, j, al}) + a.at({j, i, al})));
          }
        }
      }
      for (int al = 0; al < m; ++al) {
        for (int be = 0; be < m; ++be) {
          for (int i = 0; i < n; ++i) {
            sym = std::max(sym, std::abs(t.at({al, be, i}) - t.at({be, al, i})));
          }
        }
      }
      bracket = std::max(bracket, bracket_identity_residual(spec, p));
      TensorValue const r = riemann_at(spec.total(), p);
      for (int l = 0; l < d; ++l) {
        for (int k = 0; k < d; ++k) {
          for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
              bianchi = std::max(bianchi, std::abs(r.at({l, k, i, j}) + r.at({l, i, j, k}) +
                                                   r.at({l, j, k, i})));
            }
          }
        }
      }
      dg = std::max(dg, max_abs(values(covariant_derivative_field(gt, spec.total(), 1, p))));
    }
  }
  bool const pass = std::max({anti, sym, bracket, bianchi, dg}) <= 1e-7;
  return {pass, std::to_string(models.size()) + " models: A antisymmetry " + fmt(anti) +
                    ", T symmetry " + fmt(sym) + ", bracket " + fmt(bracket) +
                    ", Bianchi " + fmt(bianchi) + ", nabla g " + fmt(dg)};
}

// ---------------------------------------------------------------- AC10

Outcome ac10() {
  struct Case {
    std::string name;
    SubmersionSpec spec;
  };
  std::vector<Case> const flat{
      {"hopf", build_hopf()},
      {"RxR", build_product(fixtures::line("x", -1, 1), fixtures::line("y", -1, 1))},
      {"RxS2", build_product(fixtures::line("x", -1, 1), fixtures::round_sphere())},
  };
  bool pass = true;
  std::ostringstream d;
  std::vector<SignatureSample> sigs;
  std::vector<Genericity> gens;
  for (auto const& c : flat) {
    Box const box = *c.spec.total().chart().domain();
    sigs.push_back(sample_signatures(c.spec, box, 16, 0, 2, c.name));
    gens.push_back(genericity_rank(c.spec, sigs.back()));
    d << c.name << " rank " << gens.back().rank << ", ";
    if (gens.back().rank != 0) pass = false;
  }
  // Every pairing, including a model against a fresh sample of itself, at
  // loose and strict tolerances.
  int consistent = 0, runs = 0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    for (std::size_t j = 0; j < flat.size(); ++j) {
      Box const box = *flat[j].spec.total().chart().domain();
      SignatureSample const other = sample_signatures(flat[j].spec, box, 16, 7, 2, "b");
      Genericity const go = genericity_rank(flat[j].spec, other);
      for (double tol : {1e-6, 1e-2}) {
        Verdict const v = compare(sigs[i], gens[i], other, go, tol).verdict;
        Verdict const w = compare(sigs[i], gens[i], sigs[i], gens[i], tol).verdict;
        consistent += (v == Verdict::kConsistent) + (w == Verdict::kConsistent);
        runs += 2;
      }
    }
  }
  if (consistent != 0) pass = false;
  d << consistent << "/" << runs << " comparisons CONSISTENT; ";

  SubmersionSpec const sq = build_warped(fixtures::warped("exp(x^2)", 1, 0.5, 1.5));
  SignatureSample const s = sample_signatures(sq, *sq.total().chart().domain(), 16, 0, 2);
  int const rank = genericity_rank(sq, s).rank;
  if (rank < 1) pass = false;
  d << "warped e^(x^2) rank " << rank;
  return {pass, d.str()};
}

// ---------------------------------------------------------------- AC11

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// The CLI appends "timing" as the final key of the pretty-printed report.
std::string strip_timing(std::string const& text) {
  auto const at = text.rfind(",\n  \"timing\"");
  return at == std::string::npos ? text : text.substr(0, at);
}

Outcome ac11() {
  std::string const sc = SCENARIO_DIR;
  std::vector<std::string> const commands{
      "profile --scenario " + sc + "/hopf.json",
      "profile --scenario " + sc + "/warped_expsq.json --max-order 3 --seed 5",
      "compare --scenario " + sc + "/warped_exp.json --scenario-b " + sc +
          "/warped_2exp.json",
      "verify --scenario " + sc + "/killing.json",
      "equivalence --scenario " + sc + "/killing.json --scenario-b " + sc +
          "/killing_gauge.json --candidates " + sc + "/candidates/killing_gauge.json",
      "reconstruct --scenario " + sc + "/warped_expsq.json",
  };
  fs::path const dir = fs::temp_directory_path() / ("oneill_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int identical = 0;
  std::string mismatch;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string texts[2];
    for (int run = 0; run < 2; ++run) {
      fs::path const out = dir / ("r" + std::to_string(i) + "_" + std::to_string(run) + ".json");
      std::string const cmd = std::string(ONEILL_CLI) + " " + commands[i] + " --out " +
                              out.string() + " > /dev/null 2>&1";
      int const status = std::system(cmd.c_str());
      int const code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      if (code != 0 && code != 1) mismatch += " [" + commands[i] + ": exit " + std::to_string(code) + "]";
      texts[run] = slurp(out);
    }
    bool const has_timing = texts[0].find("\"timing\"") != std::string::npos;
    if (has_timing && !texts[0].empty() && strip_timing(texts[0]) == strip_timing(texts[1])) {
      ++identical;
    } else {
      mismatch += " [" + commands[i] + "]";
    }
  }
  fs::remove_all(dir);
  std::string d = std::to_string(identical) + "/" + std::to_string(commands.size()) +
                  " commands byte-identical across two runs";
  if (!mismatch.empty()) d += "; differing:" + mismatch;
  return {identical == static_cast<int>(commands.size()) && mismatch.empty(), d};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},  {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}};
  int passed = 0, errors = 0;
  for (auto const& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (std::exception const& e) {
      o = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    passed += o.pass;
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  std::cout << passed << "/" << criteria.size() << " criteria pass" << std::endl;
  return errors == 0 ? 0 : 2;
}

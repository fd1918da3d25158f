#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gtest/gtest.h"
#include "oneill/errors.hpp"
#include "oneill/submersion.hpp"

namespace oneill {
namespace {

using fixtures::all_models;
using fixtures::samples;

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
  return qr.householderQ();
}

SubmersionSpec plane_over_line(std::string base_metric, std::string map = "x") {
  MetricField const total = fixtures::flat_plane("x", "y");
  MetricField const base = fixtures::metric({"u"}, {{base_metric}});
  return SubmersionSpec(total, base, {parse(map, {"x", "y"})});
}

TEST(CheckSubmersionTest, Examples) {
  std::vector<Point> const pts{{0.1, 0.2}, {-0.5, 0.7}};
  auto const flat = check_submersion(plane_over_line("1"), pts);
  EXPECT_TRUE(flat.passed);
  EXPECT_EQ(flat.max_deviation, 0.0);
  EXPECT_EQ(flat.points[0].rank, 1);

  SubmersionSpec const w = build_warped(fixtures::warped("exp(x)"));
  EXPECT_TRUE(check_submersion(w, samples(w, 20)).passed);

  auto const scaled = check_submersion(plane_over_line("4"), pts);
  EXPECT_FALSE(scaled.passed);
  EXPECT_NEAR(scaled.max_deviation, 3.0, 1e-12);
  EXPECT_THROW(require_submersion(plane_over_line("4"), pts[0]), StructuralError);
}

TEST(CheckSubmersionTest, RankDropIsStructural) {
  SubmersionSpec const s = plane_over_line("1", "x^2");
  EXPECT_THROW(check_submersion(s, {{0.0, 0.3}}), StructuralError);
  EXPECT_THROW(adapted_frame_at(s, std::vector<double>{0.0, 0.3}), StructuralError);
}

TEST(SubmersionSpecTest, RejectsBadInput) {
  MetricField const total = fixtures::flat_plane("x", "y");
  MetricField const base = fixtures::metric({"u"}, {{"1"}});
  EXPECT_THROW(SubmersionSpec(total, base, {}), InputError);
  EXPECT_THROW(SubmersionSpec(total, base, {Expr::variable("q")}), InputError);
  EXPECT_THROW(SubmersionSpec(total, total, {Expr::variable("x"), Expr::variable("y")}),
               InputError);
}

TEST(ProjectionTest, ProductAndHopf) {
  auto const pr = projections_at(plane_over_line("1"), std::vector<double>{0.3, 0.1});
  EXPECT_EQ(to_matrix(pr.horizontal), (Eigen::Matrix2d() << 1, 0, 0, 0).finished());
  EXPECT_EQ(to_matrix(pr.vertical), (Eigen::Matrix2d() << 0, 0, 0, 1).finished());

  // At eta = pi/4 the nullspace of d pi is (0, 1, 1), already unit length.
  SubmersionSpec const hopf = build_hopf();
  std::vector<double> const p{M_PI / 4, 1.0, 2.0};
  Eigen::MatrixXd const g = hopf.total().at(p);
  Eigen::Vector3d const e(0, 1, 1);
  EXPECT_NEAR(e.dot(g * e), 1.0, 1e-15);
  Eigen::MatrixXd const pv = e * (g * e).transpose();
  auto const hp = projections_at(hopf, p);
  EXPECT_LE((to_matrix(hp.vertical) - pv).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProjectionTest, AlgebraOnEveryModel) {
  for (auto const& [name, spec] : all_models()) {
    for (auto const& p : samples(spec, 100)) {
      auto const pr = projections_at(spec, p);
      Eigen::MatrixXd const ph = to_matrix(pr.horizontal);
      Eigen::MatrixXd const pv = to_matrix(pr.vertical);
      Eigen::MatrixXd const g = spec.total().at(p);
      int const d = spec.dim();
      ASSERT_LE((ph + pv - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10) << name;
      ASSERT_LE((ph * pv).cwiseAbs().maxCoeff(), 1e-10) << name;
      ASSERT_LE((ph * ph - ph).cwiseAbs().maxCoeff(), 1e-10) << name;
      ASSERT_LE(((g * ph) - (g * ph).transpose()).cwiseAbs().maxCoeff(), 1e-10) << name;
      ASSERT_NEAR(ph.trace(), spec.base_dim(), 1e-10) << name;
    }
  }
}

TEST(FrameTest, Examples) {
  auto const pf = adapted_frame_at(plane_over_line("1"), std::vector<double>{0.3, 0.1});
  EXPECT_EQ(pf.horizontal, (Eigen::Vector2d() << 1, 0).finished());
  EXPECT_EQ(pf.vertical, (Eigen::Vector2d() << 0, 1).finished());

  SubmersionSpec const w = build_warped(fixtures::warped("exp(x)"));
  std::vector<double> const p{0.4, -0.2};
  auto const wf = adapted_frame_at(w, p);
  EXPECT_NEAR(wf.horizontal(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(wf.horizontal(1, 0), 0.0, 1e-14);
  EXPECT_NEAR(wf.vertical(0, 0), 0.0, 1e-14);
  EXPECT_NEAR(wf.vertical(1, 0), std::exp(-0.4), 1e-14);
}

TEST(FrameTest, InvariantsOnEveryModel) {
  for (auto const& [name, spec] : all_models()) {
    for (auto const& p : samples(spec, 100, 3)) {
      auto const f = adapted_frame_at(spec, p);
      Eigen::MatrixXd const g = spec.total().at(p);
      Eigen::MatrixXd frame(spec.dim(), spec.dim());
      frame << f.horizontal, f.vertical;
      Eigen::MatrixXd const gram = frame.transpose() * g * frame;
      ASSERT_LE((gram - Eigen::MatrixXd::Identity(spec.dim(), spec.dim()))
                    .cwiseAbs().maxCoeff(), 1e-10) << name;
      Eigen::MatrixXd const j = spec.jacobian_at(p);
      ASSERT_LE((j * f.vertical).cwiseAbs().maxCoeff(), 1e-10) << name;
      Eigen::MatrixXd const jx = j * f.horizontal;
      Eigen::MatrixXd const gb = spec.base().at(spec.project(p));
      ASSERT_LE((jx.transpose() * gb * jx -
                 Eigen::MatrixXd::Identity(spec.base_dim(), spec.base_dim()))
                    .cwiseAbs().maxCoeff(), 1e-10) << name;
    }
  }
}

TEST(OneillTest, ProductAndWarpedHaveNoA) {
  for (auto const& [name, spec] : all_models()) {
    if (name.rfind("product", 0) != 0 && name.rfind("warped", 0) != 0) continue;
    for (auto const& p : samples(spec, 20)) {
      EXPECT_LE(max_abs(oneill_A_at(spec, p)), 1e-12) << name;
    }
  }
}

TEST(OneillTest, HopfValues) {
  SubmersionSpec const hopf = build_hopf();
  for (auto const& p : samples(hopf, 20)) {
    TensorValue const a = oneill_A_at(hopf, p);
    EXPECT_NEAR(std::abs(a.at({0, 1, 0})), 1.0, 1e-10);
    EXPECT_NEAR(sum_sq(a), 2.0, 1e-10);
    EXPECT_LE(max_abs(oneill_T_at(hopf, p)), 1e-12);
    EXPECT_LE(mean_curvature_at(hopf, p).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(OneillTest, WarpedValues) {
  SubmersionSpec const w = build_warped(fixtures::warped("exp(x)"));
  for (auto const& p : samples(w, 20)) {
    TensorValue const t = oneill_T_at(w, p);
    EXPECT_NEAR(t.at({0, 0, 0}), -1.0, 1e-12);
    EXPECT_NEAR(sum_sq(t), 1.0, 1e-12);
    Eigen::VectorXd const h = mean_curvature_at(w, p);
    EXPECT_NEAR(h(0), -1.0, 1e-12);
    EXPECT_NEAR(h(1), 0.0, 1e-12);
  }
  SubmersionSpec const w2 = build_warped(fixtures::warped("exp(2*x)"));
  for (auto const& p : samples(w2, 10)) {
    EXPECT_NEAR(order_zero_at(w2, p).h2, 4.0, 1e-10);
  }
  SubmersionSpec const pr = build_product(fixtures::line("x", -1, 1),
                                          fixtures::line("y", -1, 1));
  EXPECT_EQ(max_abs(oneill_T_at(pr, std::vector<double>{0.1, 0.2})), 0.0);
}

TEST(OneillTest, StructuralIdentitiesOnEveryModel) {
  std::mt19937_64 rng(11);
  for (auto const& [name, spec] : all_models()) {
    int const n = spec.base_dim();
    int const m = spec.fiber_dim();
    for (auto const& p : samples(spec, 100, 7)) {
      AdaptedFrame const f = adapted_frame_at(spec, p);
      TensorValue const a = oneill_A_at(spec, f);
      TensorValue const t = oneill_T_at(spec, f);
      Eigen::VectorXd const h = mean_curvature_at(spec, f);
      double anti = 0.0, sym = 0.0;
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
      ASSERT_LE(anti, 1e-8) << name;
      ASSERT_LE(sym, 1e-8) << name;
      ASSERT_LE(bracket_identity_residual(spec, p), 1e-7) << name;

      // Frame sums agree with the halved full norms used by the profile.
      OrderZero const z = order_zero_at(spec, p);
      Eigen::MatrixXd const g = spec.total().at(p);
      ASSERT_NEAR(z.a2, sum_sq(a), 1e-10) << name;
      ASSERT_NEAR(z.t2, sum_sq(t), 1e-10) << name;
      ASSERT_NEAR(z.h2, h.dot(g * h), 1e-10) << name;

      // Gauge: rotate the frame.
      AdaptedFrame const r =
          rotate_frame(f, random_orthogonal(n, rng), random_orthogonal(m, rng));
      Eigen::VectorXd const hr = mean_curvature_at(spec, r);
      ASSERT_NEAR(sum_sq(oneill_A_at(spec, r)), sum_sq(a), 1e-9) << name;
      ASSERT_NEAR(sum_sq(oneill_T_at(spec, r)), sum_sq(t), 1e-9) << name;
      ASSERT_NEAR(hr.dot(g * hr), h.dot(g * h), 1e-9) << name;

      // |H| <= sum |T_E E|, and H = 0 where T = 0.
      double bound = 0.0;
      for (int al = 0; al < m; ++al) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += t.at({al, al, i}) * t.at({al, al, i});
        bound += std::sqrt(s);
      }
      double const hn = std::sqrt(h.dot(g * h));
      ASSERT_LE(hn, bound + 1e-10) << name;
      if (max_abs(t) <= 1e-12) ASSERT_LE(hn, 1e-10) << name;
    }
  }
}

TEST(IdentityTest, HorizontalCurvature) {
  SubmersionSpec const pr = build_product(fixtures::flat_plane("x", "y"),
                                          fixtures::line("z", -1, 1));
  auto const flat = verify_horizontal_identity(pr, std::vector<double>{0.1, 0.2, 0.3}, 10);
  ASSERT_TRUE(flat.applicable);
  EXPECT_LE(flat.max_residual, 1e-12);
  for (auto const& s : flat.samples) {
    EXPECT_LE(std::abs(s.lhs) + std::abs(s.rhs), 1e-12);
  }

  SubmersionSpec const hopf = build_hopf();
  for (auto const& p : samples(hopf, 5)) {
    auto const c = verify_horizontal_identity(hopf, p, 20, 3);
    EXPECT_LE(c.max_residual, 1e-7);
    for (auto const& s : c.samples) {
      EXPECT_NEAR(s.lhs, 4.0, 1e-8);
      EXPECT_NEAR(s.rhs, 1.0, 1e-8);
      EXPECT_NEAR(s.correction, 3.0, 1e-8);
    }
  }
  SubmersionSpec const w = build_warped(fixtures::warped("exp(x)"));
  EXPECT_FALSE(verify_horizontal_identity(w, std::vector<double>{0.0, 0.0}, 5).applicable);
}

TEST(IdentityTest, GaussEquation) {
  WarpedProductSpec const sphere{fixtures::line("x", -1, 1), fixtures::round_sphere(),
                                 parse("1", {"x"})};
  SubmersionSpec const pr = build_warped(sphere);
  for (auto const& p : samples(pr, 5)) {
    auto const c = verify_gauss_identity(pr, warped_fiber_metric(sphere), p, 10);
    ASSERT_TRUE(c.applicable);
    EXPECT_LE(c.max_residual, 1e-8);
    for (auto const& s : c.samples) {
      EXPECT_LE(std::abs(s.correction), 1e-12);
      EXPECT_NEAR(s.lhs, 1.0, 1e-8);
    }
  }

  WarpedProductSpec const w = fixtures::warped("exp(x)", 2);
  SubmersionSpec const ws = build_warped(w);
  for (auto const& p : samples(ws, 5)) {
    auto const c = verify_gauss_identity(ws, warped_fiber_metric(w), p, 10);
    EXPECT_LE(c.max_residual, 1e-7);
    for (auto const& s : c.samples) {
      EXPECT_NEAR(s.lhs, -1.0, 1e-8);
      EXPECT_NEAR(s.rhs, 0.0, 1e-10);
    }
  }
  FiberMetric const none;
  EXPECT_FALSE(verify_gauss_identity(build_hopf(), none,
                                     std::vector<double>{0.5, 1, 1}, 3).applicable);
}

TEST(IntegrabilityTest, Verdicts) {
  SubmersionSpec const w = build_warped(fixtures::warped("exp(x)"));
  EXPECT_EQ(integrability_check(w, samples(w, 10)).verdict, Integrability::kIntegrable);
  SubmersionSpec const pr = build_product(fixtures::line("x", -1, 1),
                                          fixtures::line("y", -1, 1));
  EXPECT_EQ(integrability_check(pr, samples(pr, 10)).verdict, Integrability::kIntegrable);
  SubmersionSpec const hopf = build_hopf();
  auto const h = integrability_check(hopf, samples(hopf, 10));
  EXPECT_EQ(h.verdict, Integrability::kNotIntegrable);
  EXPECT_NEAR(h.max_norm, std::sqrt(2.0), 1e-10);
}

TEST(NaturalityTest, Examples) {
  std::vector<std::string> const xy{"x", "y"};
  std::vector<std::string> const x{"x"};
  for (auto const& [name, spec] : all_models()) {
    std::vector<Expr> phi, psi;
    for (auto const& c : spec.total().chart().names()) phi.push_back(Expr::variable(c));
    for (auto const& c : spec.base().chart().names()) psi.push_back(Expr::variable(c));
    auto const r = verify_naturality(spec, spec, phi, psi, samples(spec, 10));
    EXPECT_TRUE(r.passed) << name;
  }

  SubmersionSpec const a = build_warped(fixtures::warped("exp(x)"));
  SubmersionSpec const b = build_warped(fixtures::warped("2*exp(x)"));
  auto const ok = verify_naturality(a, b, {parse("x", xy), parse("y/2", xy)},
                                    {parse("x", x)}, samples(a, 20));
  EXPECT_TRUE(ok.passed);
  EXPECT_LE(ok.max_metric, 1e-12);

  SubmersionSpec const c = build_warped(fixtures::warped("exp(2*x)"));
  auto const bad = verify_naturality(a, c, {parse("x", xy), parse("y", xy)},
                                     {parse("x", x)}, samples(a, 20));
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.max_invariant, 3.0, 1e-9);  // |H|^2: 1 vs 4

  auto const gone = [&] {
    verify_naturality(a, a, {parse("x + 5", xy), parse("y", xy)},
                      {parse("x + 5", x)}, samples(a, 5));
  };
  EXPECT_THROW(gone(), InputError);
}

}  // namespace
}  // namespace oneill

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oneill/geometry.hpp"
#include "oneill/submersion.hpp"

namespace oneill {

// Total chart = base coordinates followed by fiber coordinates; pi drops the
// fiber coordinates.
SubmersionSpec build_product(MetricField const& base, MetricField const& fiber);

struct WarpedProductSpec {
  MetricField base;
  MetricField fiber;
  Expr f;  // over the base chart, positive
};

// g = gbar + f(b)^2 g_F.
SubmersionSpec build_warped(WarpedProductSpec const& w);

// Fiber metric template for the Gauss identity of product and warped models:
// f(b)^2 g_F over the fiber coordinates.
FiberMetric warped_fiber_metric(WarpedProductSpec const& w);

struct WarpedClosedForm {
  TensorValue t;       // T_{alpha beta}^i, slots (alpha, beta, i)
  Eigen::VectorXd h;   // coordinate components on the total chart
};

// T_U V = -g(U, V) grad(ln f), H = -m grad(ln f) in the given adapted frame
// of build_warped(w).
WarpedClosedForm warped_closed_form_TH(WarpedProductSpec const& w,
                                       AdaptedFrame const& frame);

struct Reconstruction {
  std::vector<Point> vertices;      // base path
  std::vector<double> u;            // ln f up to a constant, u[0] = 0
  double max_a = 0.0;               // largest |A| met along the lifted path
  int evaluations = 0;
};

// Recovers ln f along a polyline in the base from the mean curvature of the
// total space alone: du/ds = -(1/m) gbar(d pi H, gamma'). `anchor` seeds the
// lift of base points (defaults to the centre of the total chart domain).
// Throws StructuralError when |A| > 1e-6 somewhere on the path.
Reconstruction reconstruct_warp(SubmersionSpec const& spec,
                                std::vector<Point> const& path, int m,
                                std::optional<Point> anchor = std::nullopt,
                                double tol = 1e-8);

struct CheckItem {
  std::string name;
  double max_residual = 0.0;
  Point where;             // worst sample point
  std::string component;   // worst component, e.g. "(0,1)"
  bool passed = true;
};

struct EquivalenceVerdict {
  std::vector<CheckItem> checks;
  bool passed = true;
};

// psi^* gbar' = gbar, iso^*(c^2 g_F') = g_F, f' o psi = c f at samples.
EquivalenceVerdict warped_equivalence_check(WarpedProductSpec const& a,
                                            WarpedProductSpec const& b,
                                            std::vector<Expr> const& psi,
                                            double c,
                                            std::vector<Expr> const& fiber_iso,
                                            std::vector<Point> const& base_points,
                                            std::vector<Point> const& fiber_points,
                                            double tol = 1e-8);

// Unit S^3 in Hopf coordinates (eta, xi1, xi2) over the base (eta, psi).
SubmersionSpec build_hopf();

struct KillingOrbitSpec {
  MetricField base;
  Expr phi;                 // over the base chart, positive
  std::vector<Expr> alpha;  // 1-form components over the base chart
  std::string fiber_name = "t";
  Interval fiber_range{-1.0, 1.0};
};

struct KillingModel {
  SubmersionSpec spec;
  std::vector<Expr> killing;  // d/dt
};

// g = gbar + phi^2 (dt + alpha)^2 over (base coordinates, t).
KillingModel build_killing_total(KillingOrbitSpec const& k);

// Omega = d alpha, Omega_{ab} = d_a alpha_b - d_b alpha_a.
std::vector<std::vector<Expr>> curvature_form(KillingOrbitSpec const& k);

struct KillingReport {
  double max_residual = 0.0;  // |<nabla_{e_i} K, e_j> + <nabla_{e_j} K, e_i>|
  double min_norm = 0.0;      // min |K|
  Point where;
  bool passed = true;
};

KillingReport killing_check(SubmersionSpec const& spec,
                            std::vector<Expr> const& killing,
                            std::vector<Point> const& points, double tol = 1e-8);

struct KillingClosedForm {
  TensorValue a;      // A_{ij}^alpha, slots (i, j, alpha)
  Eigen::VectorXd h;  // coordinate components on the total chart
};

// A_X Y = -(phi/2) Omega(X, Y) U, U = K/phi, and H = -grad(ln phi), in the
// given adapted frame of build_killing_total(k).
KillingClosedForm killing_closed_form_AH(KillingOrbitSpec const& k,
                                         AdaptedFrame const& frame);

// psi^* gbar' = gbar, psi^* phi' = phi, psi^* Omega' = Omega and
// d(alpha - psi^* alpha') = 0 at samples of the base.
EquivalenceVerdict killing_equivalence_check(KillingOrbitSpec const& a,
                                             KillingOrbitSpec const& b,
                                             std::vector<Expr> const& psi,
                                             std::vector<Point> const& base_points,
                                             double tol = 1e-8);

}  // namespace oneill

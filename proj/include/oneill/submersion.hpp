#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oneill/geometry.hpp"

namespace oneill {

struct Tolerances {
  double structural = 1e-8;
  double identity = 1e-7;
  double orthonormality = 1e-10;
};

// pi: total chart -> base chart, given by one expression per base coordinate.
class SubmersionSpec {
 public:
  SubmersionSpec() = default;
  SubmersionSpec(MetricField total, MetricField base, std::vector<Expr> map);

  MetricField const& total() const { return total_; }
  MetricField const& base() const { return base_; }
  std::vector<Expr> const& map() const { return map_; }
  int dim() const { return total_.dim(); }
  int base_dim() const { return base_.dim(); }
  int fiber_dim() const { return total_.dim() - base_.dim(); }

  // d pi^a / d x^b as expressions, row-major (base_dim x dim).
  Expr const& jacobian_expr(int a, int b) const { return jacobian_[a * dim() + b]; }
  // Base metric composed with pi, over the total chart.
  Expr const& pulled_base(int a, int b) const { return pulled_base_[a * base_dim() + b]; }

  Point project(std::span<double const> p) const;
  Eigen::MatrixXd jacobian_at(std::span<double const> p) const;

 private:
  MetricField total_;
  MetricField base_;
  std::vector<Expr> map_;
  std::vector<Expr> jacobian_;
  std::vector<Expr> pulled_base_;
};

struct SubmersionPointCheck {
  Point point;
  int rank = 0;
  double deviation = 0.0;
};

struct SubmersionReport {
  std::vector<SubmersionPointCheck> points;
  double max_deviation = 0.0;
  bool passed = true;
};

// Throws StructuralError when d pi loses rank at some point.
SubmersionReport check_submersion(SubmersionSpec const& spec,
                                  std::vector<Point> const& points,
                                  Tolerances const& tol = {});

// Throws StructuralError unless the submersion property holds at p.
void require_submersion(SubmersionSpec const& spec, std::span<double const> p,
                        Tolerances const& tol = {});

struct Projections {
  TensorValue horizontal;  // (P_H)^a_b
  TensorValue vertical;
};

Projections projections_at(SubmersionSpec const& spec, std::span<double const> p);

// Columns are coordinate components of g-orthonormal frame vectors.
struct AdaptedFrame {
  Point point;
  Eigen::MatrixXd horizontal;  // dim x base_dim
  Eigen::MatrixXd vertical;    // dim x fiber_dim
};

AdaptedFrame adapted_frame_at(SubmersionSpec const& spec,
                              std::span<double const> p);

// The same frame rotated by (qh, qv): X -> X qh, E -> E qv.
AdaptedFrame rotate_frame(AdaptedFrame const& frame, Eigen::MatrixXd const& qh,
                          Eigen::MatrixXd const& qv);

// Jets at a point of the projection fields and of the tensor fields
//   A^a_{bc} = (P_H)^d_b [(P_V - P_H) nabla_d P_H]^a_c
//   T^a_{bc} = (P_V)^d_b [(P_V - P_H) nabla_d P_H]^a_c
// which restrict to O'Neill's A and T on adapted frames, and of H^a = T^a_{bc} g^{bc}.
// Slot layout of A and T is (b, c, a). With metric order K the projections
// carry order K and A, T, H carry order K - 1.
class SubmersionGerm {
 public:
  SubmersionGerm(SubmersionSpec const& spec, std::span<double const> p, int order);

  SubmersionSpec const& spec() const { return *spec_; }
  MetricGerm const& metric() const { return metric_; }
  Point const& point() const { return metric_.point(); }

  Tensor<Jet> const& horizontal_projection() const { return p_h_; }
  Tensor<Jet> const& vertical_projection() const { return p_v_; }
  Tensor<Jet> const& A() const { return a_; }
  Tensor<Jet> const& T() const { return t_; }
  Tensor<Jet> const& H() const { return h_; }

 private:
  SubmersionSpec const* spec_;
  MetricGerm metric_;
  Tensor<Jet> p_h_;
  Tensor<Jet> p_v_;
  Tensor<Jet> a_;
  Tensor<Jet> t_;
  Tensor<Jet> h_;
};

// Frame components A_{ij}^alpha = <A(X_i, X_j), E_alpha>, slots (i, j, alpha).
TensorValue oneill_A_at(SubmersionSpec const& spec, std::span<double const> p);
TensorValue oneill_A_at(SubmersionSpec const& spec, AdaptedFrame const& frame);
// Frame components T_{alpha beta}^i = <T(E_alpha, E_beta), X_i>, slots (alpha, beta, i).
TensorValue oneill_T_at(SubmersionSpec const& spec, std::span<double const> p);
TensorValue oneill_T_at(SubmersionSpec const& spec, AdaptedFrame const& frame);
// H = sum_alpha T(E_alpha, E_alpha) in coordinates.
Eigen::VectorXd mean_curvature_at(SubmersionSpec const& spec,
                                  std::span<double const> p);
Eigen::VectorXd mean_curvature_at(SubmersionSpec const& spec,
                                  AdaptedFrame const& frame);

// |A|^2, |T|^2 (frame sums) and |H|^2.
struct OrderZero {
  double a2 = 0.0;
  double t2 = 0.0;
  double h2 = 0.0;
};
OrderZero order_zero_at(SubmersionSpec const& spec, std::span<double const> p);

struct IdentitySample {
  double lhs = 0.0;         // K_B or K_M depending on the identity
  double rhs = 0.0;         // K_M or K_F
  double correction = 0.0;  // the O'Neill tensor terms
  double residual = 0.0;
};

struct IdentityCheck {
  bool applicable = true;
  std::string note;
  double max_residual = 0.0;
  std::vector<IdentitySample> samples;
};

// K_B(d pi X, d pi Y) - K_M(X, Y) - 3|A_X Y|^2 over random orthonormal
// horizontal pairs. Samples record lhs = K_B, rhs = K_M, correction = 3|A|^2.
IdentityCheck verify_horizontal_identity(SubmersionSpec const& spec,
                                         std::span<double const> p, int trials,
                                         std::uint64_t seed = 1);

// Induced metric of the fiber through a point, in coordinates that are a
// subset of the total chart coordinates spanning the vertical space. The
// components are expressions over the total chart; the remaining
// coordinates act as parameters fixed at the evaluation point.
struct FiberMetric {
  std::vector<std::string> coordinates;
  std::vector<std::vector<Expr>> components;
};

// K_M(U, V) - K_F(U, V) + <T_U U, T_V V> - |T_U V|^2 over random orthonormal
// vertical pairs. Samples record lhs = K_M, rhs = K_F and the T terms.
IdentityCheck verify_gauss_identity(SubmersionSpec const& spec,
                                    FiberMetric const& fiber,
                                    std::span<double const> p, int trials,
                                    std::uint64_t seed = 1);

enum class Integrability { kIntegrable, kNotIntegrable };

struct IntegrabilityReport {
  double max_norm = 0.0;  // max |A| over the points
  Integrability verdict = Integrability::kIntegrable;
};

IntegrabilityReport integrability_check(SubmersionSpec const& spec,
                                        std::vector<Point> const& points,
                                        Tolerances const& tol = {});

// max |ver[X_i, X_j] - 2 A(X_i, X_j)| for horizontal fields extended from the
// adapted frame at p by the horizontal projection.
double bracket_identity_residual(SubmersionSpec const& spec,
                                 std::span<double const> p);

struct NaturalityPoint {
  Point point;
  Point image;
  double metric_residual = 0.0;    // Phi^* g' - g
  double base_residual = 0.0;      // psi^* gbar' - gbar
  double commute_residual = 0.0;   // pi' o Phi - psi o pi
  double invariant_residual = 0.0; // |A|^2, |T|^2, |H|^2 at p vs Phi(p)
};

struct NaturalityReport {
  std::vector<NaturalityPoint> points;
  std::vector<std::string> warnings;
  int skipped = 0;
  double max_metric = 0.0;
  double max_base = 0.0;
  double max_commute = 0.0;
  double max_invariant = 0.0;
  bool passed = true;
};

// Phi: total chart of a -> total chart of b, psi: base of a -> base of b.
NaturalityReport verify_naturality(SubmersionSpec const& a,
                                   SubmersionSpec const& b,
                                   std::vector<Expr> const& phi,
                                   std::vector<Expr> const& psi,
                                   std::vector<Point> const& points,
                                   Tolerances const& tol = {});

// Helpers shared with the models module.

// Value and Jacobian of a map given by expressions over `chart`.
Point map_point(std::vector<Expr> const& map, Chart const& chart,
                std::span<double const> p);
Eigen::MatrixXd map_jacobian(std::vector<Expr> const& map, Chart const& chart,
                             std::span<double const> p);
// max |J^T target(f(p)) J - source(p)| for f = map; the image must lie in the
// target chart domain.
double pullback_residual(MetricField const& source, MetricField const& target,
                         std::vector<Expr> const& map,
                         std::span<double const> p);

}  // namespace oneill

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oneill/expr.hpp"
#include "oneill/jet.hpp"
#include "oneill/tensor.hpp"

namespace oneill {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Axis-aligned open box in chart coordinates.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> ranges);

  int dim() const { return static_cast<int>(ranges_.size()); }
  std::vector<Interval> const& ranges() const { return ranges_; }
  Interval const& range(int i) const { return ranges_[i]; }
  bool contains(std::span<double const> p) const;
  Point center() const;

 private:
  std::vector<Interval> ranges_;
};

// Deterministic Halton points inside the open box; point i uses index
// i + seed + 1 so different seeds give disjoint stretches of the sequence.
std::vector<Point> halton_points(Box const& box, int count, std::uint64_t seed);

class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<std::string> names,
                 std::optional<Box> domain = std::nullopt);

  int dim() const { return static_cast<int>(names_.size()); }
  std::vector<std::string> const& names() const { return names_; }
  std::string const& name(int i) const { return names_[i]; }
  // -1 when absent.
  int index_of(std::string const& name) const;
  std::optional<Box> const& domain() const { return domain_; }
  bool contains(std::span<double const> p) const;

 private:
  std::vector<std::string> names_;
  std::optional<Box> domain_;
};

// Symmetric matrix of expressions over a chart.
class MetricField {
 public:
  MetricField() = default;
  // `components` must be square of the chart dimension, symmetric as
  // expressions, and use only chart coordinates.
  MetricField(Chart chart, std::vector<std::vector<Expr>> components);

  Chart const& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  Expr const& component(int i, int j) const { return components_[i * dim() + j]; }

  // Metric matrix at p; throws StructuralError if not positive definite.
  Eigen::MatrixXd at(std::span<double const> p) const;

 private:
  Chart chart_;
  std::vector<Expr> components_;
};

// Dense matrix of jets with the interface transform_slot expects.
class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Jet& operator()(int i, int j) { return data_[i * cols_ + j]; }
  Jet const& operator()(int i, int j) const { return data_[i * cols_ + j]; }

  Eigen::MatrixXd values() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Jet> data_;
};

JetMatrix operator*(JetMatrix const& a, JetMatrix const& b);
JetMatrix operator+(JetMatrix const& a, JetMatrix const& b);
JetMatrix operator-(JetMatrix const& a, JetMatrix const& b);
JetMatrix transpose(JetMatrix const& a);
JetMatrix to_jet_matrix(Tensor<Jet> const& t);
Tensor<Jet> to_tensor(JetMatrix const& m, Variance row, Variance col);

// Inverse of a jet matrix: numeric inverse of the value, then the terminating
// Neumann series in the nilpotent remainder.
JetMatrix inverse(JetMatrix const& m);

// Taylor jet of an expression at p built from its exact symbolic partials.
Jet expr_jet(Expr const& e, Chart const& chart, std::span<double const> p,
             std::shared_ptr<JetSpace const> const& space, int order);

Tensor<Jet> expr_tensor_jet(Tensor<Expr> const& t, Chart const& chart,
                            std::span<double const> p,
                            std::shared_ptr<JetSpace const> const& space,
                            int order);

// Values (order-0 parts) of a jet tensor.
TensorValue values(Tensor<Jet> const& t);

// Jets of g, g^-1, Christoffel symbols and curvature at a point. `order` is
// the jet order of g; Christoffels carry order - 1, curvature order - 2.
class MetricGerm {
 public:
  MetricGerm(MetricField const& g, std::span<double const> p, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  Point const& point() const { return point_; }
  std::shared_ptr<JetSpace const> const& space() const { return space_; }

  JetMatrix const& metric() const { return metric_; }
  JetMatrix const& inverse_metric() const { return inverse_; }
  Eigen::MatrixXd metric_value() const { return metric_.values(); }
  Eigen::MatrixXd inverse_value() const { return inverse_.values(); }

  // Gamma^k_{ij} at slots (k, i, j).
  Tensor<Jet> const& christoffel() const { return christoffel_; }
  // R^l_{kij} at slots (l, k, i, j); R(X,Y)Z = R^l_{kij} Z^k X^i Y^j.
  // Requires order >= 2.
  Tensor<Jet> const& riemann() const;

  // Levi-Civita covariant derivative; the new lower slot is slot 0.
  Tensor<Jet> covariant_derivative(Tensor<Jet> const& t) const;

  Tensor<Jet> lower(Tensor<Jet> const& t, int slot) const;
  Tensor<Jet> raise(Tensor<Jet> const& t, int slot) const;

  // Jet of an expression over this chart at this point.
  Jet jet(Expr const& e, int order) const;

 private:
  int dim_;
  int order_;
  Point point_;
  Chart chart_;
  std::shared_ptr<JetSpace const> space_;
  JetMatrix metric_;
  JetMatrix inverse_;
  Tensor<Jet> christoffel_;
  mutable std::optional<Tensor<Jet>> riemann_;
};

TensorValue christoffel_at(MetricField const& g, std::span<double const> p);
TensorValue riemann_at(MetricField const& g, std::span<double const> p);

// <R(X,Y)Y,X> / (|X|^2|Y|^2 - <X,Y>^2) from curvature values R^l_{kij}.
double sectional(TensorValue const& riemann, Eigen::MatrixXd const& g,
                 Eigen::VectorXd const& x, Eigen::VectorXd const& y);
double sectional_at(MetricField const& g, std::span<double const> p,
                    Eigen::VectorXd const& x, Eigen::VectorXd const& y);

// k-fold covariant derivative of a tensor field with expression components;
// result jets have order `extra_order`.
Tensor<Jet> covariant_derivative_field(Tensor<Expr> const& field,
                                       MetricField const& g, int k,
                                       std::span<double const> p,
                                       int extra_order = 0);

// div X = d_i X^i + Gamma^i_{ij} X^j.
double divergence_at(std::vector<Expr> const& field, MetricField const& g,
                     std::span<double const> p);

// Ric_{kj} = R^i_{kij} and its g-trace.
TensorValue ricci(TensorValue const& riemann);
double scalar_curvature(TensorValue const& riemann, Eigen::MatrixXd const& g_inv);

}  // namespace oneill

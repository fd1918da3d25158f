#include "oneill/tensor.hpp"

#include <cmath>

#include "oneill/errors.hpp"

namespace oneill {

namespace {

void check_orthogonal(Eigen::MatrixXd const& q, char const* what) {
  if (q.rows() != q.cols()) {
    throw std::invalid_argument(std::string(what) + " block is not square");
  }
  Eigen::MatrixXd const defect =
      q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols());
  if (q.size() > 0 && defect.cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument(std::string(what) + " block is not orthogonal");
  }
}

}  // namespace

double norm_sq(TensorValue const& t, Eigen::MatrixXd const& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success || !g.isApprox(g.transpose(), 1e-12)) {
    throw StructuralError("norm_sq: metric is not symmetric positive definite");
  }
  Eigen::MatrixXd const g_inv = llt.solve(
      Eigen::MatrixXd::Identity(g.rows(), g.cols()));
  TensorValue dual = t;
  for (int s = 0; s < t.rank(); ++s) {
    if (t.dim(s) != g.rows()) {
      throw std::invalid_argument("norm_sq: slot dimension differs from metric");
    }
    bool const upper = t.variance(s) == Variance::kUpper;
    dual = transform_slot(dual, s, upper ? g : g_inv,
                          upper ? Variance::kLower : Variance::kUpper);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) sum += t[i] * dual[i];
  return sum;
}

TensorValue change_frame(TensorValue const& t,
                         std::vector<FrameBlock> const& slots,
                         Eigen::MatrixXd const& horizontal,
                         Eigen::MatrixXd const& vertical) {
  if (static_cast<int>(slots.size()) != t.rank()) {
    throw std::invalid_argument("change_frame: one block tag per slot");
  }
  check_orthogonal(horizontal, "horizontal");
  check_orthogonal(vertical, "vertical");
  TensorValue out = t;
  for (int s = 0; s < t.rank(); ++s) {
    Eigen::MatrixXd const& q =
        slots[s] == FrameBlock::kHorizontal ? horizontal : vertical;
    if (q.rows() != t.dim(s)) {
      throw std::invalid_argument("change_frame: block size differs from slot");
    }
    // Orthonormal frames: upper and lower components rotate alike.
    out = transform_slot(out, s, q, t.variance(s));
  }
  return out;
}

TensorValue outer(TensorValue const& a, TensorValue const& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  std::vector<Variance> var = a.variance();
  var.insert(var.end(), b.variance().begin(), b.variance().end());
  TensorValue out(dims, var);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i * b.size() + j] = a[i] * b[j];
    }
  }
  return out;
}

TensorValue from_vector(Eigen::VectorXd const& v, Variance variance) {
  TensorValue t({static_cast<int>(v.size())}, {variance});
  for (int i = 0; i < v.size(); ++i) t[i] = v(i);
  return t;
}

TensorValue from_matrix(Eigen::MatrixXd const& m, Variance row, Variance col) {
  TensorValue t({static_cast<int>(m.rows()), static_cast<int>(m.cols())},
                {row, col});
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) t.at({i, j}) = m(i, j);
  }
  return t;
}

Eigen::MatrixXd to_matrix(TensorValue const& t) {
  if (t.rank() != 2) throw std::invalid_argument("to_matrix: rank must be 2");
  Eigen::MatrixXd m(t.dim(0), t.dim(1));
  for (int i = 0; i < t.dim(0); ++i) {
    for (int j = 0; j < t.dim(1); ++j) m(i, j) = t.at({i, j});
  }
  return m;
}

double max_abs(TensorValue const& t) {
  double m = 0.0;
  for (double v : t.components()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace oneill

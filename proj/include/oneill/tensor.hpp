#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oneill {

enum class Variance { kUpper, kLower };

// Dense multi-index array with per-slot dimension and variance. Components
// are stored row-major: the last slot varies fastest.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<int> dims, std::vector<Variance> variance)
      : dims_(std::move(dims)), variance_(std::move(variance)) {
    if (dims_.size() != variance_.size()) {
      throw std::invalid_argument("tensor dims/variance length mismatch");
    }
    std::size_t n = 1;
    for (int d : dims_) {
      if (d <= 0) throw std::invalid_argument("tensor dimension must be > 0");
      n *= static_cast<std::size_t>(d);
    }
    data_.assign(n, T{});
  }

  // Uniform dimension `dim` on every slot.
  Tensor(int dim, std::vector<Variance> variance)
      : Tensor(std::vector<int>(variance.size(), dim), variance) {}

  static Tensor scalar(T value) {
    Tensor t(std::vector<int>{}, std::vector<Variance>{});
    t.data_[0] = std::move(value);
    return t;
  }

  int rank() const { return static_cast<int>(dims_.size()); }
  std::vector<int> const& dims() const { return dims_; }
  int dim(int slot) const { return dims_[slot]; }
  std::vector<Variance> const& variance() const { return variance_; }
  Variance variance(int slot) const { return variance_[slot]; }
  std::size_t size() const { return data_.size(); }

  T& operator[](std::size_t flat) { return data_[flat]; }
  T const& operator[](std::size_t flat) const { return data_[flat]; }

  T& at(std::initializer_list<int> index) { return data_[flat(index)]; }
  T const& at(std::initializer_list<int> index) const {
    return data_[flat(index)];
  }
  T& at(std::span<int const> index) { return data_[flat(index)]; }
  T const& at(std::span<int const> index) const { return data_[flat(index)]; }

  std::vector<T> const& components() const { return data_; }
  std::vector<T>& components() { return data_; }

  template <typename Index>
  std::size_t flat(Index const& index) const {
    std::size_t f = 0;
    int slot = 0;
    for (int i : index) f = f * dims_[slot++] + static_cast<std::size_t>(i);
    return f;
  }

  // Multi-index of a flat position.
  std::vector<int> unflatten(std::size_t f) const {
    std::vector<int> index(dims_.size());
    for (int s = rank() - 1; s >= 0; --s) {
      index[s] = static_cast<int>(f % dims_[s]);
      f /= dims_[s];
    }
    return index;
  }

  Tensor& operator+=(Tensor const& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }
  Tensor& operator-=(Tensor const& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

 private:
  void check_same_shape(Tensor const& other) const {
    if (dims_ != other.dims_ || variance_ != other.variance_) {
      throw std::invalid_argument("tensor shape mismatch");
    }
  }

  std::vector<int> dims_;
  std::vector<Variance> variance_;
  std::vector<T> data_;
};

using TensorValue = Tensor<double>;

template <typename T>
Tensor<T> operator+(Tensor<T> a, Tensor<T> const& b) {
  a += b;
  return a;
}

template <typename T>
Tensor<T> operator-(Tensor<T> a, Tensor<T> const& b) {
  a -= b;
  return a;
}

// Trace over one upper and one lower slot of equal dimension.
template <typename T>
Tensor<T> contract(Tensor<T> const& t, int slot_a, int slot_b) {
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= t.rank() ||
      slot_b >= t.rank()) {
    throw std::invalid_argument("contract: bad slot indices");
  }
  if (t.variance(slot_a) == t.variance(slot_b)) {
    throw std::invalid_argument("contract: variance mismatch");
  }
  if (t.dim(slot_a) != t.dim(slot_b)) {
    throw std::invalid_argument("contract: dimension mismatch");
  }
  std::vector<int> dims;
  std::vector<Variance> variance;
  for (int s = 0; s < t.rank(); ++s) {
    if (s == slot_a || s == slot_b) continue;
    dims.push_back(t.dim(s));
    variance.push_back(t.variance(s));
  }
  Tensor<T> out(dims, variance);
  std::vector<int> full(t.rank());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto const idx = out.unflatten(f);
    int k = 0;
    for (int s = 0; s < t.rank(); ++s) {
      if (s != slot_a && s != slot_b) full[s] = idx[k++];
    }
    T sum{};
    for (int i = 0; i < t.dim(slot_a); ++i) {
      full[slot_a] = full[slot_b] = i;
      sum += t.at(std::span<int const>(full));
    }
    out[f] = sum;
  }
  return out;
}

// Sum over a slot of `a` paired with a slot of `b`:
// out[a-rest..., b-rest...] = sum_i a[.. i ..] b[.. i ..].
// Variance pairing is the caller's responsibility (one upper, one lower).
template <typename T>
Tensor<T> contract_pair(Tensor<T> const& a, int slot_a, Tensor<T> const& b,
                        int slot_b) {
  if (a.dim(slot_a) != b.dim(slot_b)) {
    throw std::invalid_argument("contract_pair: dimension mismatch");
  }
  if (a.variance(slot_a) == b.variance(slot_b)) {
    throw std::invalid_argument("contract_pair: variance mismatch");
  }
  std::vector<int> dims;
  std::vector<Variance> variance;
  for (int s = 0; s < a.rank(); ++s) {
    if (s == slot_a) continue;
    dims.push_back(a.dim(s));
    variance.push_back(a.variance(s));
  }
  for (int s = 0; s < b.rank(); ++s) {
    if (s == slot_b) continue;
    dims.push_back(b.dim(s));
    variance.push_back(b.variance(s));
  }
  Tensor<T> out(dims, variance);
  std::vector<int> ia(a.rank()), ib(b.rank());
  int const n = a.dim(slot_a);
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto const idx = out.unflatten(f);
    int k = 0;
    for (int s = 0; s < a.rank(); ++s) {
      if (s != slot_a) ia[s] = idx[k++];
    }
    for (int s = 0; s < b.rank(); ++s) {
      if (s != slot_b) ib[s] = idx[k++];
    }
    T sum{};
    for (int i = 0; i < n; ++i) {
      ia[slot_a] = i;
      ib[slot_b] = i;
      T const& x = a.at(std::span<int const>(ia));
      T const& y = b.at(std::span<int const>(ib));
      sum += x * y;
    }
    out[f] = sum;
  }
  return out;
}

// Replaces slot `slot` by m[new, old] applied to it; the slot takes the
// given variance. Used for raising/lowering with g and for frame changes.
template <typename T, typename M>
Tensor<T> transform_slot(Tensor<T> const& t, int slot, M const& m,
                         Variance variance) {
  int const n_old = t.dim(slot);
  int const n_new = static_cast<int>(m.rows());
  if (m.cols() != n_old) throw std::invalid_argument("transform_slot: shape");
  std::vector<int> dims = t.dims();
  dims[slot] = n_new;
  std::vector<Variance> var = t.variance();
  var[slot] = variance;
  Tensor<T> out(dims, var);
  std::vector<int> src(t.rank());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto const idx = out.unflatten(f);
    src = idx;
    T sum{};
    for (int j = 0; j < n_old; ++j) {
      src[slot] = j;
      auto const& c = m(idx[slot], j);
      sum += c * t.at(std::span<int const>(src));
    }
    out[f] = sum;
  }
  return out;
}

// Numeric tensor operations.

// Full self-contraction with every index paired through g (lower slots via
// g^-1, upper slots via g). g must be symmetric positive definite.
double norm_sq(TensorValue const& t, Eigen::MatrixXd const& g);

// Slot membership for tensors expressed in an adapted orthonormal frame.
enum class FrameBlock { kHorizontal, kVertical };

// Rotates frame components by the block-diagonal orthogonal change
// (horizontal, vertical). Each slot transforms with the block it belongs to.
TensorValue change_frame(TensorValue const& t,
                         std::vector<FrameBlock> const& slots,
                         Eigen::MatrixXd const& horizontal,
                         Eigen::MatrixXd const& vertical);

TensorValue outer(TensorValue const& a, TensorValue const& b);
TensorValue from_vector(Eigen::VectorXd const& v, Variance variance);
TensorValue from_matrix(Eigen::MatrixXd const& m, Variance row, Variance col);
Eigen::MatrixXd to_matrix(TensorValue const& t);
double max_abs(TensorValue const& t);

}  // namespace oneill

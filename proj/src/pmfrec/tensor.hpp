#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "common.hpp"

namespace pmfrec {

// Dense N-way array stored flat with the first index fastest, i.e. the
// linear index of (i_1,...,i_N) is sum_k i_k * J_k with J_k = prod_{m<k} I_m
// (all 0-based). Matricizations and vectorized identities in this project
// all derive from this one convention.
class DenseTensor {
public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> shape);
  DenseTensor(std::vector<int> shape, Vector data);

  int order() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  std::int64_t size() const { return data_.size(); }

  const Vector& vec() const { return data_; }
  Vector& vec() { return data_; }

  std::int64_t linear_index(std::span<const int> index) const;
  void multi_index(std::int64_t linear, std::span<int> out) const;

  double operator()(std::span<const int> index) const {
    return data_[linear_index(index)];
  }
  double& operator()(std::span<const int> index) {
    return data_[linear_index(index)];
  }
  double at(std::initializer_list<int> index) const {
    return data_[linear_index(std::span<const int>(index.begin(), index.size()))];
  }

  double sum() const { return data_.sum(); }
  double norm() const { return data_.norm(); }

  bool is_probability(double tol = 1e-9) const;
  // Throws a data error unless entries are nonnegative and sum to 1.
  void require_probability(double tol = 1e-9) const;

  // Sums out every mode not listed in `keep` (strictly increasing, 0-based).
  DenseTensor marginalize(std::span<const int> keep) const;

private:
  std::vector<int> shape_;
  Vector data_;
};

// Columnwise Kronecker product of a (I x F) and b (J x F): column f of the
// result is kron(a_f, b_f), so the row index of `a` varies slowest.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

// A_K (x) A_{K-1} (x) ... (x) A_1 for factors listed in ascending mode
// order; row index of factors[0] varies fastest, matching vec().
Matrix khatri_rao_chain(std::span<const Matrix* const> factors);
Matrix khatri_rao_chain(const std::vector<Matrix>& factors);

Matrix hadamard(const Matrix& a, const Matrix& b);

// Tall mode-n matricization, shape (prod_{k != n} I_k) x I_n; the row index
// packs the remaining modes in ascending order, first fastest. 0-based mode.
Matrix mode_n_unfold(const DenseTensor& t, int mode);

// Inverse of mode_n_unfold for the given shape.
DenseTensor fold_mode_n(const Matrix& unfolding, const std::vector<int>& shape,
                        int mode);

}  // namespace pmfrec

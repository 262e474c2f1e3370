#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pmfrec {

namespace {

std::int64_t checked_size(const std::vector<int>& shape) {
  require(!shape.empty(), ErrorCode::Dimension, "tensor shape must be nonempty");
  std::int64_t n = 1;
  for (int d : shape) {
    require(d >= 1, ErrorCode::Dimension, "tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(Vector::Zero(checked_size(shape_))) {}

DenseTensor::DenseTensor(std::vector<int> shape, Vector data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  require(checked_size(shape_) == data_.size(), ErrorCode::Dimension,
          "tensor data length does not match the product of the shape");
}

std::int64_t DenseTensor::linear_index(std::span<const int> index) const {
  require(index.size() == shape_.size(), ErrorCode::Dimension,
          "index order does not match tensor order");
  std::int64_t j = 0;
  std::int64_t stride = 1;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    require(index[k] >= 0 && index[k] < shape_[k], ErrorCode::Dimension,
            "tensor index out of range");
    j += index[k] * stride;
    stride *= shape_[k];
  }
  return j;
}

void DenseTensor::multi_index(std::int64_t linear, std::span<int> out) const {
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    out[k] = static_cast<int>(linear % shape_[k]);
    linear /= shape_[k];
  }
}

bool DenseTensor::is_probability(double tol) const {
  if ((data_.array() < 0.0).any()) return false;
  return std::abs(data_.sum() - 1.0) <= tol;
}

void DenseTensor::require_probability(double tol) const {
  require(!(data_.array() < 0.0).any(), ErrorCode::Data,
          "probability tensor has negative entries");
  double s = data_.sum();
  std::ostringstream msg;
  msg << "probability tensor sums to " << s << ", expected 1";
  require(std::abs(s - 1.0) <= tol, ErrorCode::Data, msg.str());
}

DenseTensor DenseTensor::marginalize(std::span<const int> keep) const {
  require(!keep.empty(), ErrorCode::Dimension, "marginalize: empty mode set");
  std::vector<int> out_shape;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    require(keep[k] >= 0 && keep[k] < order(), ErrorCode::Dimension,
            "marginalize: mode out of range");
    if (k > 0)
      require(keep[k] > keep[k - 1], ErrorCode::Dimension,
              "marginalize: modes must be strictly increasing");
    out_shape.push_back(shape_[keep[k]]);
  }
  DenseTensor out(out_shape);
  std::vector<int> idx(shape_.size());
  for (std::int64_t j = 0; j < size(); ++j) {
    multi_index(j, idx);
    std::int64_t o = 0;
    std::int64_t stride = 1;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      o += idx[keep[k]] * stride;
      stride *= out_shape[k];
    }
    out.vec()[o] += data_[j];
  }
  return out;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), ErrorCode::Dimension,
          "khatri_rao: column counts differ");
  Matrix out(a.rows() * b.rows(), a.cols());
  for (Eigen::Index f = 0; f < a.cols(); ++f)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.col(f).segment(i * b.rows(), b.rows()) = a(i, f) * b.col(f);
  return out;
}

Matrix khatri_rao_chain(std::span<const Matrix* const> factors) {
  require(!factors.empty(), ErrorCode::Dimension, "khatri_rao_chain: empty list");
  Matrix out = *factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k)
    out = khatri_rao(*factors[k], out);
  return out;
}

Matrix khatri_rao_chain(const std::vector<Matrix>& factors) {
  std::vector<const Matrix*> ptrs;
  ptrs.reserve(factors.size());
  for (const Matrix& m : factors) ptrs.push_back(&m);
  return khatri_rao_chain(std::span<const Matrix* const>(ptrs));
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::Dimension,
          "hadamard: shapes differ");
  return a.cwiseProduct(b);
}

Matrix mode_n_unfold(const DenseTensor& t, int mode) {
  require(mode >= 0 && mode < t.order(), ErrorCode::Dimension,
          "mode_n_unfold: mode out of range");
  const auto& shape = t.shape();
  std::int64_t lower = 1, upper = 1;
  for (int k = 0; k < mode; ++k) lower *= shape[k];
  for (int k = mode + 1; k < t.order(); ++k) upper *= shape[k];
  const std::int64_t cols = shape[mode];
  Matrix out(lower * upper, cols);
  for (std::int64_t o = 0; o < upper; ++o)
    for (std::int64_t c = 0; c < cols; ++c)
      out.col(c).segment(o * lower, lower) =
          t.vec().segment(lower * (c + cols * o), lower);
  return out;
}

DenseTensor fold_mode_n(const Matrix& unfolding, const std::vector<int>& shape,
                        int mode) {
  require(mode >= 0 && mode < static_cast<int>(shape.size()),
          ErrorCode::Dimension, "fold_mode_n: mode out of range");
  DenseTensor out(shape);
  std::int64_t lower = 1, upper = 1;
  for (int k = 0; k < mode; ++k) lower *= shape[k];
  for (std::size_t k = mode + 1; k < shape.size(); ++k) upper *= shape[k];
  const std::int64_t cols = shape[mode];
  require(unfolding.rows() == lower * upper && unfolding.cols() == cols,
          ErrorCode::Dimension, "fold_mode_n: unfolding shape mismatch");
  for (std::int64_t o = 0; o < upper; ++o)
    for (std::int64_t c = 0; c < cols; ++c)
      out.vec().segment(lower * (c + cols * o), lower) =
          unfolding.col(c).segment(o * lower, lower);
  return out;
}

}  // namespace pmfrec

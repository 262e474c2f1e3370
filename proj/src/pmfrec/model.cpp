#include "model.hpp"

#include <cmath>
#include <sstream>

#include "io_detail.hpp"

namespace pmfrec {

CpdModel::CpdModel(Vector weights, std::vector<Matrix> factors)
    : weights_(std::move(weights)), factors_(std::move(factors)) {
  require(weights_.size() > 0, ErrorCode::Dimension, "model rank must be >= 1");
  require(!factors_.empty(), ErrorCode::Dimension, "model needs >= 1 factor");
  for (const Matrix& a : factors_)
    require(a.cols() == weights_.size(), ErrorCode::Dimension,
            "factor column count does not match rank");
}

std::vector<int> CpdModel::cardinalities() const {
  std::vector<int> cards;
  cards.reserve(factors_.size());
  for (const Matrix& a : factors_) cards.push_back(static_cast<int>(a.rows()));
  return cards;
}

bool CpdModel::is_valid(double tol) const {
  if (weights_.size() == 0) return false;
  if ((weights_.array() < 0.0).any()) return false;
  if (std::abs(weights_.sum() - 1.0) > tol) return false;
  for (const Matrix& a : factors_) {
    if ((a.array() < 0.0).any()) return false;
    for (Eigen::Index f = 0; f < a.cols(); ++f)
      if (std::abs(a.col(f).sum() - 1.0) > tol) return false;
  }
  return true;
}

void CpdModel::validate(double tol) const {
  require((weights_.array() >= 0.0).all(), ErrorCode::Data,
          "model weights have negative entries");
  require(std::abs(weights_.sum() - 1.0) <= tol, ErrorCode::Data,
          "model weights do not sum to 1");
  for (std::size_t n = 0; n < factors_.size(); ++n) {
    const Matrix& a = factors_[n];
    require((a.array() >= 0.0).all(), ErrorCode::Data,
            "factor " + std::to_string(n + 1) + " has negative entries");
    for (Eigen::Index f = 0; f < a.cols(); ++f)
      require(std::abs(a.col(f).sum() - 1.0) <= tol, ErrorCode::Data,
              "factor " + std::to_string(n + 1) + " column " +
                  std::to_string(f + 1) + " does not sum to 1");
  }
}

DenseTensor CpdModel::reconstruct() const {
  std::vector<int> modes(factors_.size());
  for (std::size_t n = 0; n < factors_.size(); ++n) modes[n] = static_cast<int>(n);
  return reconstruct(modes);
}

DenseTensor CpdModel::reconstruct(std::span<const int> modes) const {
  require(!modes.empty(), ErrorCode::Dimension, "reconstruct: empty mode set");
  std::vector<int> shape;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    require(modes[k] >= 0 && modes[k] < num_vars(), ErrorCode::Dimension,
            "reconstruct: mode out of range");
    if (k > 0)
      require(modes[k] > modes[k - 1], ErrorCode::Dimension,
              "reconstruct: modes must be strictly increasing");
    shape.push_back(static_cast<int>(factors_[modes[k]].rows()));
  }
  DenseTensor out(shape);
  // Accumulate one rank-1 term per component; kron grows first index fastest.
  Vector buf, next;
  for (int f = 0; f < rank(); ++f) {
    buf = factors_[modes[0]].col(f);
    for (std::size_t k = 1; k < modes.size(); ++k) {
      const Vector& a = factors_[modes[k]].col(f);
      next.resize(buf.size() * a.size());
      for (Eigen::Index i = 0; i < a.size(); ++i)
        next.segment(i * buf.size(), buf.size()) = a[i] * buf;
      buf.swap(next);
    }
    out.vec() += weights_[f] * buf;
  }
  return out;
}

CpdModel CpdModel::permute_components(std::span<const int> perm) const {
  require(static_cast<int>(perm.size()) == rank(), ErrorCode::Dimension,
          "permutation length does not match rank");
  Vector w(rank());
  std::vector<Matrix> fs(factors_.size());
  for (std::size_t n = 0; n < factors_.size(); ++n)
    fs[n].resize(factors_[n].rows(), rank());
  for (int f = 0; f < rank(); ++f) {
    require(perm[f] >= 0 && perm[f] < rank(), ErrorCode::Dimension,
            "permutation entry out of range");
    w[f] = weights_[perm[f]];
    for (std::size_t n = 0; n < factors_.size(); ++n)
      fs[n].col(f) = factors_[n].col(perm[f]);
  }
  return CpdModel(std::move(w), std::move(fs));
}

void CpdModel::save(const std::string& path) const {
  std::ostringstream out;
  out << "pmfrec-model 1\n";
  out << "vars " << num_vars() << "\n";
  out << "rank " << rank() << "\n";
  out << "cards";
  for (int c : cardinalities()) out << ' ' << c;
  out << "\n";
  out << "lambda\n";
  detail::append_values(out, weights_.data(), weights_.size());
  for (int n = 0; n < num_vars(); ++n) {
    out << "factor " << (n + 1) << "\n";
    detail::append_values(out, factors_[n].data(), factors_[n].size());
  }
  detail::write_file(path, out.str());
}

CpdModel CpdModel::load(const std::string& path) {
  detail::TokenReader in(detail::read_file(path), path);
  in.expect("pmfrec-model");
  long long version = in.next_int();
  if (version != 1) in.fail("unsupported model format version");
  in.expect("vars");
  long long nvars = in.next_int();
  if (nvars < 1) in.fail("vars must be >= 1");
  in.expect("rank");
  long long rank = in.next_int();
  if (rank < 1) in.fail("rank must be >= 1");
  in.expect("cards");
  std::vector<int> cards(nvars);
  for (auto& c : cards) {
    long long v = in.next_int();
    if (v < 1) in.fail("cardinalities must be >= 1");
    c = static_cast<int>(v);
  }
  in.expect("lambda");
  Vector weights(rank);
  for (long long f = 0; f < rank; ++f) weights[f] = in.next_double();
  std::vector<Matrix> factors;
  factors.reserve(nvars);
  for (long long n = 0; n < nvars; ++n) {
    in.expect("factor");
    if (in.next_int() != n + 1) in.fail("factors out of order");
    Matrix a(cards[n], rank);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = in.next_double();
    factors.push_back(std::move(a));
  }
  if (!in.at_end()) in.fail("trailing content after the last factor");
  return CpdModel(std::move(weights), std::move(factors));
}

}  // namespace pmfrec

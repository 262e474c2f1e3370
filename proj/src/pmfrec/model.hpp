#pragma once

#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "tensor.hpp"

namespace pmfrec {

// Mixture weights plus one column-stochastic factor matrix per variable:
// the joint PMF is sum_f weights(f) * prod_n factor(n)(i_n, f). Column f of
// factor n is the conditional PMF of variable n given latent state f, and
// the weights are the latent prior.
class CpdModel {
public:
  CpdModel() = default;
  CpdModel(Vector weights, std::vector<Matrix> factors);

  int rank() const { return static_cast<int>(weights_.size()); }
  int num_vars() const { return static_cast<int>(factors_.size()); }
  std::vector<int> cardinalities() const;

  const Vector& weights() const { return weights_; }
  const std::vector<Matrix>& factors() const { return factors_; }
  const Matrix& factor(int n) const { return factors_[n]; }

  Vector& weights() { return weights_; }
  Matrix& factor(int n) { return factors_[n]; }

  // Checks nonnegativity, unit weight sum and column-stochastic factors.
  void validate(double tol = 1e-9) const;
  bool is_valid(double tol = 1e-9) const;

  // Full joint PMF tensor (entry-wise sum of rank-1 terms).
  DenseTensor reconstruct() const;
  // Marginal PMF tensor over the given strictly increasing mode subset.
  // Dropping a mode is exact because its factor columns sum to 1.
  DenseTensor reconstruct(std::span<const int> modes) const;

  // Reorders mixture components; used by tests and factor matching.
  CpdModel permute_components(std::span<const int> perm) const;

  void save(const std::string& path) const;
  static CpdModel load(const std::string& path);

private:
  Vector weights_;
  std::vector<Matrix> factors_;
};

}  // namespace pmfrec

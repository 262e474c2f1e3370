#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "dataset.hpp"
#include "model.hpp"
#include "tensor.hpp"

namespace pmfrec {

// All size-m subsets of {0..n-1}, each sorted ascending, in lexicographic
// order.
std::vector<std::vector<int>> all_tuples(int n, int m);

// Order-m marginal PMF tensors keyed by strictly increasing variable
// tuples, together with the number of samples that backed each estimate.
class MarginalSet {
public:
  struct Entry {
    DenseTensor tensor;
    std::int64_t support = 0;
  };

  MarginalSet() = default;
  MarginalSet(int order, std::vector<int> cardinalities);

  int order() const { return order_; }
  int num_vars() const { return static_cast<int>(cards_.size()); }
  const std::vector<int>& cardinalities() const { return cards_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // True when every size-m tuple is present.
  bool complete() const;

  // Producers guarantee the probability invariant; degenerate (for example
  // all-zero) tensors can be inserted explicitly for solver inputs.
  void insert(std::vector<int> tuple, DenseTensor tensor, std::int64_t support,
              bool require_prob = true);

  bool contains(const std::vector<int>& tuple) const;
  const DenseTensor& at(const std::vector<int>& tuple) const;
  std::int64_t support(const std::vector<int>& tuple) const;

  const std::map<std::vector<int>, Entry>& entries() const { return entries_; }

  std::vector<std::vector<int>> tuples_containing(int var) const;

  void save(const std::string& path) const;
  static MarginalSet load(const std::string& path);

private:
  int order_ = 0;
  std::vector<int> cards_;
  std::map<std::vector<int>, Entry> entries_;
};

// Empirical order-m marginals. A sample contributes to a tuple iff all m
// variables of the tuple are observed in it; `alpha` is added to every cell
// before normalizing. A tuple with no co-observed samples needs alpha > 0.
MarginalSet estimate_marginals(const RatingsDataset& data, int order,
                               double alpha);

// Exact model marginals over every size-m tuple.
MarginalSet marginals_from_model(const CpdModel& model, int order);

// Coupled least-squares objective: sum over tuples of
// 0.5 * || X_tuple - model marginal over the tuple ||_F^2.
double marginal_residual(const CpdModel& model, const MarginalSet& marginals);

}  // namespace pmfrec

#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "model.hpp"
#include "tensor.hpp"

namespace pmfrec {

// Exact minimum-cost assignment on a square cost matrix (Kuhn-Munkres with
// potentials, O(n^3)); returns the column assigned to each row.
std::vector<int> min_cost_assignment(const Matrix& cost);

// Component permutation that best aligns `est` to `truth`: entry r is the
// estimated component matched to true component r. The assignment cost of a
// pair is the columnwise Frobenius error summed over all modes plus the
// weight difference.
std::vector<int> match_components(const CpdModel& truth, const CpdModel& est);

// Mean over modes of || A_n - A_n_hat Pi ||_F / || A_n ||_F with Pi the
// optimal component matching above.
double mre_factors(const CpdModel& truth, const CpdModel& est);

// || X - X_hat ||_F / || X ||_F.
double mre_tensor(const DenseTensor& truth, const DenseTensor& est);
double mre_tensor(const CpdModel& truth, const CpdModel& est);

double rmse(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);

// Sorted-midpoint median; even lengths average the middle pair.
double median(std::vector<double> values);

}  // namespace pmfrec

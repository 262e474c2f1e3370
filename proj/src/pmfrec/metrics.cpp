#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmfrec {

std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  require(cost.cols() == n, ErrorCode::Dimension,
          "assignment cost matrix must be square");
  require(cost.allFinite(), ErrorCode::Numeric,
          "assignment cost matrix must be finite");
  const double inf = std::numeric_limits<double>::infinity();
  // Kuhn-Munkres with row/column potentials; p[j] is the row matched to
  // column j, index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

std::vector<int> match_components(const CpdModel& truth, const CpdModel& est) {
  require(truth.rank() == est.rank(), ErrorCode::Dimension,
          "component matching needs equal ranks");
  require(truth.cardinalities() == est.cardinalities(), ErrorCode::Dimension,
          "component matching needs equal cardinalities");
  const int rank = truth.rank();
  Matrix cost = Matrix::Zero(rank, rank);
  for (int r = 0; r < rank; ++r) {
    for (int c = 0; c < rank; ++c) {
      double total = std::abs(truth.weights()[r] - est.weights()[c]);
      for (int n = 0; n < truth.num_vars(); ++n) {
        total += (truth.factor(n).col(r) - est.factor(n).col(c)).norm();
      }
      cost(r, c) = total;
    }
  }
  return min_cost_assignment(cost);
}

double mre_factors(const CpdModel& truth, const CpdModel& est) {
  const std::vector<int> perm = match_components(truth, est);
  double total = 0.0;
  for (int n = 0; n < truth.num_vars(); ++n) {
    const Matrix& a = truth.factor(n);
    double err_sq = 0.0;
    for (int r = 0; r < truth.rank(); ++r) {
      err_sq += (a.col(r) - est.factor(n).col(perm[r])).squaredNorm();
    }
    total += std::sqrt(err_sq) / a.norm();
  }
  return total / truth.num_vars();
}

double mre_tensor(const DenseTensor& truth, const DenseTensor& est) {
  require(truth.shape() == est.shape(), ErrorCode::Dimension,
          "tensor shapes differ");
  const double denom = truth.norm();
  require(denom > 0.0, ErrorCode::Numeric,
          "reference tensor has zero norm");
  return (truth.vec() - est.vec()).norm() / denom;
}

double mre_tensor(const CpdModel& truth, const CpdModel& est) {
  return mre_tensor(truth.reconstruct(), est.reconstruct());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  require(pred.size() == truth.size(), ErrorCode::Dimension,
          "prediction and truth lengths differ");
  require(!pred.empty(), ErrorCode::Data, "no values to score");
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  require(pred.size() == truth.size(), ErrorCode::Dimension,
          "prediction and truth lengths differ");
  require(!pred.empty(), ErrorCode::Data, "no values to score");
  double sum_abs = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum_abs += std::abs(pred[i] - truth[i]);
  }
  return sum_abs / static_cast<double>(pred.size());
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::Data, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace pmfrec

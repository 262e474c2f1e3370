#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pmfrec {

Vector simplex_project(const Vector& v) {
  require(v.size() > 0, ErrorCode::Dimension, "simplex_project: empty vector");
  require(v.allFinite(), ErrorCode::Numeric,
          "simplex_project: non-finite entries");

  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());

  // Largest k with u_k + (1 - sum_{j<=k} u_j)/k > 0; prefix sums in long
  // double so the shift stays accurate for long vectors.
  long double cumulative = 0.0L;
  long double shift = 0.0L;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    long double candidate = (1.0L - cumulative) / static_cast<long double>(k + 1);
    if (u[k] + candidate > 0.0L) shift = candidate;
  }

  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[i] = std::max(0.0, static_cast<double>(v[i] + shift));
  return out;
}

void simplex_project_columns_inplace(Matrix& m) {
  for (Eigen::Index f = 0; f < m.cols(); ++f)
    m.col(f) = simplex_project(m.col(f));
}

Matrix simplex_project_columns(const Matrix& m) {
  Matrix out = m;
  simplex_project_columns_inplace(out);
  return out;
}

}  // namespace pmfrec

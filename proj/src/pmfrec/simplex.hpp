#pragma once

#include "common.hpp"

namespace pmfrec {

// Euclidean projection onto { x >= 0, sum(x) = 1 } by the sort-based
// O(n log n) scheme: find the largest support whose shifted entries stay
// positive, then clip. The projection is unique, so no tie-breaking.
Vector simplex_project(const Vector& v);

// Applies simplex_project to every column.
void simplex_project_columns_inplace(Matrix& m);
Matrix simplex_project_columns(const Matrix& m);

}  // namespace pmfrec

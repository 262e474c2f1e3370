#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace pmfrec {

// Category codes are 1-based; 0 marks a missing entry.
inline constexpr int kMissing = 0;

struct TableCell {
  int row;
  int var;
};

// M x N table of categorical codes with per-variable cardinalities.
class RatingsDataset {
public:
  RatingsDataset() = default;
  RatingsDataset(std::vector<int> cardinalities, int num_rows,
                 std::vector<std::string> names = {});

  int num_vars() const { return static_cast<int>(cards_.size()); }
  int num_rows() const { return rows_; }
  const std::vector<int>& cardinalities() const { return cards_; }
  const std::vector<std::string>& names() const { return names_; }

  int code(int row, int var) const { return codes_[idx(row, var)]; }
  void set_code(int row, int var, int value) { codes_[idx(row, var)] = value; }
  bool observed(int row, int var) const { return code(row, var) != kMissing; }

  std::int64_t observed_count() const;

  // Checks M >= 1 and that every non-missing code is within its cardinality.
  void validate() const;

private:
  std::int64_t idx(int row, int var) const {
    return static_cast<std::int64_t>(row) * cards_.size() + var;
  }

  std::vector<int> cards_;
  std::vector<std::string> names_;
  int rows_ = 0;
  std::vector<int> codes_;
};

// Delimiter-separated text, one sample per row, header row with variable
// names. Empty fields or "NA" are missing. Cardinalities come from
// `cards_override`, else from a "<path>.meta.json" sidecar, else are
// inferred as the maximum observed code per variable.
RatingsDataset load_ratings(const std::string& path,
                            const std::vector<int>& cards_override = {});

void save_ratings(const RatingsDataset& data, const std::string& path,
                  char delimiter = ',');

// Prediction queries use the same format with "?" marking target cells.
struct QueryTable {
  RatingsDataset data;  // targets stored as missing
  std::vector<TableCell> targets;
};

QueryTable load_query(const std::string& path,
                      const std::vector<int>& cards_override = {});

}  // namespace pmfrec

#pragma once

#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "dataset.hpp"
#include "model.hpp"

namespace pmfrec {

// Observed variables for one query: variable index -> code in {1..I_n}.
struct Evidence {
  std::map<int, int> assignments;
};

// Maps codes {1..I} to real values, either affinely (value = scale*code +
// offset) or through an explicit list indexed by code-1.
class ValueMap {
public:
  static ValueMap affine(double scale, double offset);
  static ValueMap from_values(std::vector<double> values);
  static ValueMap identity() { return affine(1.0, 0.0); }

  // Throws when an explicit list does not cover `cardinality` codes.
  void require_covers(int cardinality) const;
  double operator()(int code) const;

private:
  ValueMap() = default;
  bool affine_ = true;
  double scale_ = 1.0;
  double offset_ = 0.0;
  std::vector<double> values_;
};

struct PosteriorResult {
  Vector weights;
  // Set when the evidence had zero likelihood under the model; `weights`
  // then falls back to the prior so callers stay total.
  bool zero_evidence = false;
};

// w(f) proportional to lambda(f) * prod_over_evidence A_o(x_o, f),
// normalized to sum 1.
PosteriorResult posterior_mixture(const CpdModel& model,
                                  const Evidence& evidence);

struct ConditionalResult {
  Vector pmf;
  bool zero_evidence = false;
};

// P(X_target | evidence) = A_target * posterior weights; falls back to the
// prior marginal A_target * lambda under zero evidence.
ConditionalResult conditional_pmf(const CpdModel& model,
                                  const Evidence& evidence, int target);

double conditional_expectation(const CpdModel& model, const Evidence& evidence,
                               int target, const ValueMap& values,
                               bool* zero_evidence = nullptr);

// Argmax of the conditional PMF; ties break toward the smallest code.
int map_estimate(const CpdModel& model, const Evidence& evidence, int target,
                 bool* zero_evidence = nullptr);

struct Prediction {
  int row = 0;  // 0-based data row
  int var = 0;
  double expectation = 0.0;
  int map_code = 0;
  bool zero_evidence = false;
};

// One prediction per target cell, conditioning on every observed variable
// of the cell's row.
std::vector<Prediction> predict_table(const CpdModel& model,
                                      const QueryTable& query,
                                      const ValueMap& values);

void save_predictions(const std::vector<Prediction>& predictions,
                      const std::vector<std::string>& var_names,
                      const std::string& path);

}  // namespace pmfrec

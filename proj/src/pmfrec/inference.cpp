#include "inference.hpp"

#include <cmath>
#include <sstream>

#include "io_detail.hpp"

namespace pmfrec {

ValueMap ValueMap::affine(double scale, double offset) {
  require(std::isfinite(scale) && std::isfinite(offset), ErrorCode::Numeric,
          "value map parameters must be finite");
  ValueMap vm;
  vm.affine_ = true;
  vm.scale_ = scale;
  vm.offset_ = offset;
  return vm;
}

ValueMap ValueMap::from_values(std::vector<double> values) {
  require(!values.empty(), ErrorCode::Data, "value map needs at least one value");
  for (double v : values) {
    require(std::isfinite(v), ErrorCode::Numeric,
            "value map entries must be finite");
  }
  ValueMap vm;
  vm.affine_ = false;
  vm.values_ = std::move(values);
  return vm;
}

void ValueMap::require_covers(int cardinality) const {
  if (!affine_) {
    require(static_cast<int>(values_.size()) >= cardinality, ErrorCode::Data,
            "value map covers " + std::to_string(values_.size()) +
                " codes but the variable has " + std::to_string(cardinality));
  }
}

double ValueMap::operator()(int code) const {
  if (affine_) return scale_ * code + offset_;
  require(code >= 1 && code <= static_cast<int>(values_.size()),
          ErrorCode::Data, "code outside the value map");
  return values_[code - 1];
}

namespace {

void check_evidence(const CpdModel& model, const Evidence& evidence) {
  for (const auto& [var, code] : evidence.assignments) {
    require(var >= 0 && var < model.num_vars(), ErrorCode::Dimension,
            "evidence variable out of range");
    require(code >= 1 && code <= model.factor(var).rows(), ErrorCode::Data,
            "evidence code out of range for variable v" + std::to_string(var + 1));
  }
}

}  // namespace

PosteriorResult posterior_mixture(const CpdModel& model,
                                  const Evidence& evidence) {
  check_evidence(model, evidence);
  PosteriorResult result;
  result.weights = model.weights();
  for (const auto& [var, code] : evidence.assignments) {
    result.weights =
        result.weights.cwiseProduct(model.factor(var).row(code - 1).transpose());
  }
  const double mass = result.weights.sum();
  require(std::isfinite(mass), ErrorCode::Numeric,
          "non-finite posterior mass");
  if (mass <= 0.0) {
    result.zero_evidence = true;
    result.weights = model.weights();
    return result;
  }
  result.weights /= mass;
  return result;
}

ConditionalResult conditional_pmf(const CpdModel& model,
                                  const Evidence& evidence, int target) {
  require(target >= 0 && target < model.num_vars(), ErrorCode::Dimension,
          "target variable out of range");
  require(!evidence.assignments.count(target), ErrorCode::Data,
          "evidence must not include the target variable");
  PosteriorResult posterior = posterior_mixture(model, evidence);
  ConditionalResult result;
  result.zero_evidence = posterior.zero_evidence;
  result.pmf = model.factor(target) * posterior.weights;
  return result;
}

double conditional_expectation(const CpdModel& model, const Evidence& evidence,
                               int target, const ValueMap& values,
                               bool* zero_evidence) {
  ConditionalResult cond = conditional_pmf(model, evidence, target);
  values.require_covers(static_cast<int>(cond.pmf.size()));
  if (zero_evidence) *zero_evidence = cond.zero_evidence;
  double expectation = 0.0;
  for (int code = 1; code <= cond.pmf.size(); ++code) {
    expectation += values(code) * cond.pmf[code - 1];
  }
  return expectation;
}

int map_estimate(const CpdModel& model, const Evidence& evidence, int target,
                 bool* zero_evidence) {
  ConditionalResult cond = conditional_pmf(model, evidence, target);
  if (zero_evidence) *zero_evidence = cond.zero_evidence;
  int best = 1;
  for (int code = 2; code <= cond.pmf.size(); ++code) {
    if (cond.pmf[code - 1] > cond.pmf[best - 1]) best = code;
  }
  return best;
}

std::vector<Prediction> predict_table(const CpdModel& model,
                                      const QueryTable& query,
                                      const ValueMap& values) {
  const RatingsDataset& data = query.data;
  require(data.cardinalities() == model.cardinalities(), ErrorCode::Dimension,
          "query table cardinalities do not match the model");
  std::vector<Prediction> out;
  out.reserve(query.targets.size());
  for (const TableCell& cell : query.targets) {
    Evidence evidence;
    for (int n = 0; n < data.num_vars(); ++n) {
      if (n != cell.var && data.observed(cell.row, n)) {
        evidence.assignments[n] = data.code(cell.row, n);
      }
    }
    const ConditionalResult cond = conditional_pmf(model, evidence, cell.var);
    values.require_covers(static_cast<int>(cond.pmf.size()));
    Prediction p;
    p.row = cell.row;
    p.var = cell.var;
    p.zero_evidence = cond.zero_evidence;
    for (int code = 1; code <= cond.pmf.size(); ++code) {
      p.expectation += values(code) * cond.pmf[code - 1];
    }
    p.map_code = 1;
    for (int code = 2; code <= cond.pmf.size(); ++code) {
      if (cond.pmf[code - 1] > cond.pmf[p.map_code - 1]) p.map_code = code;
    }
    out.push_back(p);
  }
  return out;
}

void save_predictions(const std::vector<Prediction>& predictions,
                      const std::vector<std::string>& var_names,
                      const std::string& path) {
  std::ostringstream os;
  os << "row,variable,expectation,map_code,zero_evidence\n";
  for (const Prediction& p : predictions) {
    require(p.var >= 0 && p.var < static_cast<int>(var_names.size()),
            ErrorCode::Dimension, "prediction variable out of range");
    os << (p.row + 1) << ',' << var_names[p.var] << ','
       << detail::format_double(p.expectation) << ',' << p.map_code << ','
       << (p.zero_evidence ? 1 : 0) << '\n';
  }
  detail::write_file(path, os.str());
}

}  // namespace pmfrec

#include "marginals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "io_detail.hpp"

namespace pmfrec {

namespace {

std::string tuple_name(const std::vector<int>& tuple) {
  std::ostringstream ss;
  ss << '(';
  for (std::size_t k = 0; k < tuple.size(); ++k)
    ss << (k ? "," : "") << tuple[k] + 1;
  ss << ')';
  return ss.str();
}

}  // namespace

std::vector<std::vector<int>> all_tuples(int n, int m) {
  require(m >= 1 && m <= n, ErrorCode::Dimension,
          "tuple order must satisfy 1 <= m <= number of variables");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(m);
  for (int k = 0; k < m; ++k) cur[k] = k;
  while (true) {
    out.push_back(cur);
    int k = m - 1;
    while (k >= 0 && cur[k] == n - m + k) --k;
    if (k < 0) break;
    ++cur[k];
    for (int j = k + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

MarginalSet::MarginalSet(int order, std::vector<int> cardinalities)
    : order_(order), cards_(std::move(cardinalities)) {
  require(order_ >= 1, ErrorCode::Dimension, "marginal order must be >= 1");
  require(order_ <= static_cast<int>(cards_.size()), ErrorCode::Dimension,
          "marginal order exceeds number of variables");
  for (int c : cards_)
    require(c >= 1, ErrorCode::Dimension, "cardinalities must be >= 1");
}

bool MarginalSet::complete() const {
  // C(N, m) distinct keys; insert() already enforces validity/uniqueness.
  std::uint64_t expect = 1;
  for (int k = 0; k < order_; ++k)
    expect = expect * static_cast<std::uint64_t>(num_vars() - k) /
             static_cast<std::uint64_t>(k + 1);
  return entries_.size() == expect;
}

void MarginalSet::insert(std::vector<int> tuple, DenseTensor tensor,
                         std::int64_t support, bool require_prob) {
  require(static_cast<int>(tuple.size()) == order_, ErrorCode::Dimension,
          "tuple size does not match marginal order");
  require(tensor.order() == order_, ErrorCode::Dimension,
          "tensor order does not match marginal order");
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    require(tuple[k] >= 0 && tuple[k] < num_vars(), ErrorCode::Dimension,
            "tuple variable out of range");
    require(k == 0 || tuple[k] > tuple[k - 1], ErrorCode::Dimension,
            "tuple must be strictly increasing");
    require(tensor.shape()[k] == cards_[tuple[k]], ErrorCode::Dimension,
            "tensor shape does not match tuple cardinalities");
  }
  require(tensor.vec().allFinite(), ErrorCode::Numeric,
          "marginal tensor " + tuple_name(tuple) + " has non-finite entries");
  if (require_prob) tensor.require_probability(1e-9);
  require(entries_.find(tuple) == entries_.end(), ErrorCode::Data,
          "duplicate tuple " + tuple_name(tuple));
  entries_.emplace(std::move(tuple), Entry{std::move(tensor), support});
}

bool MarginalSet::contains(const std::vector<int>& tuple) const {
  return entries_.find(tuple) != entries_.end();
}

const DenseTensor& MarginalSet::at(const std::vector<int>& tuple) const {
  auto it = entries_.find(tuple);
  require(it != entries_.end(), ErrorCode::Data,
          "marginal tuple " + tuple_name(tuple) + " is missing");
  return it->second.tensor;
}

std::int64_t MarginalSet::support(const std::vector<int>& tuple) const {
  auto it = entries_.find(tuple);
  require(it != entries_.end(), ErrorCode::Data,
          "marginal tuple " + tuple_name(tuple) + " is missing");
  return it->second.support;
}

std::vector<std::vector<int>> MarginalSet::tuples_containing(int var) const {
  std::vector<std::vector<int>> out;
  for (const auto& [tuple, entry] : entries_)
    if (std::find(tuple.begin(), tuple.end(), var) != tuple.end())
      out.push_back(tuple);
  return out;
}

void MarginalSet::save(const std::string& path) const {
  std::ostringstream out;
  out << "pmfrec-marginals 1\n";
  out << "vars " << num_vars() << "\n";
  out << "order " << order_ << "\n";
  out << "cards";
  for (int c : cards_) out << ' ' << c;
  out << "\n";
  out << "tuples " << entries_.size() << "\n";
  for (const auto& [tuple, entry] : entries_) {
    out << "tuple";
    for (int v : tuple) out << ' ' << (v + 1);
    out << "\n";
    out << "support " << entry.support << "\n";
    out << "values " << entry.tensor.size() << "\n";
    detail::append_values(out, entry.tensor.vec().data(), entry.tensor.size());
  }
  detail::write_file(path, out.str());
}

MarginalSet MarginalSet::load(const std::string& path) {
  detail::TokenReader in(detail::read_file(path), path);
  in.expect("pmfrec-marginals");
  if (in.next_int() != 1) in.fail("unsupported marginals format version");
  in.expect("vars");
  long long nvars = in.next_int();
  if (nvars < 1) in.fail("vars must be >= 1");
  in.expect("order");
  long long order = in.next_int();
  in.expect("cards");
  std::vector<int> cards(nvars);
  for (auto& c : cards) c = static_cast<int>(in.next_int());
  MarginalSet set(static_cast<int>(order), cards);
  in.expect("tuples");
  long long count = in.next_int();
  for (long long t = 0; t < count; ++t) {
    in.expect("tuple");
    std::vector<int> tuple(order);
    for (auto& v : tuple) v = static_cast<int>(in.next_int()) - 1;
    in.expect("support");
    long long support = in.next_int();
    in.expect("values");
    long long nvals = in.next_int();
    std::vector<int> shape;
    for (int v : tuple) {
      if (v < 0 || v >= nvars) in.fail("tuple variable out of range");
      shape.push_back(cards[v]);
    }
    DenseTensor tensor(shape);
    if (nvals != tensor.size()) in.fail("value count does not match tuple shape");
    for (long long i = 0; i < nvals; ++i) tensor.vec()[i] = in.next_double();
    // Degenerate tensors are legal solver inputs, so no probability check.
    set.insert(std::move(tuple), std::move(tensor), support, false);
  }
  if (!in.at_end()) in.fail("trailing content after the last tuple");
  return set;
}

MarginalSet estimate_marginals(const RatingsDataset& data, int order,
                               double alpha) {
  data.validate();
  require(order >= 1 && order <= data.num_vars(), ErrorCode::Dimension,
          "marginal order must satisfy 1 <= m <= number of variables");
  require(std::isfinite(alpha) && alpha >= 0.0, ErrorCode::Dimension,
          "smoothing alpha must be finite and >= 0");
  MarginalSet set(order, data.cardinalities());
  std::vector<int> idx(order);
  for (const auto& tuple : all_tuples(data.num_vars(), order)) {
    std::vector<int> shape;
    for (int v : tuple) shape.push_back(data.cardinalities()[v]);
    DenseTensor counts(shape);
    std::int64_t support = 0;
    for (int r = 0; r < data.num_rows(); ++r) {
      bool all_seen = true;
      for (int k = 0; k < order; ++k) {
        int c = data.code(r, tuple[k]);
        if (c == kMissing) {
          all_seen = false;
          break;
        }
        idx[k] = c - 1;
      }
      if (!all_seen) continue;
      counts(idx) += 1.0;
      ++support;
    }
    require(support > 0 || alpha > 0.0, ErrorCode::Data,
            "no co-observed samples for tuple " + tuple_name(tuple) +
                " and smoothing is 0");
    double total = static_cast<double>(support) +
                   alpha * static_cast<double>(counts.size());
    counts.vec() = (counts.vec().array() + alpha) / total;
    set.insert(tuple, std::move(counts), support);
  }
  return set;
}

MarginalSet marginals_from_model(const CpdModel& model, int order) {
  require(order >= 1 && order <= model.num_vars(), ErrorCode::Dimension,
          "marginal order exceeds number of variables");
  MarginalSet set(order, model.cardinalities());
  for (const auto& tuple : all_tuples(model.num_vars(), order))
    set.insert(tuple, model.reconstruct(tuple), 0);
  return set;
}

double marginal_residual(const CpdModel& model, const MarginalSet& marginals) {
  if (marginals.empty()) return 0.0;
  require(model.cardinalities() == marginals.cardinalities(),
          ErrorCode::Dimension,
          "model and marginal cardinalities do not match");
  double obj = 0.0;
  for (const auto& [tuple, entry] : marginals.entries()) {
    DenseTensor recon = model.reconstruct(tuple);
    obj += 0.5 * (entry.tensor.vec() - recon.vec()).squaredNorm();
  }
  return obj;
}

}  // namespace pmfrec

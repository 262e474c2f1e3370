#include "dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "io_detail.hpp"

namespace pmfrec {

RatingsDataset::RatingsDataset(std::vector<int> cardinalities, int num_rows,
                               std::vector<std::string> names)
    : cards_(std::move(cardinalities)), names_(std::move(names)), rows_(num_rows) {
  require(!cards_.empty(), ErrorCode::Dimension, "dataset needs >= 1 variable");
  for (int c : cards_)
    require(c >= 1, ErrorCode::Dimension, "cardinalities must be >= 1");
  if (names_.empty())
    for (std::size_t n = 0; n < cards_.size(); ++n)
      names_.push_back("v" + std::to_string(n + 1));
  require(names_.size() == cards_.size(), ErrorCode::Dimension,
          "name count does not match variable count");
  codes_.assign(static_cast<std::size_t>(rows_) * cards_.size(), kMissing);
}

std::int64_t RatingsDataset::observed_count() const {
  return static_cast<std::int64_t>(
      std::count_if(codes_.begin(), codes_.end(),
                    [](int c) { return c != kMissing; }));
}

void RatingsDataset::validate() const {
  require(rows_ >= 1, ErrorCode::Data, "dataset has no rows");
  for (int r = 0; r < rows_; ++r)
    for (int n = 0; n < num_vars(); ++n) {
      int c = code(r, n);
      require(c >= 0 && c <= cards_[n], ErrorCode::Data,
              "row " + std::to_string(r + 1) + ", variable " +
                  std::to_string(n + 1) + ": code " + std::to_string(c) +
                  " exceeds cardinality " + std::to_string(cards_[n]));
    }
}

namespace {

char detect_delimiter(const std::string& header) {
  if (header.find('\t') != std::string::npos) return '\t';
  if (header.find(',') != std::string::npos) return ',';
  return ' ';
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  if (delim == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    return fields;
  }
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct ParsedTable {
  std::vector<std::string> names;
  std::vector<std::vector<int>> rows;  // kMissing = missing, -1 = target
  std::vector<TableCell> targets;
};

ParsedTable parse_table(const std::string& path, bool allow_targets) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open file: " + path);
  std::string line;
  int line_no = 0;
  auto fail = [&](int column, const std::string& msg) -> void {
    throw Error(ErrorCode::Data, path + ":" + std::to_string(line_no) +
                                     ", column " + std::to_string(column) +
                                     ": " + msg);
  };

  ParsedTable table;
  char delim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    if (table.names.empty()) {
      delim = detect_delimiter(line);
      for (const std::string& f : split_fields(line, delim))
        table.names.push_back(trimmed(f));
      require(!table.names.empty(), ErrorCode::Data, path + ": empty header row");
      continue;
    }
    std::vector<std::string> fields = split_fields(line, delim);
    if (fields.size() != table.names.size())
      fail(1, "expected " + std::to_string(table.names.size()) +
                  " fields, got " + std::to_string(fields.size()));
    std::vector<int> row(fields.size(), kMissing);
    for (std::size_t n = 0; n < fields.size(); ++n) {
      std::string f = trimmed(fields[n]);
      if (f.empty() || f == "NA") continue;
      if (f == "?") {
        if (!allow_targets)
          fail(static_cast<int>(n + 1), "'?' target marker not allowed here");
        row[n] = -1;
        table.targets.push_back(
            {static_cast<int>(table.rows.size()), static_cast<int>(n)});
        continue;
      }
      char* end = nullptr;
      long v = std::strtol(f.c_str(), &end, 10);
      if (end == f.c_str() || *end != '\0' || v < 1)
        fail(static_cast<int>(n + 1),
             "expected positive integer code, 'NA', or empty, got '" + f + "'");
      row[n] = static_cast<int>(v);
    }
    table.rows.push_back(std::move(row));
  }
  require(!table.names.empty(), ErrorCode::Data, path + ": empty file");
  require(!table.rows.empty(), ErrorCode::Data, path + ": no data rows");
  return table;
}

std::vector<int> sidecar_cards(const std::string& path, std::size_t nvars) {
  std::string meta_path = path + ".meta.json";
  if (!std::filesystem::exists(meta_path)) return {};
  std::ifstream in(meta_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Data, meta_path + ": invalid JSON: " + e.what());
  }
  require(j.contains("cardinalities"), ErrorCode::Data,
          meta_path + ": missing \"cardinalities\"");
  std::vector<int> cards = j["cardinalities"].get<std::vector<int>>();
  require(cards.size() == nvars, ErrorCode::Data,
          meta_path + ": cardinality count does not match column count");
  return cards;
}

RatingsDataset build_dataset(const std::string& path, const ParsedTable& table,
                             const std::vector<int>& cards_override) {
  std::vector<int> cards = cards_override;
  if (cards.empty()) cards = sidecar_cards(path, table.names.size());
  if (cards.empty()) {
    cards.assign(table.names.size(), 0);
    for (const auto& row : table.rows)
      for (std::size_t n = 0; n < row.size(); ++n)
        if (row[n] > cards[n]) cards[n] = row[n];
    for (std::size_t n = 0; n < cards.size(); ++n)
      require(cards[n] >= 1, ErrorCode::Data,
              path + ": variable '" + table.names[n] +
                  "' has no observed codes; supply cardinalities via sidecar");
  }
  require(cards.size() == table.names.size(), ErrorCode::Dimension,
          "cardinality count does not match column count");
  RatingsDataset data(cards, static_cast<int>(table.rows.size()), table.names);
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t n = 0; n < cards.size(); ++n)
      if (table.rows[r][n] > 0) data.set_code(static_cast<int>(r),
                                              static_cast<int>(n),
                                              table.rows[r][n]);
  data.validate();
  return data;
}

}  // namespace

RatingsDataset load_ratings(const std::string& path,
                            const std::vector<int>& cards_override) {
  return build_dataset(path, parse_table(path, false), cards_override);
}

void save_ratings(const RatingsDataset& data, const std::string& path,
                  char delimiter) {
  std::ostringstream out;
  for (int n = 0; n < data.num_vars(); ++n)
    out << (n ? std::string(1, delimiter) : "") << data.names()[n];
  out << '\n';
  for (int r = 0; r < data.num_rows(); ++r) {
    for (int n = 0; n < data.num_vars(); ++n) {
      if (n) out << delimiter;
      if (data.observed(r, n)) out << data.code(r, n);
    }
    out << '\n';
  }
  detail::write_file(path, out.str());
}

QueryTable load_query(const std::string& path,
                      const std::vector<int>& cards_override) {
  ParsedTable table = parse_table(path, true);
  for (auto& row : table.rows)
    for (int& c : row)
      if (c == -1) c = kMissing;  // dataset stores targets as missing
  QueryTable q;
  q.data = build_dataset(path, table, cards_override);
  q.targets = std::move(table.targets);
  return q;
}

}  // namespace pmfrec

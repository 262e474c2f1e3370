#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "common.hpp"

namespace pmfrec::detail {

// 17 significant digits round-trips IEEE doubles exactly through text.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write file: " + path);
  out << content;
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path);
}

// Whitespace-token scanner with line tracking for parse diagnostics.
class TokenReader {
public:
  TokenReader(std::string text, std::string path)
      : text_(std::move(text)), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Data, path_ + ":" + std::to_string(line_) + ": " + msg);
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string next() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of file");
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(const std::string& keyword) {
    std::string tok = next();
    if (tok != keyword) fail("expected '" + keyword + "', got '" + tok + "'");
  }

  long long next_int() {
    std::string tok = next();
    char* end = nullptr;
    long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') fail("expected integer, got '" + tok + "'");
    return v;
  }

  double next_double() {
    std::string tok = next();
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail("expected number, got '" + tok + "'");
    return v;
  }

  int line() const { return line_; }

private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string text_;
  std::string path_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

inline void append_values(std::ostringstream& out, const double* p, std::int64_t n,
                          int per_line = 6) {
  for (std::int64_t i = 0; i < n; ++i) {
    out << format_double(p[i]);
    out << (((i + 1) % per_line == 0 || i + 1 == n) ? '\n' : ' ');
  }
}

}  // namespace pmfrec::detail

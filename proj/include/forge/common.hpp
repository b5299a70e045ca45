#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace forge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

// Data-level failures (bad files, invalid instances, shape mismatches).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Parse failures carry the 1-based line number of the offending input line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, int line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Numeric failures (NaN/Inf in tensors, diverged training).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Non-fatal conditions (empty pools, skipped labels) go through here so
// callers and tests can capture them.
inline std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> handler =
      [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
  return handler;
}

inline void warn(const std::string& msg) { warning_handler()(msg); }

}  // namespace forge

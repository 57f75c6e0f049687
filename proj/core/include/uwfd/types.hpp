#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwfd {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;
using Bits = std::vector<std::uint8_t>;

/// Thrown when a caller violates an operation's documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration problem; carries the offending field and, for parse
/// errors, the 1-based line number (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string message, int line = 0)
      : std::runtime_error(format(field, message, line)),
        field_(std::move(field)),
        message_(std::move(message)),
        line_(line) {}

  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message, int line) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + message;
  }

  std::string field_;
  std::string message_;
  int line_ = 0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace uwfd

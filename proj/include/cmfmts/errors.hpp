#pragma once

#include <stdexcept>
#include <string>

namespace cmfmts {

/// Raised for malformed input files and bad arguments. Maps to exit code 2.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised for malformed `.ts` / CSV content; carries a 1-based line number
/// when one is known (0 otherwise).
class parse_error : public input_error {
public:
  parse_error(const std::string& msg, std::size_t line = 0)
      : input_error(line ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Raised when a computation cannot proceed (degenerate model, column
/// mismatch, ...). Maps to exit code 1.
class compute_error : public std::runtime_error {
public:
  explicit compute_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cmfmts

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mzi {

/// Raised when a processor sees state that violates its own invariants
/// (non-unit registers, u off the simplex).
class model_integrity_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or inconsistent input: bad config values, unparsable files,
/// rank-deficient fits.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class parse_error : public input_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : input_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mzi

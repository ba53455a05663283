#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace l1sketch {

// Thrown when a paper-mode constant exceeds the representable range and the
// caller has to switch to calibrated parameters.
class overflow_error : public std::runtime_error {
 public:
  explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

class dimension_error : public std::invalid_argument {
 public:
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input file; carries the 1-based line number of the offending line.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace l1sketch

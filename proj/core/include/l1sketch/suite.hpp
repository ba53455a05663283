#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace l1sketch::suite {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic given the seed
};

struct Criterion {
  std::string name;
  CriterionResult (*run)(std::uint64_t seed);
};

// The acceptance checks, in canonical order.
const std::vector<Criterion>& criteria();

// Runs the named criterion (all of them when `only` is empty). Unknown names
// throw std::invalid_argument.
std::vector<CriterionResult> run_suite(std::uint64_t seed, const std::string& only = "");

// Canonical fixed-order report used for byte-identity checks.
std::string format_report(const std::vector<CriterionResult>& results,
                          std::uint64_t seed);

}  // namespace l1sketch::suite

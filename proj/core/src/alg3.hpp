#pragma once

// Magnitude-level recovery shared by the scalar l1 estimator and the
// recursive tensor decoder. Callers precompute, per subsampling level, the
// recovered item estimates; this file owns the banding logic.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "l1sketch/l1_estimator.hpp"

namespace l1sketch::detail {

// Per subsampling level: item estimates sorted ascending with prefix sums
// (prefix[k] = sum of the first k values).
struct LevelTable {
  std::vector<std::vector<double>> vals;
  std::vector<std::vector<double>> prefix;

  void finalize();  // sorts and builds prefixes
};

struct Alg3Opts {
  double eps = 0.2;
  std::size_t N = 1;
  double c_top = 4.0;
  bool shrink = false;  // paper cores [(1+eps)T_j,(2-eps)T_j] instead of (T_j,2T_j]
};

double algorithm3(const LevelTable& table, const Alg3Opts& opt, double M_hat,
                  std::size_t K, double zeta_uniform, ShhEstimateTrace* trace);

}  // namespace l1sketch::detail

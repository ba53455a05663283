#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l1sketch/heavy_hitter.hpp"
#include "l1sketch/rng.hpp"

namespace l1sketch {

// Pairwise-independent subsampling map [N] -> {0..L_hat}: a random affine map
// over the prime field 2^61-1 feeds a trailing-zero count, so that
// Pr(level >= l) = 2^-l and level membership is nested.
struct LevelHash {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  std::uint32_t L_hat = 0;

  std::uint32_t level_of(std::uint64_t i) const;
};

LevelHash build_level_hash(Rng& rng, std::uint32_t L_hat);

struct ShhParams {
  double eps = 0.2;
  std::size_t K = 4;     // power of 2, >= 2
  std::size_t N = 1024;  // coordinate count
  double zeta = 0.05;    // base-sketch failure budget

  // Paper constants exposed as knobs.
  double alpha = 0.5;        // the absolute constant alpha < 1
  double c_theta = 1.0 / 180.0;  // theta = min{c_theta eps^3 / (C_f L^3), ...}
  double c_B = 8.0;          // Rademacher constant
  double c_top = 4.0;        // top-HH extraction and j0 multiplier
  double c_R = 1.0;          // HH repetition multiplier
  double c_Q = 1.0;          // bookkeeping constant in Q

  // Desk-scale overrides (0 = use the formula).
  double theta_override = 0;
  std::size_t B_override = 0;
  std::size_t R_override = 0;
  std::size_t B_cap = std::size_t{1} << 22;

  // Magnitude windows. The analysis carves the dyadic band (T_j, 2T_j] down
  // to the safe core [(1+eps)T_j, (2-eps)T_j]; counting only the core drops
  // a Theta(eps) fraction of mass outright, so estimation uses the full
  // tiling by default and the shrunken core stays available for the
  // boundary-effect tests.
  bool shrink_windows = false;

  std::size_t payload_len = 0;  // >0: per-bucket vectors for the tensor tower
};

struct ShhDerived {
  std::size_t L = 0;      // magnitude levels log2(K N / eps)
  std::size_t L_hat = 0;  // subsampling levels log2 N
  double theta = 0;
  std::size_t B = 0;  // buckets per HeavyHitter repetition
  std::size_t R = 0;  // HeavyHitter repetitions
  std::size_t Q = 0;  // total bucket count (bookkeeping)
  std::size_t top_count = 0;  // heavy hitters extracted per level
};

// Algorithm state: one shared subsampling map and L_hat+1 HeavyHitter
// structures, every accumulator linear in the updates.
struct ShhState {
  ShhParams params;
  ShhDerived derived;
  LevelHash H;
  std::vector<HeavyHitterState> D;  // levels 0..L_hat

  std::size_t accumulator_count() const;
};

ShhState shh_build(Rng rng, const ShhParams& params);

// Routes (i, delta) into D_l for every l <= level_of(i).
void shh_update(ShhState& st, std::uint64_t i, double delta);
void shh_update(ShhState& st, std::uint64_t i, std::span<const double> delta_vec);

struct LevelEstimate {
  std::size_t j = 0;
  double M_j = 0;
  int ell_used = -1;  // subsampling level for deep bands, -1 = none/top band
  std::size_t survivors = 0;
};

struct ShhEstimateTrace {
  double zeta_draw = 0;
  std::size_t j0 = 0;
  std::vector<LevelEstimate> levels;
};

// Magnitude-level recovery: draws the boundary zeta ~ U[1/2,1], extracts the
// top heavy hitters per subsampling level, sums recovered values over bands
// j <= j0 and switches to survivor-count calibrated bands (scaled by 2^l)
// for j > j0. Requires M_hat > 0.
double shh_estimate(const ShhState& st, double M_hat, std::size_t K, Rng zeta_rng,
                    const BucketEstimator& est = nullptr,
                    ShhEstimateTrace* trace = nullptr);

// Median over independent repetitions per grid value K' in {2,4,...,K_max},
// maximum across the grid.
double shh_estimate_boosted(std::span<const ShhState> states, double M_hat,
                            std::size_t K_max, Rng zeta_rng,
                            const BucketEstimator& est = nullptr);

// Desk-scale rough approximator: dense Cauchy median sketch with lazily
// materialized rows; M_hat = 2 * median |rows| lands in [||x||_1, 3||x||_1]
// w.h.p., so the effective K is 4.
struct CauchyMedianSketch {
  std::size_t t = 0;
  std::uint64_t key = 0;
  std::vector<double> acc;

  void update(std::uint64_t coord, double delta);
  double estimate() const;  // median of |accumulators|
  double m_hat() const { return 2.0 * estimate(); }
};

CauchyMedianSketch rough_build(Rng rng, std::size_t t = 44);
double rough_estimate(Rng rng, std::span<const double> x, std::size_t t = 44);

}  // namespace l1sketch

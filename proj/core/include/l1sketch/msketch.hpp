#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l1sketch/countsketch.hpp"
#include "l1sketch/matrix.hpp"
#include "l1sketch/rng.hpp"

namespace l1sketch {

enum class ScaleMode { paper, calibrated };

// Rate shift: the subspace embedding draws u ~ U[0,1] (random boundaries);
// the entrywise embedding pins u = 1, giving the fixed rates B^{-h}.
enum class RateShift { random_u, fixed_u1 };

struct MSketchConfig {
  std::size_t n = 0;
  std::size_t d = 0;
  double eps = 0.5;
  double delta = 0.5;

  std::size_t h_max = 0;  // sampling levels
  std::size_t q_max = 0;  // weight classes (bookkeeping only)
  double alpha_net = 0;   // net union-bound term
  double m_crowd = 0;     // overcrowding threshold
  double B = 0;           // branching factor
  double log2_B = 0;      // kept finite even when B overflows
  std::size_t N0 = 0;     // hash buckets in the 0th level
  std::size_t N = 0;      // hash buckets per sampling level

  ScaleMode mode = ScaleMode::calibrated;
  RateShift shift = RateShift::random_u;

  std::size_t output_dim() const { return N0 + h_max * N; }
};

// All constants of the paper-mode configuration, computed from (n, d, eps,
// delta) with logs base 2 and counts rounded up. Throws overflow_error when
// the branching factor exceeds the double range (it does for any realistic
// d/eps/delta); callers then switch to a calibrated config.
MSketchConfig derive_constants(std::size_t n, std::size_t d, double eps, double delta);

// Calibrated configuration: structure per the definition, sizes chosen by the
// caller so the sketch can actually be built and measured.
MSketchConfig calibrated_config(std::size_t n, std::size_t d, double eps, double delta,
                                double B, std::size_t N0, std::size_t N,
                                std::size_t h_max);

// p_h = B^{-(u+h-1)} for h = 1..h_max.
std::vector<double> sample_rates(double u, double B, std::size_t h_max);

// Random-boundary M-sketch: a 0th-level CountSketch over all n coordinates
// stacked with, per level h, a CountSketch over the survivors of independent
// rate-p_h subsampling, each survivor rescaled by 1/p_h. Signs are shared
// across all levels; each level hashes original coordinate ids.
struct MSketchOp {
  MSketchConfig cfg;
  double u = 0;

  std::vector<std::int8_t> sign_of;        // [n], shared across levels
  std::vector<std::uint32_t> bucket0_of;   // [n] -> [N0]

  struct Level {
    double p = 1.0;
    std::vector<std::uint32_t> survivors;  // original coordinate ids
    std::vector<std::uint32_t> bucket_of;  // aligned with survivors, -> [N]
  };
  std::vector<Level> levels;  // h = 1..h_max

  std::size_t output_dim() const { return cfg.N0 + levels.size() * cfg.N; }
};

MSketchOp build_msketch(Rng rng, const MSketchConfig& cfg);

void apply_msketch(const MSketchOp& op, std::span<const double> v, std::span<double> out);
std::vector<double> apply_msketch(const MSketchOp& op, std::span<const double> v);
DenseMatrix apply_msketch(const MSketchOp& op, const DenseMatrix& a);

// Dense embedding: r x n i.i.d. standard Cauchy entries, reconstructed from
// the key on demand, scaled so that ||S y||_1 tracks ||y||_1 for a fixed
// vector. The (2/pi) r log r target from the concentration argument is
// adjusted by a measured additive constant in the log (see norm_constant).
struct DenseCauchyOp {
  std::size_t r = 0;
  std::size_t n = 0;
  std::uint64_t key = 0;
  double norm = 1.0;  // divide C*A by this

  double entry(std::size_t i, std::size_t j) const {
    return cauchy_at(key, i * n + j);
  }
};

// Measured location constant of the |Cauchy| partial-sum median; the
// normalization divides by (2/pi) r (ln r + kCauchySumShift).
inline constexpr double kCauchySumShift = 1.2;

DenseCauchyOp build_dense_cauchy(Rng rng, std::size_t r, std::size_t n);
std::vector<double> apply_dense(const DenseCauchyOp& op, std::span<const double> v);
DenseMatrix apply_dense(const DenseCauchyOp& op, const DenseMatrix& a);

// Composition: dense Cauchy stage first, sparse M-sketch second; output
// dimension no longer depends on the original n.
struct ComposedOp {
  DenseCauchyOp first;
  MSketchOp second;
};

ComposedOp compose(const DenseCauchyOp& first, const MSketchOp& second);
std::vector<double> apply_composed(const ComposedOp& op, std::span<const double> v);
DenseMatrix apply_composed(const ComposedOp& op, const DenseMatrix& a);

// JSON operator descriptor: {type, n, d, eps, delta, seed, scale_mode,
// overrides}; enough to reconstruct the operator bit-for-bit.
std::string describe_msketch(const MSketchConfig& cfg, std::uint64_t seed,
                             const std::string& type = "msketch");

}  // namespace l1sketch

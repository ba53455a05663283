#pragma once

#include <cstddef>

#include "l1sketch/msketch.hpp"

namespace l1sketch {

// Dimension-distortion trade-off entrywise embedding: M-sketch with the
// deterministic rates p_h = B^{-h}, B = (d/delta * log n)^alpha.
struct EntrywiseConfig {
  std::size_t n = 0;
  std::size_t d = 0;
  double alpha = 0.5;  // in (0,1)
  double delta = 0.1;

  double B = 0;
  std::size_t h_max = 0;
  std::size_t q_max = 0;
  std::size_t N0 = 0;
  std::size_t N = 0;

  // The paper hides constants behind a tilde-Theta; they are knobs here.
  double c_N0 = 1.0;  // N0 = c_N0 * (B/delta) * log log n
  double c_N = 1.0;   // N  = c_N * B * log n

  ScaleMode mode = ScaleMode::paper;
};

EntrywiseConfig derive_entrywise(std::size_t n, std::size_t d, double alpha,
                                 double delta, double c_N0 = 1.0, double c_N = 1.0);

EntrywiseConfig calibrated_entrywise(std::size_t n, std::size_t d, double B,
                                     std::size_t N0, std::size_t N, std::size_t h_max);

// Rejects alpha outside (0,1). The returned operator has u pinned to 1 so
// that p_h = B^{-h} exactly.
MSketchOp build_entrywise(Rng rng, const EntrywiseConfig& cfg);

// The estimator is the sketch's entrywise norm ||SA||_1; callers compare it
// against an oracle, no rescaling to (1 +- eps) is attempted.
double estimate_entrywise_norm(const MSketchOp& op, const DenseMatrix& a);

// Hard instances of the lower-bound argument: mu1 draws a d x d i.i.d.
// Cauchy matrix; mu2 fills the first r columns with i.i.d. Cauchys scaled by
// d/r and zeroes the rest.
enum class HardInstance { mu1, mu2 };

DenseMatrix gen_entrywise_hard_instance(Rng rng, std::size_t d, std::size_t r,
                                        HardInstance which);

}  // namespace l1sketch

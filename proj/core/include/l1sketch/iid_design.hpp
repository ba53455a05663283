#pragma once

#include <cstddef>
#include <vector>

#include "l1sketch/matrix.hpp"
#include "l1sketch/rng.hpp"
#include "l1sketch/samplers.hpp"

namespace l1sketch {

// Method dispatch for i.i.d. symmetric power-law design matrices, one row of
// the results table per tail-index regime.
enum class IIDMethod {
  countsketch_p_lt_1,   // p in (0,1): CountSketch, r = O(d^2 log^2 d)
  countsketch_p_eq_1,   // p = 1: CountSketch, C (d log d)^2 <= r <= o(sqrt n)
  sample_scale_p12,     // p in (1,2), large n: sample r rows, scale
  countsketch_p12,      // p in (1,2), small n: CountSketch
  uniform_sample_p_ge_2 // p >= 2: uniform sample, scale n/r
};

const char* iid_method_name(IIDMethod m);

struct IIDEmbeddingPlan {
  double p = 1.0;
  std::size_t n = 0, d = 0, r = 0;
  IIDMethod method = IIDMethod::countsketch_p_eq_1;
  double scale = 1.0;
  double kappa_n = 1.0;  // Theta(1 + d^{1/p} log d / n^{1-1/p}), constant 1
};

// Chooses the method from (p, n, d, r) and computes the scale. In strict
// mode the per-regime row-count constraints are enforced and a violated
// inequality is reported; the distortion benchmarks run with strict=false
// since they sweep r outside the admissible windows on purpose.
IIDEmbeddingPlan plan_embedding(double p, std::size_t n, std::size_t d, std::size_t r,
                                bool strict = true, double eps = 0.3);

DenseMatrix apply_plan(const IIDEmbeddingPlan& plan, Rng rng, const DenseMatrix& a);

struct IIDDistortionSummary {
  double min_ratio = 0;
  double max_ratio = 0;
  double median_ratio = 0;
  std::size_t trials = 0;
  std::size_t directions = 0;
  std::vector<double> ratios;
};

// Draws A from the power law, applies the planned operator and measures
// ||SAx||_1 / ||Ax||_1 over random unit directions (Gaussian, sparse and
// coordinate directions mixed).
IIDDistortionSummary empirical_distortion_iid(Rng rng, double p, std::size_t n,
                                              std::size_t d, std::size_t r,
                                              std::size_t trials,
                                              std::size_t directions = 12,
                                              double eps = 0.3);

// r for the p >= 2 theorem: max{eps^-p, (d^{3/2+1/p} eps^-1 log eps^-1)^{p/(p-1)}},
// times a calibration constant.
std::size_t p_ge_2_row_count(double p, std::size_t d, double eps, double calibration = 1.0);

}  // namespace l1sketch

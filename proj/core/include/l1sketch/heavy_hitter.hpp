#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "l1sketch/rng.hpp"

namespace l1sketch {

// The generic recovery contract works for any functional f with the five
// properties (symmetric, monotone, quasi-additive with constant C_f, and a
// perturbation modulus h). Only l1 is instantiated: f(x)=|x|, h(e)=e, C_f=1.
struct Functional {
  const char* name = "l1";
  double C_f = 1.0;
  double f(double x) const { return x < 0 ? -x : x; }
  double h(double e) const { return e; }
  double h_inv(double e) const { return e; }
};

// Base linear sketch T: R^m -> R^t with median-of-absolute-values recovery:
// (1-gamma) ||x||_1 <= estimate(Tx) <= (1+gamma) ||x||_1 w.p. >= 1-zeta.
// Rows are i.i.d. Cauchy, reconstructed from the key. When the computed t
// would reach 64*m the sketch degenerates to the identity (t = m, exact
// recovery); m = 1 always takes that route.
struct BaseL1Sketch {
  std::size_t m = 1;
  std::size_t t = 1;
  double gamma = 0.2;
  double zeta = 0.05;
  std::uint64_t key = 0;
  bool identity = false;

  double entry(std::size_t row, std::size_t col) const {
    return identity ? (row == col ? 1.0 : 0.0) : cauchy_at(key, row * m + col);
  }
};

BaseL1Sketch base_build(Rng rng, std::size_t m, double gamma, double zeta,
                        double c_t = 1.0);

// out += T(delta * e_coord)
void base_accumulate(const BaseL1Sketch& s, std::size_t coord, double delta,
                     std::span<double> out);
std::vector<double> base_apply(const BaseL1Sketch& s, std::span<const double> x);
double base_estimate(const BaseL1Sketch& s, std::span<const double> sketched);

struct HeavyHitterParams {
  std::size_t d = 1;     // item count
  double theta = 0.1;    // heaviness threshold
  double delta = 0.05;   // failure probability
  double c_B = 8.0;      // Rademacher-dimension constant: B = c_B * theta^-4
  std::size_t B_cap = std::size_t{1} << 22;  // memory guard on the formula
  double c_R = 1.0;      // repetitions R = c_R * log2(d/delta)
  std::size_t B_override = 0;
  std::size_t R_override = 0;
  // Base sketch parameters; payload_len > 0 bypasses the base sketch and
  // stores raw length-payload_len accumulators per bucket (the tensor tower
  // plugs its own recursive estimator in at query time).
  std::size_t m = 1;
  double gamma = 0.2;
  double zeta = 0.05;
  std::size_t payload_len = 0;
};

// Hashes items into B buckets with signs, one base-sketch accumulator per
// (repetition, bucket); estimates are medians across repetitions.
struct HeavyHitterState {
  HeavyHitterParams params;
  Functional func;
  std::size_t B = 0;
  std::size_t R = 0;
  std::size_t t = 0;  // accumulator length per bucket
  BaseL1Sketch base;  // unused in payload mode

  std::vector<std::uint32_t> bucket_of;  // R * d
  std::vector<std::int8_t> sign_of;      // R * d
  std::vector<double> acc;               // R * B * t

  std::span<double> bucket(std::size_t rep, std::size_t b) {
    return {acc.data() + (rep * B + b) * t, t};
  }
  std::span<const double> bucket(std::size_t rep, std::size_t b) const {
    return {acc.data() + (rep * B + b) * t, t};
  }
  std::uint32_t bucket_index(std::size_t rep, std::size_t item) const {
    return bucket_of[rep * params.d + item];
  }
  double sign(std::size_t rep, std::size_t item) const {
    return static_cast<double>(sign_of[rep * params.d + item]);
  }
};

HeavyHitterState hh_build(Rng rng, const HeavyHitterParams& params);

// Adds sign * T(delta_vec) into the item's bucket in every repetition.
void hh_update(HeavyHitterState& st, std::size_t item, std::span<const double> delta_vec);
void hh_update(HeavyHitterState& st, std::size_t item, double delta);  // m == 1

using BucketEstimator = std::function<double(std::span<const double>)>;

// Median across repetitions of the base estimate of the item's bucket.
double hh_query(const HeavyHitterState& st, std::size_t item);
double hh_query(const HeavyHitterState& st, std::size_t item, const BucketEstimator& est);
std::vector<double> hh_query_all(const HeavyHitterState& st);

// Coordinate-wise sum of accumulators; linearity makes this the state of the
// concatenated stream.
void hh_merge(HeavyHitterState& into, const HeavyHitterState& other);

}  // namespace l1sketch

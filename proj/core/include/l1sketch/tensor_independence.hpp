#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l1sketch/l1_estimator.hpp"
#include "l1sketch/rng.hpp"

namespace l1sketch {

// A (coordinate-tuple, signed-delta) record of a turnstile stream over [d]^q.
// Indices are 0-based here; the text stream format is 1-based.
struct StreamUpdate {
  std::vector<std::uint32_t> idx;
  double delta = 1.0;
};

struct TensorCalib {
  double c = 4.0;       // schedule exponent, c >= 4
  double alpha = 0.5;   // per-mode accuracy decay eps_i = alpha * eps_{i+1}
  double c_R = 1.0;     // repetitions R_i = c_R * log2(1/delta_i)
  double c_delta = 1.0; // delta_i = c_delta * (eps_i / L_i)^c for i < q

  // Desk-scale overrides (0 = formula). The paper constants explode the
  // bucket counts at any usable (q, d, eps); the recursion shape is kept and
  // the sizes come from here.
  std::size_t R_override = 0;      // tower repetitions per mode
  std::size_t hh_R_override = 0;   // HeavyHitter repetitions
  std::size_t B_override = 0;      // HeavyHitter buckets
  double theta_override = 0;
  std::size_t t_rough = 25;        // rough-sketch rows embedded per sketch
  std::size_t K_decode = 4;        // K grid ceiling used at decode time
  bool shrink_windows = false;
  std::size_t max_cells = std::size_t{1} << 27;  // build guard on t_q
};

struct ModeSchedule {
  std::size_t q = 1;
  std::size_t d = 2;
  double eps = 0.3;
  double delta = 0.1;
  std::size_t K = 4;

  struct Mode {
    double eps_i = 0;
    double delta_i = 0;
    std::size_t N_i = 0;
    std::size_t L_i = 0;      // log2(K N_i / eps_i)
    std::size_t L_hat = 0;    // log2 N_i
    std::size_t R_i = 0;      // tower repetitions
    std::size_t hh_R = 0;     // HeavyHitter repetitions
    std::size_t B = 0;        // HeavyHitter buckets
    double theta = 0;
    double t_formula = 0;     // O((L_i/eps_i)^c t_{i-1} log K log(K/delta_i))
    std::size_t payload_len = 0;  // t_{i-1}: actual per-bucket vector length
    std::size_t sketch_len = 0;   // t_i: actual length of a mode-i sketch
    std::size_t cells = 0;        // R_i (L_hat+1) hh_R B
  };
  std::vector<Mode> modes;  // index 0 holds mode 1
};

ModeSchedule make_schedule(std::size_t q, std::size_t d, double eps, double delta,
                           std::size_t K, const TensorCalib& calib);

// The recursive tensor-product sketch: one flat vector holds the mode-q
// sketch of P^f, where each HeavyHitter bucket at mode i stores the complete
// mode-(i-1) sketch of its signed column combination (scalars at the bottom)
// plus a short block of lazily-materialized Cauchy rows that serves as the
// rough norm approximator for that sketch. The Q side keeps scalar shadow
// buckets under bit-identical (level, bucket, sign) randomness plus exact
// marginal counters, which is what makes end-of-stream tensorization a pure
// product recursion.
class TensorState {
 public:
  TensorState(Rng rng, const ModeSchedule& sched, const TensorCalib& calib);

  const ModeSchedule& schedule() const { return sched_; }
  const TensorCalib& calib() const { return calib_; }

  void update_P(const StreamUpdate& u);
  void update_Q(const StreamUpdate& u);
  void update(const StreamUpdate& u) { update_P(u); update_Q(u); }

  void finish_stream() { finished_ = true; }
  bool finished() const { return finished_; }
  double stream_mass() const { return m_; }

  // Pi^(q) Q^f for Q^f = P_1^f x ... x P_q^f, from the scalar shadows; the
  // rough blocks at each mode need the product marginals evaluated per tuple
  // and cost O(q d^q t_rough). Rejected mid-stream.
  std::vector<double> tensorize_Q() const;

  // Recovery on the state's own P sketch (mode must equal q; recursion on
  // bucket payloads happens internally).
  double decode(std::size_t mode, Rng zeta_rng) const;

  // Recovery on any mode-level sketch vector with this state's randomness.
  double decode_span(std::size_t mode, std::span<const double> sketch,
                     Rng zeta_rng) const;

  // ||P - Q||_1 estimate: decodes m^{q-1} Pi P^f - Pi Q^f and divides by m^q.
  // Requires a finished stream with positive mass.
  double estimate_tvd(Rng zeta_rng) const;

  // Canonical flat image of the mode-q P sketch (bucket blocks in layout
  // order followed by the rough rows).
  std::vector<double> flatten_P() const;
  std::size_t sketch_len(std::size_t mode) const { return sched_.modes[mode - 1].sketch_len; }
  std::size_t accumulator_count() const;

  // The per-(mode, repetition) hashing state; the outermost mode's bucket
  // accumulators are the live P storage.
  const ShhState& p_rep(std::size_t mode, std::size_t rep) const {
    return p_reps_[mode - 1][rep];
  }

  // --- layout and randomness accessors (tests gather the reference image
  // of an explicit tensor through these) ---
  std::uint32_t level_of(std::size_t mode, std::size_t rep, std::uint32_t item) const;
  std::uint32_t bucket_of(std::size_t mode, std::size_t rep, std::size_t level,
                          std::size_t hh_rep, std::uint32_t item) const;
  double sign_of(std::size_t mode, std::size_t rep, std::size_t level,
                 std::size_t hh_rep, std::uint32_t item) const;
  // Cauchy coefficient of the mode-level rough rows at a coordinate tuple
  // (prefix of length `mode`).
  double rough_coeff(std::size_t mode, std::size_t row,
                     std::span<const std::uint32_t> prefix) const;
  // Offset of a bucket's payload inside a mode-level sketch vector.
  std::size_t block_offset(std::size_t mode, std::size_t rep, std::size_t level,
                           std::size_t hh_rep, std::size_t bucket) const;
  std::size_t rough_offset(std::size_t mode) const;

  std::span<const double> q_buckets(std::size_t mode) const { return q_flat_[mode - 1]; }
  std::span<const double> marginal(std::size_t mode) const { return marginals_[mode - 1]; }

 private:
  struct ModeTables {
    std::uint64_t rough_key = 0;
  };

  void add_increment(std::size_t mode, std::span<double> out,
                     std::span<const std::uint32_t> idx, double delta);
  double q_bucket_value(std::size_t mode, std::size_t rep, std::size_t level,
                        std::size_t hh_rep, std::size_t bucket) const;
  void fill_rough_product(std::size_t mode, std::span<double> rough_out) const;

  ModeSchedule sched_;
  TensorCalib calib_;
  std::vector<ModeTables> tables_;                 // per mode
  std::vector<std::vector<ShhState>> p_reps_;      // per mode: R_i states
  std::vector<double> rough_top_;                  // mode-q rough rows
  std::vector<std::vector<double>> q_flat_;        // per mode: scalar shadows
  std::vector<std::vector<double>> marginals_;
  double m_ = 0;
  bool finished_ = false;
};

TensorState build_tensor_state(Rng rng, std::size_t q, std::size_t d, double eps,
                               double delta, std::size_t K,
                               const TensorCalib& calib = {});

}  // namespace l1sketch

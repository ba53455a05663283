#pragma once

#include <functional>
#include <span>
#include <vector>

#include "l1sketch/matrix.hpp"
#include "l1sketch/rng.hpp"

namespace l1sketch {

// ---- exact ground truth ----------------------------------------------------

// ||P - Q||_1 for the empirical joint P = counts/m and the product of its
// marginals Q, by full materialization. counts is a dense tensor over [d]^q
// in row-major order; d^q capped at 10^7.
double exact_tvd(std::span<const double> counts, std::size_t q, std::size_t d,
                 double m);

// ---- distortion measurement -------------------------------------------------

struct DistortionReport {
  double min_ratio = 0;
  double max_ratio = 0;
  double median_ratio = 0;
  std::size_t directions = 0;
  std::size_t skipped = 0;  // directions with ||Ax||_1 = 0
  std::vector<double> ratios;
};

enum class DirectionMode { gaussian, sparse, coordinate, net_tiny };

using LinearOp = std::function<std::vector<double>(std::span<const double>)>;

// Ratios ||S A x||_1 / ||A x||_1 over sampled directions x. net_tiny
// enumerates a deterministic epsilon-grid over the coefficient sphere and is
// available for d <= 3 only.
DistortionReport empirical_distortion(const LinearOp& op, const DenseMatrix& a,
                                      std::size_t directions, DirectionMode mode,
                                      Rng rng, double net_eps = 0.1);

// ---- Monte Carlo drivers for the probabilistic lemmas -----------------------

// Draws u ~ U[0,1], p = B'^{-u} with B' = (b/a)^{1/delta'}, and returns the
// frequency of p*t in [a, b]; the lemma bounds it by delta' (exactly zero
// when t >= b or B' t <= a).
double mc_boundary_lemma(Rng rng, double a, double b, double delta_prime, double t,
                         std::size_t trials);

struct RademacherCheck {
  double violation_rate = 0;
  double bound = 0;  // allowed rate: delta + 3 sqrt(delta(1-delta)/trials)
  bool pass = false;
};

// Checks || sum_i eps_i x_i ||_1 <= d sqrt(0.5 ln(2d/delta)) sqrt(s) over
// random unit-l1 x_i, Rademacher signs redrawn per trial.
RademacherCheck mc_rademacher_l1(Rng rng, std::size_t s, std::size_t d, double delta,
                                 std::size_t trials);

// ---- adversarial design generators ------------------------------------------

enum class HardDesign { cauchy_design, pstable_design };

DenseMatrix gen_hard_iid_instance(Rng rng, HardDesign kind, std::size_t n,
                                  std::size_t d, double p = 1.5);

// ---- recursive tensor sketch reference ---------------------------------------

class TensorState;

// Gather-form reference image of an explicit tensor under the state's linear
// map: builds every bucket's signed content first and sketches it, instead
// of scattering per update. Tensor is flat with the mode-1 index fastest;
// mode 0 expects a single scalar.
std::vector<double> tensor_reference_sketch(const TensorState& st, std::size_t mode,
                                            std::span<const double> tensor);

// ---- statistics utilities ----------------------------------------------------

double median_of(std::vector<double> v);  // by value: sorts a copy
double quantile_of(std::vector<double> v, double q);

double normal_cdf(double z);

// Welch's t-test, two-sided p-value via the normal approximation (sample
// sizes here are ~50+ per arm).
double welch_t_pvalue(std::span<const double> a, std::span<const double> b);

// One-sample Kolmogorov-Smirnov statistic against a cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// CDF of the standard symmetric p-stable law by numerical inversion of the
// characteristic function: F(x) = 1/2 + (1/pi) int_0^inf sin(tx)/t e^{-t^p} dt.
double stable_cdf(double p, double x);

// Half-width of the 3-sigma binomial confidence interval.
double binomial_ci3(double p_hat, std::size_t trials);

}  // namespace l1sketch

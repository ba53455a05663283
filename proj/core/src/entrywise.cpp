#include "l1sketch/entrywise.hpp"

#include <cmath>
#include <stdexcept>

#include "l1sketch/common.hpp"
#include "l1sketch/samplers.hpp"

namespace l1sketch {

namespace {
std::size_t ceil_count(double x) {
  return x > 0 ? static_cast<std::size_t>(std::ceil(x - 1e-12)) : 0;
}
}  // namespace

EntrywiseConfig derive_entrywise(std::size_t n, std::size_t d, double alpha,
                                 double delta, double c_N0, double c_N) {
  if (!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("entrywise: alpha must lie in (0,1)");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("entrywise: delta must lie in (0,1)");
  if (n < 2 || d < 1) throw std::invalid_argument("entrywise: n >= 2, d >= 1");

  EntrywiseConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.c_N0 = c_N0;
  cfg.c_N = c_N;

  double log2n = std::log2(static_cast<double>(n));
  cfg.B = std::pow(static_cast<double>(d) / delta * log2n, alpha);
  if (!(cfg.B > 1.0)) cfg.B = std::nextafter(1.0, 2.0) + 1e-9;
  cfg.h_max = ceil_count(std::log(static_cast<double>(n)) / std::log(cfg.B));
  cfg.q_max = ceil_count(std::log2(static_cast<double>(n) * d *
                                   std::max<double>(1, cfg.h_max) / delta));
  double n0 = c_N0 * (cfg.B / delta) * std::max(1.0, std::log2(std::max(2.0, log2n)));
  double nh = c_N * cfg.B * log2n;
  if (n0 > 9e15 || nh > 9e15) throw overflow_error("entrywise bucket counts overflow");
  cfg.N0 = std::max<std::size_t>(1, ceil_count(n0));
  cfg.N = std::max<std::size_t>(1, ceil_count(nh));
  cfg.mode = ScaleMode::paper;
  return cfg;
}

EntrywiseConfig calibrated_entrywise(std::size_t n, std::size_t d, double B,
                                     std::size_t N0, std::size_t N,
                                     std::size_t h_max) {
  if (!(B > 1.0)) throw std::invalid_argument("entrywise: B > 1");
  EntrywiseConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.alpha = 0;
  cfg.delta = 0.1;
  cfg.B = B;
  cfg.h_max = h_max;
  cfg.q_max = ceil_count(std::log2(static_cast<double>(n) * d * 10));
  cfg.N0 = N0;
  cfg.N = N;
  cfg.mode = ScaleMode::calibrated;
  return cfg;
}

MSketchOp build_entrywise(Rng rng, const EntrywiseConfig& cfg) {
  if (cfg.mode == ScaleMode::paper && !(cfg.alpha > 0 && cfg.alpha < 1))
    throw std::invalid_argument("entrywise: alpha must lie in (0,1)");
  MSketchConfig mc;
  mc.n = cfg.n;
  mc.d = cfg.d;
  mc.eps = 0.5;  // the entrywise guarantee is a distortion interval, not 1+-eps
  mc.delta = cfg.delta;
  mc.B = cfg.B;
  mc.log2_B = std::log2(cfg.B);
  mc.N0 = cfg.N0;
  mc.N = cfg.N;
  mc.h_max = cfg.h_max;
  mc.q_max = cfg.q_max;
  mc.mode = ScaleMode::calibrated;  // sizes are already resolved
  mc.shift = RateShift::fixed_u1;   // p_h = B^{-h} exactly
  return build_msketch(rng, mc);
}

double estimate_entrywise_norm(const MSketchOp& op, const DenseMatrix& a) {
  return l1_norm(apply_msketch(op, a));
}

DenseMatrix gen_entrywise_hard_instance(Rng rng, std::size_t d, std::size_t r,
                                        HardInstance which) {
  if (r > d) throw std::invalid_argument("hard instance: r <= d required");
  if (which == HardInstance::mu1) return cauchy_matrix(rng, d, d);
  DenseMatrix a(d, d);
  double scale = static_cast<double>(d) / static_cast<double>(r);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < r; ++j) a.at(i, j) = scale * rng.cauchy();
  return a;
}

}  // namespace l1sketch

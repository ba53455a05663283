#include "l1sketch/msketch.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "l1sketch/common.hpp"

namespace l1sketch {

namespace {

double log2d(double x) { return std::log2(x); }

std::size_t ceil_count(double x) {
  if (!(x > 0)) return 0;
  return static_cast<std::size_t>(std::ceil(x - 1e-12));
}

// Deterministic per-purpose substreams.
enum : std::uint64_t {
  kStreamU = 1,
  kStreamSigns = 2,
  kStreamBucket0 = 3,
  kStreamSurvivors = 16,  // + h
  kStreamLevelHash = 4096,  // + h
};

}  // namespace

MSketchConfig derive_constants(std::size_t n, std::size_t d, double eps, double delta) {
  if (n < 1 || d < 1) throw std::invalid_argument("derive_constants: n, d >= 1");
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1))
    throw std::invalid_argument("derive_constants: eps, delta in (0,1)");

  MSketchConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.eps = eps;
  cfg.delta = delta;
  cfg.mode = ScaleMode::paper;
  cfg.shift = RateShift::random_u;

  double nn = static_cast<double>(n);
  double dd = static_cast<double>(d);
  cfg.h_max = ceil_count(log2d(nn / eps));
  cfg.q_max = ceil_count(log2d(nn * dd * std::max<double>(1, cfg.h_max) / (delta * eps)));
  cfg.alpha_net = 2.0 * std::pow(3.0 / eps, dd) * cfg.q_max / delta;
  double log2n = std::max(1.0, log2d(nn));
  cfg.m_crowd = 300.0 * std::pow(dd, 11) * std::pow(eps, -9.0) * std::pow(delta, -4.0) *
                std::pow(log2n, 5.0);

  // B = (m_crowd h_max q_max / delta)^(d / (delta eps)); evaluate in logs so
  // overflow is detected instead of silently saturating.
  double base = cfg.m_crowd * cfg.h_max * cfg.q_max / delta;
  double exponent = dd / (delta * eps);
  cfg.log2_B = exponent * log2d(base);
  if (cfg.log2_B > 1023.0) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "paper-mode branching factor overflows: log2(B) = %.1f "
                  "(d/(delta*eps) = %.3g); use calibrated parameters",
                  cfg.log2_B, exponent);
    throw overflow_error(msg);
  }
  cfg.B = std::exp2(cfg.log2_B);

  double log_alpha = std::max(1.0, log2d(cfg.alpha_net));
  // N0 evaluated at the u = 1 worst case; build_msketch recomputes with the
  // drawn shift in paper mode.
  double n0 = 12.0 * cfg.B * cfg.q_max / std::pow(eps, 3.0) * log_alpha;
  double nh = cfg.B * (8.0 * dd * dd * std::max(1.0, log2d(dd)) / std::pow(eps, 6.0)) *
              cfg.q_max * log_alpha * log2d(cfg.B / eps);
  if (n0 > 9e15 || nh > 9e15)
    throw overflow_error("paper-mode bucket counts exceed addressable range; use calibrated parameters");
  cfg.N0 = ceil_count(n0);
  cfg.N = ceil_count(nh);
  return cfg;
}

MSketchConfig calibrated_config(std::size_t n, std::size_t d, double eps, double delta,
                                double B, std::size_t N0, std::size_t N,
                                std::size_t h_max) {
  if (!(B > 1.0)) throw std::invalid_argument("calibrated_config: B must exceed 1");
  if (N0 == 0 || (h_max > 0 && N == 0))
    throw std::invalid_argument("calibrated_config: bucket counts must be positive");
  MSketchConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.eps = eps;
  cfg.delta = delta;
  cfg.B = B;
  cfg.log2_B = std::log2(B);
  cfg.N0 = N0;
  cfg.N = N;
  cfg.h_max = h_max;
  cfg.q_max = ceil_count(std::log2(static_cast<double>(n) * d / (delta * eps)));
  cfg.mode = ScaleMode::calibrated;
  cfg.shift = RateShift::random_u;
  return cfg;
}

std::vector<double> sample_rates(double u, double B, std::size_t h_max) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("sample_rates: u in [0,1]");
  if (!(B > 1.0)) throw std::invalid_argument("sample_rates: B > 1");
  std::vector<double> rates(h_max);
  for (std::size_t h = 1; h <= h_max; ++h)
    rates[h - 1] = std::pow(B, -(u + static_cast<double>(h) - 1.0));
  return rates;
}

MSketchOp build_msketch(Rng rng, const MSketchConfig& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("build_msketch: empty config");
  MSketchOp op;
  op.cfg = cfg;
  op.u = (cfg.shift == RateShift::fixed_u1) ? 1.0 : rng.derive(kStreamU).uniform();

  if (cfg.mode == ScaleMode::paper) {
    // 0th-level bucket count depends on the drawn shift through B^u.
    double log_alpha = std::max(1.0, std::log2(cfg.alpha_net));
    double n0 = 12.0 * std::exp2(op.u * cfg.log2_B) * cfg.q_max /
                std::pow(cfg.eps, 3.0) * log_alpha;
    if (n0 > 9e15) throw overflow_error("paper-mode N0 overflows at drawn u");
    op.cfg.N0 = static_cast<std::size_t>(std::ceil(n0));
  }

  Rng signs = rng.derive(kStreamSigns);
  op.sign_of.resize(cfg.n);
  for (auto& s : op.sign_of) s = (signs.next_u64() & 1) ? 1 : -1;

  Rng b0 = rng.derive(kStreamBucket0);
  op.bucket0_of.resize(cfg.n);
  for (auto& b : op.bucket0_of) b = static_cast<std::uint32_t>(b0.below(op.cfg.N0));

  op.levels.resize(cfg.h_max);
  for (std::size_t h = 1; h <= cfg.h_max; ++h) {
    auto& lvl = op.levels[h - 1];
    lvl.p = std::exp2(-(op.u + static_cast<double>(h) - 1.0) * cfg.log2_B);
    Rng inc = rng.derive(kStreamSurvivors + h);
    Rng hash = rng.derive(kStreamLevelHash + h);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      if (inc.uniform() < lvl.p) {
        lvl.survivors.push_back(static_cast<std::uint32_t>(i));
        lvl.bucket_of.push_back(static_cast<std::uint32_t>(hash.below(cfg.N)));
      }
    }
  }
  return op;
}

void apply_msketch(const MSketchOp& op, std::span<const double> v, std::span<double> out) {
  if (v.size() != op.cfg.n) throw dimension_error("apply_msketch: v.len != n");
  if (out.size() != op.output_dim()) throw dimension_error("apply_msketch: bad out.len");
  for (auto& x : out) x = 0.0;
  for (std::size_t i = 0; i < op.cfg.n; ++i)
    if (v[i] != 0.0) out[op.bucket0_of[i]] += op.sign_of[i] * v[i];
  std::size_t off = op.cfg.N0;
  for (const auto& lvl : op.levels) {
    double inv_p = 1.0 / lvl.p;
    for (std::size_t k = 0; k < lvl.survivors.size(); ++k) {
      std::uint32_t i = lvl.survivors[k];
      if (v[i] != 0.0) out[off + lvl.bucket_of[k]] += op.sign_of[i] * v[i] * inv_p;
    }
    off += op.cfg.N;
  }
}

std::vector<double> apply_msketch(const MSketchOp& op, std::span<const double> v) {
  std::vector<double> out(op.output_dim(), 0.0);
  apply_msketch(op, v, out);
  return out;
}

DenseMatrix apply_msketch(const MSketchOp& op, const DenseMatrix& a) {
  if (a.rows != op.cfg.n) throw dimension_error("apply_msketch: A.rows != n");
  DenseMatrix out(op.output_dim(), a.cols);
  for (std::size_t i = 0; i < op.cfg.n; ++i) {
    const double* src = a.data.data() + i * a.cols;
    double s = op.sign_of[i];
    double* dst = out.data.data() + op.bucket0_of[i] * a.cols;
    for (std::size_t j = 0; j < a.cols; ++j) dst[j] += s * src[j];
  }
  std::size_t off = op.cfg.N0;
  for (const auto& lvl : op.levels) {
    double inv_p = 1.0 / lvl.p;
    for (std::size_t k = 0; k < lvl.survivors.size(); ++k) {
      std::uint32_t i = lvl.survivors[k];
      const double* src = a.data.data() + static_cast<std::size_t>(i) * a.cols;
      double w = op.sign_of[i] * inv_p;
      double* dst = out.data.data() + (off + lvl.bucket_of[k]) * a.cols;
      for (std::size_t j = 0; j < a.cols; ++j) dst[j] += w * src[j];
    }
    off += op.cfg.N;
  }
  return out;
}

DenseCauchyOp build_dense_cauchy(Rng rng, std::size_t r, std::size_t n) {
  if (r == 0 || n == 0) throw std::invalid_argument("dense cauchy: r, n >= 1");
  DenseCauchyOp op;
  op.r = r;
  op.n = n;
  op.key = rng.derive(0xDC).next_u64();
  op.norm = (2.0 / 3.14159265358979323846) * static_cast<double>(r) *
            (std::log(static_cast<double>(r)) + kCauchySumShift);
  return op;
}

std::vector<double> apply_dense(const DenseCauchyOp& op, std::span<const double> v) {
  if (v.size() != op.n) throw dimension_error("dense cauchy apply: v.len != n");
  std::vector<double> out(op.r, 0.0);
  double inv = 1.0 / op.norm;
  for (std::size_t j = 0; j < op.n; ++j) {
    double x = v[j];
    if (x == 0.0) continue;
    for (std::size_t i = 0; i < op.r; ++i) out[i] += op.entry(i, j) * x;
  }
  for (auto& x : out) x *= inv;
  return out;
}

DenseMatrix apply_dense(const DenseCauchyOp& op, const DenseMatrix& a) {
  if (a.rows != op.n) throw dimension_error("dense cauchy apply: A.rows != n");
  DenseMatrix out(op.r, a.cols);
  double inv = 1.0 / op.norm;
  for (std::size_t j = 0; j < op.n; ++j) {
    const double* src = a.data.data() + j * a.cols;
    for (std::size_t i = 0; i < op.r; ++i) {
      double c = op.entry(i, j);
      double* dst = out.data.data() + i * a.cols;
      for (std::size_t k = 0; k < a.cols; ++k) dst[k] += c * src[k];
    }
  }
  for (auto& x : out.data) x *= inv;
  return out;
}

ComposedOp compose(const DenseCauchyOp& first, const MSketchOp& second) {
  if (second.cfg.n != first.r)
    throw dimension_error("compose: second.n must equal first.r");
  return ComposedOp{first, second};
}

std::vector<double> apply_composed(const ComposedOp& op, std::span<const double> v) {
  return apply_msketch(op.second, apply_dense(op.first, v));
}

DenseMatrix apply_composed(const ComposedOp& op, const DenseMatrix& a) {
  return apply_msketch(op.second, apply_dense(op.first, a));
}

std::string describe_msketch(const MSketchConfig& cfg, std::uint64_t seed,
                             const std::string& type) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "{\"type\":\"%s\",\"n\":%zu,\"d\":%zu,\"eps\":%.17g,\"delta\":%.17g,"
                "\"seed\":%llu,\"scale_mode\":\"%s\",\"overrides\":{\"B\":%.17g,"
                "\"N0\":%zu,\"N\":%zu,\"h_max\":%zu}}",
                type.c_str(), cfg.n, cfg.d, cfg.eps, cfg.delta,
                static_cast<unsigned long long>(seed),
                cfg.mode == ScaleMode::paper ? "paper" : "calibrated", cfg.B, cfg.N0,
                cfg.N, cfg.h_max);
  return buf;
}

}  // namespace l1sketch

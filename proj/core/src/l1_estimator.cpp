#include "l1sketch/l1_estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "alg3.hpp"
#include "l1sketch/common.hpp"

namespace l1sketch {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(prod & kMersenne61);
  std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kMersenne61) s -= kMersenne61;
  return s;
}

std::size_t ceil_log2(double x) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(std::log2(x) - 1e-9)));
}

double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::uint32_t LevelHash::level_of(std::uint64_t i) const {
  std::uint64_t v = mulmod61(a, i % kMersenne61);
  v += b;
  if (v >= kMersenne61) v -= kMersenne61;
  if (L_hat == 0) return 0;
  std::uint64_t mask = (std::uint64_t{1} << L_hat) - 1;
  std::uint64_t low = v & mask;
  if (low == 0) return L_hat;
  return static_cast<std::uint32_t>(std::countr_zero(low));
}

LevelHash build_level_hash(Rng& rng, std::uint32_t L_hat) {
  LevelHash h;
  h.a = 1 + rng.below(kMersenne61 - 1);
  h.b = rng.below(kMersenne61);
  h.L_hat = L_hat;
  return h;
}

namespace {

ShhDerived derive_shh(const ShhParams& p) {
  if (p.K < 2 || (p.K & (p.K - 1)) != 0)
    throw std::invalid_argument("subsampling estimator: K must be a power of 2, >= 2");
  if (!(p.eps > 0 && p.eps < 1))
    throw std::invalid_argument("subsampling estimator: eps in (0,1)");
  if (p.N < 1) throw std::invalid_argument("subsampling estimator: N >= 1");

  ShhDerived d;
  d.L = ceil_log2(static_cast<double>(p.K) * static_cast<double>(p.N) / p.eps);
  d.L_hat = ceil_log2(static_cast<double>(p.N));
  Functional f;
  double l3 = std::pow(static_cast<double>(d.L), 3.0);
  d.theta = std::min({p.c_theta * std::pow(p.eps, 3.0) / (f.C_f * l3),
                      f.h_inv(p.alpha * p.eps / 3.0), p.alpha * p.eps / 4.0});
  if (p.theta_override > 0) d.theta = p.theta_override;
  d.theta = std::min(d.theta, 0.33);
  if (p.B_override) {
    d.B = p.B_override;
  } else {
    double b = p.c_B / std::pow(d.theta, 4.0);
    d.B = static_cast<std::size_t>(std::min<double>(b, static_cast<double>(p.B_cap)));
  }
  d.B = std::max<std::size_t>(1, d.B);
  if (p.R_override) {
    d.R = p.R_override;
  } else {
    double hh_delta = 0.05 / static_cast<double>(d.L_hat + 1);
    d.R = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(p.c_R * std::log2(static_cast<double>(p.N) / hh_delta))));
  }
  d.Q = static_cast<std::size_t>(
      std::ceil(p.c_Q * static_cast<double>(d.B) * static_cast<double>(d.L_hat + 1) *
                std::max(1.0, std::log2(static_cast<double>(p.N) *
                                        std::max<double>(1, d.L_hat)))));
  d.top_count = static_cast<std::size_t>(
      std::min(1e18, std::ceil(p.c_top * std::pow(static_cast<double>(d.L), 3.0) /
                               std::pow(p.eps, 3.0))));
  return d;
}

}  // namespace

std::size_t ShhState::accumulator_count() const {
  std::size_t total = 0;
  for (const auto& hh : D) total += hh.acc.size();
  return total;
}

ShhState shh_build(Rng rng, const ShhParams& params) {
  ShhState st;
  st.params = params;
  st.derived = derive_shh(params);

  Rng level_rng = rng.derive(0x5B);
  st.H = build_level_hash(level_rng, static_cast<std::uint32_t>(st.derived.L_hat));

  HeavyHitterParams hp;
  hp.d = params.N;
  hp.theta = st.derived.theta;
  hp.delta = 0.05 / static_cast<double>(st.derived.L_hat + 1);
  hp.B_override = st.derived.B;
  hp.R_override = st.derived.R;
  hp.payload_len = params.payload_len ? params.payload_len : 1;
  st.D.reserve(st.derived.L_hat + 1);
  for (std::size_t l = 0; l <= st.derived.L_hat; ++l)
    st.D.push_back(hh_build(rng.derive(0x100 + l), hp));
  return st;
}

void shh_update(ShhState& st, std::uint64_t i, double delta) {
  if (i >= st.params.N) throw std::out_of_range("subsampling estimator: index");
  std::uint32_t lvl = st.H.level_of(i);
  std::uint32_t top = std::min<std::uint32_t>(lvl, static_cast<std::uint32_t>(st.derived.L_hat));
  for (std::uint32_t l = 0; l <= top; ++l) hh_update(st.D[l], i, delta);
}

void shh_update(ShhState& st, std::uint64_t i, std::span<const double> delta_vec) {
  if (i >= st.params.N) throw std::out_of_range("subsampling estimator: index");
  std::uint32_t lvl = st.H.level_of(i);
  std::uint32_t top = std::min<std::uint32_t>(lvl, static_cast<std::uint32_t>(st.derived.L_hat));
  for (std::uint32_t l = 0; l <= top; ++l) hh_update(st.D[l], i, delta_vec);
}

namespace {

detail::LevelTable level_table_of(const ShhState& st, const BucketEstimator& est) {
  detail::LevelTable table;
  table.vals.resize(st.derived.L_hat + 1);
  for (std::uint64_t i = 0; i < st.params.N; ++i) {
    std::uint32_t top = std::min<std::uint32_t>(
        st.H.level_of(i), static_cast<std::uint32_t>(st.derived.L_hat));
    for (std::uint32_t l = 0; l <= top; ++l)
      table.vals[l].push_back(hh_query(st.D[l], i, est));
  }
  table.finalize();
  return table;
}

}  // namespace

double shh_estimate(const ShhState& st, double M_hat, std::size_t K, Rng zeta_rng,
                    const BucketEstimator& est, ShhEstimateTrace* trace) {
  if (!(M_hat > 0)) {
    if (M_hat == 0) return 0.0;
    throw std::invalid_argument("subsampling estimator: M_hat must be positive");
  }
  detail::Alg3Opts opt{st.params.eps, st.params.N, st.params.c_top,
                       st.params.shrink_windows};
  auto table = level_table_of(st, est);
  return detail::algorithm3(table, opt, M_hat, K, zeta_rng.uniform(), trace);
}

double shh_estimate_boosted(std::span<const ShhState> states, double M_hat,
                            std::size_t K_max, Rng zeta_rng,
                            const BucketEstimator& est) {
  if (states.empty()) throw std::invalid_argument("boosted estimate: no repetitions");
  if (K_max < 2 || (K_max & (K_max - 1)) != 0)
    throw std::invalid_argument("boosted estimate: K grid top must be a power of 2");
  if (M_hat == 0) return 0.0;

  std::vector<detail::LevelTable> tables;
  tables.reserve(states.size());
  for (const auto& st : states) tables.push_back(level_table_of(st, est));

  double best = 0.0;
  for (std::size_t k = 2; k <= K_max; k *= 2) {
    std::vector<double> reps(states.size());
    for (std::size_t r = 0; r < states.size(); ++r) {
      detail::Alg3Opts opt{states[r].params.eps, states[r].params.N,
                           states[r].params.c_top, states[r].params.shrink_windows};
      reps[r] = detail::algorithm3(tables[r], opt, M_hat, k, zeta_rng.uniform(), nullptr);
    }
    best = std::max(best, median_inplace(reps));
  }
  return best;
}

void CauchyMedianSketch::update(std::uint64_t coord, double delta) {
  for (std::size_t row = 0; row < t; ++row)
    acc[row] += delta * cauchy_at(detail::combine(key, row), coord);
}

double CauchyMedianSketch::estimate() const {
  if (acc.empty()) return 0.0;
  std::vector<double> mags(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) mags[i] = std::abs(acc[i]);
  return median_inplace(mags);
}

CauchyMedianSketch rough_build(Rng rng, std::size_t t) {
  CauchyMedianSketch s;
  s.t = t;
  s.key = rng.derive(0xF0).next_u64();
  s.acc.assign(t, 0.0);
  return s;
}

double rough_estimate(Rng rng, std::span<const double> x, std::size_t t) {
  CauchyMedianSketch s = rough_build(rng, t);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) s.update(i, x[i]);
  return s.m_hat();
}

}  // namespace l1sketch

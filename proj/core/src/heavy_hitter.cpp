#include "l1sketch/heavy_hitter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "l1sketch/common.hpp"

namespace l1sketch {

namespace {

double median_inplace(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BaseL1Sketch base_build(Rng rng, std::size_t m, double gamma, double zeta, double c_t) {
  if (!(gamma > 0 && gamma < 1) || !(zeta > 0 && zeta < 1))
    throw std::invalid_argument("base sketch: gamma, zeta in (0,1)");
  if (m == 0) throw std::invalid_argument("base sketch: m >= 1");
  BaseL1Sketch s;
  s.m = m;
  s.gamma = gamma;
  s.zeta = zeta;
  s.key = rng.derive(0xB5).next_u64();
  double t = c_t * std::ceil(std::log2(1.0 / zeta)) / (gamma * gamma);
  // A sketch longer than 64 m stops paying for itself; store x directly.
  if (t >= 64.0 * static_cast<double>(m)) {
    s.identity = true;
    s.t = m;
  } else {
    s.t = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t)));
  }
  return s;
}

void base_accumulate(const BaseL1Sketch& s, std::size_t coord, double delta,
                     std::span<double> out) {
  if (coord >= s.m) throw std::out_of_range("base sketch: coord out of range");
  if (out.size() != s.t) throw dimension_error("base sketch: bad accumulator length");
  if (s.identity) {
    out[coord] += delta;
    return;
  }
  for (std::size_t row = 0; row < s.t; ++row)
    out[row] += delta * cauchy_at(s.key, row * s.m + coord);
}

std::vector<double> base_apply(const BaseL1Sketch& s, std::span<const double> x) {
  if (x.size() != s.m) throw dimension_error("base sketch: x.len != m");
  std::vector<double> out(s.t, 0.0);
  for (std::size_t j = 0; j < s.m; ++j)
    if (x[j] != 0.0) base_accumulate(s, j, x[j], out);
  return out;
}

double base_estimate(const BaseL1Sketch& s, std::span<const double> sketched) {
  if (sketched.size() != s.t) throw dimension_error("base sketch: bad sketch length");
  if (s.identity) {
    double sum = 0.0;
    for (double x : sketched) sum += std::abs(x);
    return sum;
  }
  std::vector<double> mags(sketched.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(sketched[i]);
  // median of |standard Cauchy| is 1, no rescaling needed
  return median_inplace(mags);
}

HeavyHitterState hh_build(Rng rng, const HeavyHitterParams& params) {
  if (params.d == 0) throw std::invalid_argument("heavy hitter: d >= 1");
  if (!(params.theta > 0 && params.theta < 1.0 / 3.0) ||
      !(params.delta > 0 && params.delta < 1.0 / 3.0))
    throw std::invalid_argument("heavy hitter: theta, delta in (0, 1/3)");

  HeavyHitterState st;
  st.params = params;

  // Rademacher dimension for l1: B(f; h^{-1}(theta) theta) with h the
  // identity, so B = c_B theta^-4.
  if (params.B_override) {
    st.B = params.B_override;
  } else {
    double b = params.c_B / std::pow(params.theta, 4.0);
    st.B = static_cast<std::size_t>(std::min<double>(b, static_cast<double>(params.B_cap)));
    st.B = std::max<std::size_t>(1, st.B);
  }
  if (params.R_override) {
    st.R = params.R_override;
  } else {
    double r = params.c_R * std::log2(static_cast<double>(params.d) / params.delta);
    st.R = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r)));
  }

  if (params.payload_len > 0) {
    st.t = params.payload_len;
  } else {
    double logd = std::log2(static_cast<double>(params.d) / params.delta);
    double zeta_prime = params.zeta / (static_cast<double>(st.B) * std::max(1.0, logd));
    zeta_prime = std::max(zeta_prime, 1e-12);
    st.base = base_build(rng.derive(0x17), params.m, params.gamma, zeta_prime);
    st.t = st.base.t;
  }

  st.bucket_of.resize(st.R * params.d);
  st.sign_of.resize(st.R * params.d);
  Rng hash = rng.derive(0x29);
  for (std::size_t rep = 0; rep < st.R; ++rep) {
    for (std::size_t i = 0; i < params.d; ++i) {
      st.bucket_of[rep * params.d + i] = static_cast<std::uint32_t>(hash.below(st.B));
      st.sign_of[rep * params.d + i] = (hash.next_u64() & 1) ? 1 : -1;
    }
  }
  st.acc.assign(st.R * st.B * st.t, 0.0);
  return st;
}

void hh_update(HeavyHitterState& st, std::size_t item, std::span<const double> delta_vec) {
  if (item >= st.params.d) throw std::out_of_range("heavy hitter: item out of range");
  if (st.params.payload_len > 0) {
    if (delta_vec.size() != st.t) throw dimension_error("heavy hitter: payload length");
    for (std::size_t rep = 0; rep < st.R; ++rep) {
      double s = st.sign(rep, item);
      auto dst = st.bucket(rep, st.bucket_index(rep, item));
      for (std::size_t k = 0; k < st.t; ++k) dst[k] += s * delta_vec[k];
    }
    return;
  }
  if (delta_vec.size() != st.params.m) throw dimension_error("heavy hitter: m mismatch");
  for (std::size_t rep = 0; rep < st.R; ++rep) {
    double s = st.sign(rep, item);
    auto dst = st.bucket(rep, st.bucket_index(rep, item));
    for (std::size_t j = 0; j < st.params.m; ++j)
      if (delta_vec[j] != 0.0) base_accumulate(st.base, j, s * delta_vec[j], dst);
  }
}

void hh_update(HeavyHitterState& st, std::size_t item, double delta) {
  if (item >= st.params.d) throw std::out_of_range("heavy hitter: item out of range");
  if (st.params.payload_len > 0) {
    if (st.t != 1) throw dimension_error("heavy hitter: scalar update needs t = 1");
    for (std::size_t rep = 0; rep < st.R; ++rep)
      st.bucket(rep, st.bucket_index(rep, item))[0] += st.sign(rep, item) * delta;
    return;
  }
  if (st.params.m != 1) throw dimension_error("heavy hitter: scalar update needs m = 1");
  for (std::size_t rep = 0; rep < st.R; ++rep)
    base_accumulate(st.base, 0, st.sign(rep, item) * delta,
                    st.bucket(rep, st.bucket_index(rep, item)));
}

double hh_query(const HeavyHitterState& st, std::size_t item, const BucketEstimator& est) {
  if (item >= st.params.d) throw std::out_of_range("heavy hitter: item out of range");
  std::vector<double> reps(st.R);
  for (std::size_t rep = 0; rep < st.R; ++rep) {
    auto b = st.bucket(rep, st.bucket_index(rep, item));
    if (est) {
      reps[rep] = est(b);
    } else if (st.params.payload_len > 0) {
      if (st.t != 1)
        throw std::invalid_argument("heavy hitter: payload buckets need an estimator");
      reps[rep] = std::abs(b[0]);
    } else {
      reps[rep] = base_estimate(st.base, b);
    }
  }
  return median_inplace(reps);
}

double hh_query(const HeavyHitterState& st, std::size_t item) {
  return hh_query(st, item, nullptr);
}

std::vector<double> hh_query_all(const HeavyHitterState& st) {
  std::vector<double> out(st.params.d);
  for (std::size_t i = 0; i < st.params.d; ++i) out[i] = hh_query(st, i);
  return out;
}

void hh_merge(HeavyHitterState& into, const HeavyHitterState& other) {
  if (into.acc.size() != other.acc.size())
    throw dimension_error("heavy hitter merge: incompatible states");
  for (std::size_t k = 0; k < into.acc.size(); ++k) into.acc[k] += other.acc[k];
}

}  // namespace l1sketch

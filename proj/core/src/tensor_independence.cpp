#include "l1sketch/tensor_independence.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "l1sketch/common.hpp"

namespace l1sketch {

namespace {

std::size_t ceil_log2(double x) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(std::log2(x) - 1e-9)));
}

double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double cauchy_of_key(std::uint64_t k) {
  double u = (static_cast<double>(detail::mix64(k) >> 11) + 0.5) * 0x1.0p-53;
  return std::tan(3.14159265358979323846 * (u - 0.5));
}

}  // namespace

ModeSchedule make_schedule(std::size_t q, std::size_t d, double eps, double delta,
                           std::size_t K, const TensorCalib& calib) {
  if (q < 1) throw std::invalid_argument("tensor schedule: q >= 1");
  if (d < 2) throw std::invalid_argument("tensor schedule: d >= 2");
  if (K < 2 || (K & (K - 1)) != 0)
    throw std::invalid_argument("tensor schedule: K must be a power of 2, >= 2");
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1))
    throw std::invalid_argument("tensor schedule: eps, delta in (0,1)");

  ModeSchedule s;
  s.q = q;
  s.d = d;
  s.eps = eps;
  s.delta = delta;
  s.K = K;
  s.modes.resize(q);

  Functional f;
  double t_formula_prev = 1.0;
  std::size_t sketch_prev = 1;
  for (std::size_t i = 1; i <= q; ++i) {
    auto& m = s.modes[i - 1];
    // eps_i = alpha^(q-i) eps, shrinking toward the inner modes
    m.eps_i = eps * std::pow(calib.alpha, static_cast<double>(q - i));
    m.N_i = d;
    m.L_i = ceil_log2(static_cast<double>(K) * static_cast<double>(d) / m.eps_i);
    m.L_hat = ceil_log2(static_cast<double>(d));
    if (i == q) {
      m.delta_i = delta;
    } else {
      double di = calib.c_delta *
                  std::pow(m.eps_i / static_cast<double>(m.L_i), calib.c);
      m.delta_i = std::clamp(di, 1e-12, 0.2);
    }
    m.R_i = calib.R_override
                ? calib.R_override
                : std::max<std::size_t>(
                      1, static_cast<std::size_t>(std::ceil(
                             calib.c_R * std::log2(1.0 / m.delta_i))));

    double l3 = std::pow(static_cast<double>(m.L_i), 3.0);
    m.theta = std::min({std::pow(m.eps_i, 3.0) / (180.0 * f.C_f * l3),
                        f.h_inv(calib.alpha * m.eps_i / 3.0),
                        calib.alpha * m.eps_i / 4.0});
    if (calib.theta_override > 0) m.theta = calib.theta_override;
    m.theta = std::min(m.theta, 0.33);
    if (calib.B_override) {
      m.B = calib.B_override;
    } else {
      double b = 8.0 / std::pow(m.theta, 4.0);
      m.B = static_cast<std::size_t>(std::min(b, 1e18));
    }
    double hh_delta = 0.05 / static_cast<double>(m.L_hat + 1);
    m.hh_R = calib.hh_R_override
                 ? calib.hh_R_override
                 : std::max<std::size_t>(
                       1, static_cast<std::size_t>(std::ceil(
                              std::log2(static_cast<double>(d) / hh_delta))));

    m.t_formula = std::pow(static_cast<double>(m.L_i) / m.eps_i, calib.c) *
                  t_formula_prev * std::log2(static_cast<double>(K)) *
                  std::log2(static_cast<double>(K) / m.delta_i);
    t_formula_prev = m.t_formula;

    m.payload_len = sketch_prev;
    m.cells = m.R_i * (m.L_hat + 1) * m.hh_R * m.B;
    double len = static_cast<double>(m.cells) * static_cast<double>(m.payload_len) +
                 static_cast<double>(calib.t_rough);
    if (len > static_cast<double>(calib.max_cells)) {
      throw overflow_error("tensor schedule: mode " + std::to_string(i) +
                           " sketch length " + std::to_string(len) +
                           " exceeds the build guard; shrink the calibration");
    }
    m.sketch_len = static_cast<std::size_t>(len);
    sketch_prev = m.sketch_len;
  }
  return s;
}

TensorState::TensorState(Rng rng, const ModeSchedule& sched, const TensorCalib& calib)
    : sched_(sched), calib_(calib) {
  tables_.resize(sched.q);
  q_flat_.resize(sched.q);
  marginals_.resize(sched.q);
  p_reps_.resize(sched.q);
  for (std::size_t i = 1; i <= sched.q; ++i) {
    const auto& m = sched.modes[i - 1];
    ShhParams sp;
    sp.eps = m.eps_i;
    sp.K = sched.K;
    sp.N = sched.d;
    sp.alpha = calib.alpha;
    sp.theta_override = m.theta;
    sp.B_override = m.B;
    sp.R_override = m.hh_R;
    sp.shrink_windows = calib.shrink_windows;
    sp.payload_len = m.payload_len;
    auto& reps = p_reps_[i - 1];
    reps.reserve(m.R_i);
    for (std::size_t r = 0; r < m.R_i; ++r)
      reps.push_back(shh_build(rng.derive(0x7E00 + (i << 8) + r), sp));
    tables_[i - 1].rough_key = rng.derive(0x9000 + i).next_u64();
    q_flat_[i - 1].assign(m.cells, 0.0);
    marginals_[i - 1].assign(sched.d, 0.0);
  }
  // Only the outermost mode's accumulators are live storage; the inner
  // modes' state objects carry the shared hashing tables, and their bucket
  // images live inside the parent payload vectors.
  rough_top_.assign(calib.t_rough, 0.0);
}

std::uint32_t TensorState::level_of(std::size_t mode, std::size_t rep,
                                    std::uint32_t item) const {
  const auto& st = p_reps_[mode - 1][rep];
  return std::min<std::uint32_t>(st.H.level_of(item),
                                 static_cast<std::uint32_t>(st.derived.L_hat));
}

std::uint32_t TensorState::bucket_of(std::size_t mode, std::size_t rep,
                                     std::size_t level, std::size_t hh_rep,
                                     std::uint32_t item) const {
  return p_reps_[mode - 1][rep].D[level].bucket_index(hh_rep, item);
}

double TensorState::sign_of(std::size_t mode, std::size_t rep, std::size_t level,
                            std::size_t hh_rep, std::uint32_t item) const {
  return p_reps_[mode - 1][rep].D[level].sign(hh_rep, item);
}

double TensorState::rough_coeff(std::size_t mode, std::size_t row,
                                std::span<const std::uint32_t> prefix) const {
  std::uint64_t k = detail::combine(tables_[mode - 1].rough_key, row);
  for (std::uint32_t ix : prefix) k = detail::combine(k, ix);
  return cauchy_of_key(k);
}

std::size_t TensorState::block_offset(std::size_t mode, std::size_t rep,
                                      std::size_t level, std::size_t hh_rep,
                                      std::size_t bucket) const {
  const auto& m = sched_.modes[mode - 1];
  std::size_t level_stride = m.hh_R * m.B * m.payload_len;
  std::size_t rep_stride = (m.L_hat + 1) * level_stride;
  return rep * rep_stride + level * level_stride + (hh_rep * m.B + bucket) * m.payload_len;
}

std::size_t TensorState::rough_offset(std::size_t mode) const {
  const auto& m = sched_.modes[mode - 1];
  return m.cells * m.payload_len;
}

void TensorState::add_increment(std::size_t mode, std::span<double> out,
                                std::span<const std::uint32_t> idx, double delta) {
  if (mode == 0) {
    out[0] += delta;
    return;
  }
  const auto& m = sched_.modes[mode - 1];
  std::uint32_t item = idx[mode - 1];
  for (std::size_t r = 0; r < m.R_i; ++r) {
    std::uint32_t top = level_of(mode, r, item);
    for (std::uint32_t l = 0; l <= top; ++l) {
      for (std::size_t rho = 0; rho < m.hh_R; ++rho) {
        std::uint32_t b = bucket_of(mode, r, l, rho, item);
        double s = sign_of(mode, r, l, rho, item);
        add_increment(mode - 1,
                      out.subspan(block_offset(mode, r, l, rho, b), m.payload_len),
                      idx, s * delta);
      }
    }
  }
  std::size_t ro = rough_offset(mode);
  for (std::size_t row = 0; row < calib_.t_rough; ++row)
    out[ro + row] += delta * rough_coeff(mode, row, idx.subspan(0, mode));
}

void TensorState::update_P(const StreamUpdate& u) {
  if (finished_) throw std::logic_error("tensor state: stream already finished");
  if (u.idx.size() != sched_.q) throw dimension_error("tensor update: tuple arity");
  for (std::size_t j = 0; j < sched_.q; ++j)
    if (u.idx[j] >= sched_.d) throw std::out_of_range("tensor update: index range");

  const auto& m = sched_.modes[sched_.q - 1];
  std::uint32_t item = u.idx[sched_.q - 1];
  for (std::size_t r = 0; r < m.R_i; ++r) {
    auto& st = p_reps_[sched_.q - 1][r];
    std::uint32_t top = level_of(sched_.q, r, item);
    for (std::uint32_t l = 0; l <= top; ++l) {
      auto& hh = st.D[l];
      for (std::size_t rho = 0; rho < m.hh_R; ++rho) {
        std::uint32_t b = hh.bucket_index(rho, item);
        double s = hh.sign(rho, item);
        if (sched_.q == 1) {
          hh.bucket(rho, b)[0] += s * u.delta;
        } else {
          add_increment(sched_.q - 1, hh.bucket(rho, b), u.idx, s * u.delta);
        }
      }
    }
  }
  for (std::size_t row = 0; row < calib_.t_rough; ++row)
    rough_top_[row] += u.delta * rough_coeff(sched_.q, row, u.idx);
  m_ += u.delta;
}

void TensorState::update_Q(const StreamUpdate& u) {
  if (finished_) throw std::logic_error("tensor state: stream already finished");
  if (u.idx.size() != sched_.q) throw dimension_error("tensor update: tuple arity");
  for (std::size_t i = 1; i <= sched_.q; ++i) {
    const auto& m = sched_.modes[i - 1];
    std::uint32_t item = u.idx[i - 1];
    if (item >= sched_.d) throw std::out_of_range("tensor update: index range");
    marginals_[i - 1][item] += u.delta;
    auto& flat = q_flat_[i - 1];
    std::size_t level_stride = m.hh_R * m.B;
    std::size_t rep_stride = (m.L_hat + 1) * level_stride;
    for (std::size_t r = 0; r < m.R_i; ++r) {
      std::uint32_t top = level_of(i, r, item);
      for (std::uint32_t l = 0; l <= top; ++l) {
        for (std::size_t rho = 0; rho < m.hh_R; ++rho) {
          std::uint32_t b = bucket_of(i, r, l, rho, item);
          flat[r * rep_stride + l * level_stride + rho * m.B + b] +=
              sign_of(i, r, l, rho, item) * u.delta;
        }
      }
    }
  }
}

double TensorState::q_bucket_value(std::size_t mode, std::size_t rep, std::size_t level,
                                   std::size_t hh_rep, std::size_t bucket) const {
  const auto& m = sched_.modes[mode - 1];
  std::size_t level_stride = m.hh_R * m.B;
  std::size_t rep_stride = (m.L_hat + 1) * level_stride;
  return q_flat_[mode - 1][rep * rep_stride + level * level_stride + hh_rep * m.B + bucket];
}

void TensorState::fill_rough_product(std::size_t mode, std::span<double> rough_out) const {
  // rough rows of the product P_1^f x ... x P_mode^f need the Cauchy
  // coefficient per tuple; enumerate [d]^mode with an odometer.
  double cap = std::pow(static_cast<double>(sched_.d), static_cast<double>(mode));
  if (cap > 2e7)
    throw overflow_error("tensorize_Q: d^mode exceeds the rough evaluation cap");
  std::vector<std::uint32_t> tup(mode, 0);
  for (;;) {
    double w = 1.0;
    for (std::size_t j = 0; j < mode; ++j) w *= marginals_[j][tup[j]];
    if (w != 0.0) {
      for (std::size_t row = 0; row < calib_.t_rough; ++row)
        rough_out[row] += w * rough_coeff(mode, row, tup);
    }
    std::size_t j = 0;
    for (; j < mode; ++j) {
      if (++tup[j] < sched_.d) break;
      tup[j] = 0;
    }
    if (j == mode) break;
  }
}

std::vector<double> TensorState::tensorize_Q() const {
  if (!finished_) throw std::logic_error("tensorize_Q: stream still open");
  std::vector<double> v{1.0};
  for (std::size_t i = 1; i <= sched_.q; ++i) {
    const auto& m = sched_.modes[i - 1];
    std::vector<double> next(m.sketch_len, 0.0);
    for (std::size_t r = 0; r < m.R_i; ++r)
      for (std::size_t l = 0; l <= m.L_hat; ++l)
        for (std::size_t rho = 0; rho < m.hh_R; ++rho)
          for (std::size_t b = 0; b < m.B; ++b) {
            double a = q_bucket_value(i, r, l, rho, b);
            if (a == 0.0) continue;
            std::size_t off = block_offset(i, r, l, rho, b);
            for (std::size_t k = 0; k < v.size(); ++k) next[off + k] += a * v[k];
          }
    fill_rough_product(i, std::span<double>(next).subspan(rough_offset(i)));
    v = std::move(next);
  }
  return v;
}

std::vector<double> TensorState::flatten_P() const {
  const auto& m = sched_.modes[sched_.q - 1];
  std::vector<double> out(m.sketch_len, 0.0);
  for (std::size_t r = 0; r < m.R_i; ++r) {
    const auto& st = p_reps_[sched_.q - 1][r];
    for (std::size_t l = 0; l <= m.L_hat; ++l) {
      std::size_t off = block_offset(sched_.q, r, l, 0, 0);
      const auto& acc = st.D[l].acc;
      std::memcpy(out.data() + off, acc.data(), acc.size() * sizeof(double));
    }
  }
  std::memcpy(out.data() + rough_offset(sched_.q), rough_top_.data(),
              calib_.t_rough * sizeof(double));
  return out;
}

double TensorState::decode_span(std::size_t mode, std::span<const double> sketch,
                                Rng zeta_rng) const {
  const auto& m = sched_.modes[mode - 1];
  if (sketch.size() != m.sketch_len) throw dimension_error("decode_span: bad length");

  std::vector<double> mags(calib_.t_rough);
  auto rough = sketch.subspan(rough_offset(mode), calib_.t_rough);
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(rough[i]);
  double m_hat = 2.0 * median_inplace(mags);
  if (m_hat == 0.0) return 0.0;

  std::size_t k_top = std::min<std::size_t>(calib_.K_decode, sched_.K);
  double best = 0.0;
  std::size_t grid_pos = 0;
  for (std::size_t k = 2; k <= k_top; k *= 2, ++grid_pos) {
    std::vector<double> reps(m.R_i);
    for (std::size_t r = 0; r < m.R_i; ++r) {
      // materialize this repetition's view of the sketch as a scalar state
      ShhState st = p_reps_[mode - 1][r];
      for (std::size_t l = 0; l <= m.L_hat; ++l) {
        std::size_t off = block_offset(mode, r, l, 0, 0);
        auto& acc = st.D[l].acc;
        std::copy_n(sketch.data() + off, acc.size(), acc.begin());
      }
      BucketEstimator est;
      if (mode > 1) {
        Rng inner = zeta_rng.derive(0xD0 + grid_pos * 64 + r);
        auto counter = std::make_shared<std::uint64_t>(0);
        est = [this, mode, inner, counter](std::span<const double> b) {
          return decode_span(mode - 1, b, inner.derive(++*counter));
        };
      }
      reps[r] = shh_estimate(st, m_hat, k, zeta_rng.derive(0x30 + grid_pos * 64 + r), est);
    }
    best = std::max(best, median_inplace(reps));
  }
  return best;
}

double TensorState::decode(std::size_t mode, Rng zeta_rng) const {
  if (mode != sched_.q)
    throw std::invalid_argument("decode: only the outermost mode has standalone storage");
  return decode_span(mode, flatten_P(), zeta_rng);
}

double TensorState::estimate_tvd(Rng zeta_rng) const {
  if (!finished_) throw std::logic_error("estimate_tvd: stream still open");
  if (!(m_ > 0)) throw std::invalid_argument("estimate_tvd: empty stream (m = 0)");

  std::vector<double> combined = flatten_P();
  double scale_p = std::pow(m_, static_cast<double>(sched_.q) - 1.0);
  std::vector<double> qv = tensorize_Q();
  for (std::size_t k = 0; k < combined.size(); ++k)
    combined[k] = scale_p * combined[k] - qv[k];
  double est = decode_span(sched_.q, combined, zeta_rng);
  return est / std::pow(m_, static_cast<double>(sched_.q));
}

std::size_t TensorState::accumulator_count() const {
  std::size_t total = sched_.modes[sched_.q - 1].sketch_len;
  for (std::size_t i = 0; i < sched_.q; ++i)
    total += q_flat_[i].size() + marginals_[i].size();
  return total;
}

TensorState build_tensor_state(Rng rng, std::size_t q, std::size_t d, double eps,
                               double delta, std::size_t K, const TensorCalib& calib) {
  return TensorState(rng, make_schedule(q, d, eps, delta, K, calib), calib);
}

}  // namespace l1sketch

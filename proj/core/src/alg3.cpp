#include "alg3.hpp"

#include <algorithm>
#include <cmath>

namespace l1sketch::detail {

void LevelTable::finalize() {
  prefix.resize(vals.size());
  for (std::size_t l = 0; l < vals.size(); ++l) {
    std::sort(vals[l].begin(), vals[l].end());
    prefix[l].assign(vals[l].size() + 1, 0.0);
    for (std::size_t k = 0; k < vals[l].size(); ++k)
      prefix[l][k + 1] = prefix[l][k] + vals[l][k];
  }
}

namespace {

struct WindowSum {
  std::size_t count = 0;
  double sum = 0;
};

// Sum and count of the top-`cap` estimates at a level that fall inside the
// window; `half_open` selects (lo, hi], the closed variant is [lo, hi].
WindowSum window_sum(const std::vector<double>& vals, const std::vector<double>& prefix,
                     std::size_t cap, double lo, double hi, bool half_open) {
  std::size_t start = vals.size() > cap ? vals.size() - cap : 0;
  auto first = half_open ? std::upper_bound(vals.begin(), vals.end(), lo)
                         : std::lower_bound(vals.begin(), vals.end(), lo);
  auto last = std::upper_bound(vals.begin(), vals.end(), hi);
  std::size_t i0 = std::max<std::size_t>(start, first - vals.begin());
  std::size_t i1 = std::max<std::size_t>(start, last - vals.begin());
  if (i1 <= i0) return {};
  return {i1 - i0, prefix[i1] - prefix[i0]};
}

}  // namespace

double algorithm3(const LevelTable& table, const Alg3Opts& opt, double M_hat,
                  std::size_t K, double zeta_uniform, ShhEstimateTrace* trace) {
  const double eps = opt.eps;
  const std::size_t L = static_cast<std::size_t>(std::ceil(
      std::log2(static_cast<double>(K) * static_cast<double>(opt.N) / eps) - 1e-9));
  double j0_raw =
      std::log2(opt.c_top * static_cast<double>(K) * std::pow(static_cast<double>(L), 3.0) /
                std::pow(eps, 3.0));
  const std::size_t j0 = static_cast<std::size_t>(
      std::min(300.0, std::max(0.0, std::ceil(j0_raw - 1e-12))));
  const std::size_t top_count = static_cast<std::size_t>(std::min(
      1e18, std::ceil(opt.c_top * std::pow(static_cast<double>(L), 3.0) /
                      std::pow(eps, 3.0))));

  const double zeta = 0.5 + 0.5 * zeta_uniform;
  if (trace) {
    trace->zeta_draw = zeta;
    trace->j0 = j0;
    trace->levels.clear();
  }

  const double win_lo = opt.shrink ? (1.0 + eps) : 1.0;
  const double win_hi = opt.shrink ? (2.0 - eps) : 2.0;

  // survivor-count bracket for the deep bands
  const double l2e2 = std::pow(static_cast<double>(L) / eps, 2.0);
  const double root20 = std::sqrt(20.0) * eps;
  const double s_lo = std::max(1.0, (1.0 - root20) * l2e2);
  const double s_hi = 2.0 * (1.0 + root20) * l2e2;

  double total = 0.0;
  for (std::size_t j = 0; j <= j0; ++j) {
    double t_j = zeta * M_hat / std::exp2(static_cast<double>(j));
    if (t_j == 0.0) break;
    auto ws = window_sum(table.vals[0], table.prefix[0], top_count, win_lo * t_j,
                         win_hi * t_j, !opt.shrink);
    total += ws.sum;
    if (trace && ws.count)
      trace->levels.push_back({j, ws.sum, -1, ws.count});
  }
  for (std::size_t j = j0 + 1; j <= L; ++j) {
    double t_j = zeta * M_hat / std::exp2(static_cast<double>(j));
    if (t_j == 0.0) break;
    double m_j = 0.0;
    int used = -1;
    std::size_t survivors = 0;
    for (std::size_t li = table.vals.size(); li-- > 0;) {  // biggest l first
      auto ws = window_sum(table.vals[li], table.prefix[li], top_count, win_lo * t_j,
                           win_hi * t_j, !opt.shrink);
      if (static_cast<double>(ws.count) >= s_lo && static_cast<double>(ws.count) <= s_hi) {
        m_j = ws.sum * std::exp2(static_cast<double>(li));
        used = static_cast<int>(li);
        survivors = ws.count;
        break;
      }
    }
    total += m_j;
    if (trace && used >= 0)
      trace->levels.push_back({j, m_j, used, survivors});
  }
  return total;
}

}  // namespace l1sketch::detail

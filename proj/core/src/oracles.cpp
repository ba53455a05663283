#include "l1sketch/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "l1sketch/common.hpp"
#include "l1sketch/samplers.hpp"
#include "l1sketch/tensor_independence.hpp"

namespace l1sketch {

double exact_tvd(std::span<const double> counts, std::size_t q, std::size_t d,
                 double m) {
  double cells = std::pow(static_cast<double>(d), static_cast<double>(q));
  if (cells > 1e7) throw std::invalid_argument("exact_tvd: d^q exceeds the 1e7 cap");
  std::size_t total = static_cast<std::size_t>(cells);
  if (counts.size() != total) throw dimension_error("exact_tvd: counts size != d^q");
  if (!(m > 0)) throw std::invalid_argument("exact_tvd: m > 0");

  // marginals
  std::vector<std::vector<double>> marg(q, std::vector<double>(d, 0.0));
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (counts[flat] == 0.0) continue;
    std::size_t rest = flat;
    for (std::size_t j = q; j-- > 0;) {
      marg[j][rest % d] += counts[flat];
      rest /= d;
    }
  }
  double sum = 0.0, comp = 0.0;
  double inv_m = 1.0 / m;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double prod = 1.0;
    std::size_t rest = flat;
    for (std::size_t j = q; j-- > 0;) {
      prod *= marg[j][rest % d] * inv_m;
      rest /= d;
    }
    double term = std::abs(counts[flat] * inv_m - prod);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

DistortionReport empirical_distortion(const LinearOp& op, const DenseMatrix& a,
                                      std::size_t directions, DirectionMode mode,
                                      Rng rng, double net_eps) {
  DistortionReport rep;
  std::size_t d = a.cols;

  std::vector<std::vector<double>> xs;
  switch (mode) {
    case DirectionMode::coordinate:
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> x(d, 0.0);
        x[j] = 1.0;
        xs.push_back(std::move(x));
      }
      break;
    case DirectionMode::gaussian:
      for (std::size_t k = 0; k < directions; ++k) {
        std::vector<double> x(d);
        for (auto& xi : x) xi = rng.gaussian();
        xs.push_back(std::move(x));
      }
      break;
    case DirectionMode::sparse:
      for (std::size_t k = 0; k < directions; ++k) {
        std::vector<double> x(d, 0.0);
        std::size_t nz = 1 + rng.below(std::max<std::size_t>(1, d / 2));
        for (std::size_t z = 0; z < nz; ++z) x[rng.below(d)] = rng.sign();
        xs.push_back(std::move(x));
      }
      break;
    case DirectionMode::net_tiny: {
      if (d > 3) throw std::invalid_argument("net_tiny directions need d <= 3");
      // deterministic grid over the l1 coefficient sphere
      int steps = std::max(2, static_cast<int>(std::ceil(2.0 / net_eps)));
      for (int i = -steps; i <= steps; ++i) {
        if (d == 1) {
          if (i != 0) xs.push_back({static_cast<double>(i)});
          continue;
        }
        for (int j = -steps; j <= steps; ++j) {
          if (d == 2) {
            if (i || j) xs.push_back({static_cast<double>(i), static_cast<double>(j)});
            continue;
          }
          for (int k = -steps; k <= steps; ++k)
            if (i || j || k)
              xs.push_back({static_cast<double>(i), static_cast<double>(j),
                            static_cast<double>(k)});
        }
      }
      break;
    }
  }

  for (auto& x : xs) {
    auto ax = matvec(a, x);
    double denom = l1_norm(std::span<const double>(ax));
    if (denom == 0.0) {
      ++rep.skipped;
      continue;
    }
    auto sax = op(ax);
    rep.ratios.push_back(l1_norm(std::span<const double>(sax)) / denom);
  }
  rep.directions = xs.size();
  if (!rep.ratios.empty()) {
    auto sorted = rep.ratios;
    std::sort(sorted.begin(), sorted.end());
    rep.min_ratio = sorted.front();
    rep.max_ratio = sorted.back();
    rep.median_ratio = median_of(rep.ratios);
  }
  return rep;
}

double mc_boundary_lemma(Rng rng, double a, double b, double delta_prime, double t,
                         std::size_t trials) {
  if (!(a > 0 && a < 1 && b > 1)) throw std::invalid_argument("boundary lemma: 0<a<1<b");
  double log2_Bp = std::log2(b / a) / delta_prime;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    double u = rng.uniform();
    double pt = std::exp2(-u * log2_Bp) * t;
    if (pt >= a && pt <= b) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

RademacherCheck mc_rademacher_l1(Rng rng, std::size_t s, std::size_t d, double delta,
                                 std::size_t trials) {
  RademacherCheck out;
  double bound = static_cast<double>(d) *
                 std::sqrt(0.5 * std::log(2.0 * static_cast<double>(d) / delta)) *
                 std::sqrt(static_cast<double>(s));
  std::size_t violations = 0;
  std::vector<double> acc(d);
  for (std::size_t t = 0; t < trials; ++t) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < s; ++i) {
      // random unit-l1 vector: exponential profile normalized
      std::vector<double> x(d);
      double norm = 0.0;
      for (auto& xi : x) {
        xi = rng.sign() * rng.exponential();
        norm += std::abs(xi);
      }
      double sgn = rng.sign();
      for (std::size_t j = 0; j < d; ++j) acc[j] += sgn * x[j] / norm;
    }
    if (l1_norm(std::span<const double>(acc)) > bound) ++violations;
  }
  out.violation_rate = static_cast<double>(violations) / static_cast<double>(trials);
  out.bound = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
  out.pass = out.violation_rate <= out.bound;
  return out;
}

DenseMatrix gen_hard_iid_instance(Rng rng, HardDesign kind, std::size_t n,
                                  std::size_t d, double p) {
  if (kind == HardDesign::cauchy_design) return cauchy_matrix(rng, n, d);
  DenseMatrix a(n, d);
  for (auto& x : a.data) x = sample_stable_one(rng, p);
  return a;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double welch_t_pvalue(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch: need >= 2 samples");
  auto mean_var = [](std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>{mean, var};
  };
  auto [ma, va] = mean_var(a);
  auto [mb, vb] = mean_var(b);
  double se = std::sqrt(va / static_cast<double>(a.size()) +
                        vb / static_cast<double>(b.size()));
  if (se == 0.0) return ma == mb ? 1.0 : 0.0;
  double t = (ma - mb) / se;
  // normal approximation; the suites use ~50 samples per arm
  return 2.0 * (1.0 - normal_cdf(std::abs(t)));
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return worst;
}

double stable_cdf(double p, double x) {
  // F(x) = 1/2 + (1/pi) int_0^inf sin(tx) e^{-t^p} / t dt, trapezoid over a
  // truncated range; the integrand decays like e^{-t^p}.
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - stable_cdf(p, -x);
  double upper = std::pow(40.0, 1.0 / p);  // e^{-40} tail
  // resolve the sin(tx) oscillation
  std::size_t steps = static_cast<std::size_t>(
      std::max(20000.0, 40.0 * upper * x / std::numbers::pi));
  steps = std::min<std::size_t>(steps, 4000000);
  double h = upper / static_cast<double>(steps);
  double sum = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = h * static_cast<double>(k);
    double f = (t == 0.0) ? x : std::sin(t * x) * std::exp(-std::pow(t, p)) / t;
    sum += (k == 0 || k == steps) ? 0.5 * f : f;
  }
  double integral = sum * h;
  return std::clamp(0.5 + integral / std::numbers::pi, 0.0, 1.0);
}

double binomial_ci3(double p_hat, std::size_t trials) {
  return 3.0 * std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) /
                         static_cast<double>(trials));
}

}  // namespace l1sketch

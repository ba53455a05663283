#include "l1sketch/iid_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "l1sketch/common.hpp"
#include "l1sketch/countsketch.hpp"
#include "l1sketch/oracles.hpp"

namespace l1sketch {

const char* iid_method_name(IIDMethod m) {
  switch (m) {
    case IIDMethod::countsketch_p_lt_1: return "countsketch_p_lt_1";
    case IIDMethod::countsketch_p_eq_1: return "countsketch_p_eq_1";
    case IIDMethod::sample_scale_p12: return "sample_scale_p12";
    case IIDMethod::countsketch_p12: return "countsketch_p12";
    case IIDMethod::uniform_sample_p_ge_2: return "uniform_sample_p_ge_2";
  }
  return "?";
}

std::size_t p_ge_2_row_count(double p, std::size_t d, double eps, double calibration) {
  double a = std::pow(eps, -p);
  double b = std::pow(static_cast<double>(d), 1.5 + 1.0 / p) / eps *
             std::max(1.0, std::log2(1.0 / eps));
  double r = calibration * std::max(a, std::pow(b, p / (p - 1.0)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r)));
}

IIDEmbeddingPlan plan_embedding(double p, std::size_t n, std::size_t d, std::size_t r,
                                bool strict, double eps) {
  if (!(p > 0)) throw std::invalid_argument("plan_embedding: p > 0");
  if (r > n) throw std::invalid_argument("plan_embedding: r <= n");
  if (r == 0 || d == 0) throw std::invalid_argument("plan_embedding: r, d >= 1");

  IIDEmbeddingPlan plan;
  plan.p = p;
  plan.n = n;
  plan.d = d;
  plan.r = r;

  double dd = static_cast<double>(d);
  double nn = static_cast<double>(n);
  double logd = std::max(1.0, std::log2(dd));

  if (p < 1.0) {
    plan.method = IIDMethod::countsketch_p_lt_1;
    plan.scale = 1.0;
    double need = dd * dd * logd * logd;
    if (strict && static_cast<double>(r) < need)
      throw std::invalid_argument("plan_embedding: p<1 needs r >= d^2 log^2 d = " +
                                  std::to_string(need));
  } else if (p == 1.0) {
    plan.method = IIDMethod::countsketch_p_eq_1;
    plan.scale = 1.0;
    double lo = std::pow(dd * logd, 2.0);
    double hi = std::sqrt(nn) / 4.0;  // desk-scale stand-in for r = o(sqrt n)
    if (strict && (static_cast<double>(r) < lo || static_cast<double>(r) > hi))
      throw std::invalid_argument("plan_embedding: p=1 needs (d log d)^2 <= r <= sqrt(n)/4, got r = " +
                                  std::to_string(r));
  } else if (p < 2.0) {
    double left = std::pow(nn, 1.0 - 1.0 / p);
    double right = std::pow(dd, 1.0 / p) * logd;
    if (left >= right) {  // ties resolve to the sampling method
      plan.method = IIDMethod::sample_scale_p12;
      plan.kappa_n = 1.0 + right / left;
      plan.scale = plan.kappa_n * std::pow(dd, 1.0 - 1.0 / p) * nn / static_cast<double>(r);
    } else {
      plan.method = IIDMethod::countsketch_p12;
      plan.scale = 1.0;
      double need = dd * dd * logd;
      if (strict && static_cast<double>(r) < need)
        throw std::invalid_argument("plan_embedding: p in (1,2) CountSketch needs r >= d^2 log d");
    }
  } else {
    plan.method = IIDMethod::uniform_sample_p_ge_2;
    plan.scale = nn / static_cast<double>(r);
    if (strict) {
      std::size_t need = p_ge_2_row_count(p, d, eps);
      if (r < need)
        throw std::invalid_argument("plan_embedding: p>=2 needs r >= " + std::to_string(need));
    }
  }
  return plan;
}

namespace {

// r distinct rows by partial Fisher-Yates.
std::vector<std::uint32_t> sample_rows(Rng& rng, std::size_t n, std::size_t r) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  for (std::size_t k = 0; k < r; ++k) {
    std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(ids[k], ids[j]);
  }
  ids.resize(r);
  return ids;
}

}  // namespace

DenseMatrix apply_plan(const IIDEmbeddingPlan& plan, Rng rng, const DenseMatrix& a) {
  if (a.rows != plan.n || a.cols != plan.d)
    throw dimension_error("apply_plan: matrix does not match the plan");
  switch (plan.method) {
    case IIDMethod::countsketch_p_lt_1:
    case IIDMethod::countsketch_p_eq_1:
    case IIDMethod::countsketch_p12: {
      auto cs = build_countsketch(rng.derive(0xC5), plan.r, plan.n);
      return apply_matrix(cs, a);
    }
    case IIDMethod::sample_scale_p12:
    case IIDMethod::uniform_sample_p_ge_2: {
      Rng rows_rng = rng.derive(0x5A);
      auto rows = sample_rows(rows_rng, plan.n, plan.r);
      DenseMatrix out(plan.r, plan.d);
      for (std::size_t k = 0; k < plan.r; ++k)
        for (std::size_t j = 0; j < plan.d; ++j)
          out.at(k, j) = plan.scale * a.at(rows[k], j);
      return out;
    }
  }
  throw std::logic_error("apply_plan: unreachable");
}

IIDDistortionSummary empirical_distortion_iid(Rng rng, double p, std::size_t n,
                                              std::size_t d, std::size_t r,
                                              std::size_t trials,
                                              std::size_t directions, double eps) {
  IIDDistortionSummary out;
  out.trials = trials;
  out.directions = directions;
  auto plan = plan_embedding(p, n, d, r, /*strict=*/false, eps);

  PowerLawSpec spec;
  spec.p = p;

  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial = rng.derive(0xA000 + t);
    Rng a_rng = trial.derive(1);
    DenseMatrix a = power_law_matrix(a_rng, spec, n, d);
    DenseMatrix sa = apply_plan(plan, trial.derive(2), a);
    Rng dir = trial.derive(3);
    for (std::size_t k = 0; k < directions; ++k) {
      std::vector<double> x(d, 0.0);
      if (k < d) {
        x[k] = 1.0;  // coordinate directions first
      } else if (k % 3 == 0) {
        std::size_t nz = 1 + dir.below(std::max<std::size_t>(1, d / 2));
        for (std::size_t z = 0; z < nz; ++z) x[dir.below(d)] = dir.sign();
      } else {
        for (auto& xi : x) xi = dir.gaussian();
      }
      auto ax = matvec(a, x);
      double denom = l1_norm(std::span<const double>(ax));
      if (denom == 0.0) continue;
      auto sax = matvec(sa, x);
      out.ratios.push_back(l1_norm(std::span<const double>(sax)) / denom);
    }
  }
  if (!out.ratios.empty()) {
    auto sorted = out.ratios;
    std::sort(sorted.begin(), sorted.end());
    out.min_ratio = sorted.front();
    out.max_ratio = sorted.back();
    out.median_ratio = median_of(out.ratios);
  }
  return out;
}

}  // namespace l1sketch

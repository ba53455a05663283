#include "l1sketch/samplers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "l1sketch/common.hpp"

namespace l1sketch {

std::vector<double> sample_cauchy(Rng& rng, std::size_t count) {
  std::vector<double> out(count);
  for (auto& x : out) x = rng.cauchy();
  return out;
}

std::vector<double> sample_gaussian(Rng& rng, std::size_t count) {
  std::vector<double> out(count);
  for (auto& x : out) x = rng.gaussian();
  return out;
}

double sample_stable_one(Rng& rng, double p) {
  // Chambers-Mallows-Stuck for the symmetric case.
  double theta = std::numbers::pi * (rng.uniform_pos() - 0.5);
  double w = rng.exponential();
  if (p == 1.0) return std::tan(theta);
  double s = std::sin(p * theta) / std::pow(std::cos(theta), 1.0 / p);
  double c = std::pow(std::cos((1.0 - p) * theta) / w, (1.0 - p) / p);
  return s * c;
}

double sample_power_law_one(Rng& rng, const PowerLawSpec& spec) {
  if (spec.stable) return spec.scale * sample_stable_one(rng, spec.p);
  // Two-sided Pareto by inverse CDF: |X| = scale * U^{-1/p}.
  double mag = spec.scale * std::pow(rng.uniform_pos(), -1.0 / spec.p);
  return spec.symmetric ? rng.sign() * mag : mag;
}

std::vector<double> sample_power_law(Rng& rng, const PowerLawSpec& spec,
                                     std::size_t count) {
  if (!(spec.p > 0)) throw std::invalid_argument("power law index p must be positive");
  if (!(spec.scale > 0)) throw std::invalid_argument("power law scale must be positive");
  if (spec.stable && !(spec.p <= 2.0))
    throw std::invalid_argument("stable draws require p in (0,2]");
  std::vector<double> out(count);
  for (auto& x : out) x = sample_power_law_one(rng, spec);
  return out;
}

DenseMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix a(rows, cols);
  for (auto& x : a.data) x = rng.gaussian();
  return a;
}

DenseMatrix cauchy_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix a(rows, cols);
  for (auto& x : a.data) x = rng.cauchy();
  return a;
}

DenseMatrix power_law_matrix(Rng& rng, const PowerLawSpec& spec, std::size_t rows,
                             std::size_t cols) {
  if (!(spec.p > 0)) throw std::invalid_argument("power law index p must be positive");
  DenseMatrix a(rows, cols);
  for (auto& x : a.data) x = sample_power_law_one(rng, spec);
  return a;
}

}  // namespace l1sketch

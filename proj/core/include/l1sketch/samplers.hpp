#pragma once

#include <cstddef>
#include <vector>

#include "l1sketch/matrix.hpp"
#include "l1sketch/rng.hpp"

namespace l1sketch {

// Symmetric power-law family: Pr(|X| > t) = (t/scale)^{-p} for t >= scale.
// The tail index is what the embeddings in iid_design care about; the body
// (two-sided Pareto) is a free choice. For p in (0,2) a p-stable variant is
// available via Chambers-Mallows-Stuck.
struct PowerLawSpec {
  double p = 1.0;
  double scale = 1.0;
  bool symmetric = true;
  bool stable = false;  // draw from the p-stable law instead of Pareto
};

std::vector<double> sample_cauchy(Rng& rng, std::size_t count);
std::vector<double> sample_gaussian(Rng& rng, std::size_t count);

// Rejects p <= 0; stable=true additionally requires p in (0,2].
std::vector<double> sample_power_law(Rng& rng, const PowerLawSpec& spec,
                                     std::size_t count);

double sample_power_law_one(Rng& rng, const PowerLawSpec& spec);

// Single draw from a standard symmetric p-stable law (CMS method);
// p=1 reduces to standard Cauchy, p=2 to N(0,2).
double sample_stable_one(Rng& rng, double p);

DenseMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols);
DenseMatrix cauchy_matrix(Rng& rng, std::size_t rows, std::size_t cols);
DenseMatrix power_law_matrix(Rng& rng, const PowerLawSpec& spec, std::size_t rows,
                             std::size_t cols);

}  // namespace l1sketch

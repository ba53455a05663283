#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l1sketch/matrix.hpp"
#include "l1sketch/rng.hpp"

namespace l1sketch {

// One random +-1 per input coordinate, hashed into one of r buckets: the
// r x n matrix has exactly one nonzero per column. Tables are materialized
// from the generator so streaming replay is deterministic.
struct CountSketchOp {
  std::size_t r = 0;
  std::size_t n = 0;
  std::vector<std::uint32_t> bucket_of;  // [n] -> [r]
  std::vector<std::int8_t> sign_of;      // [n] -> {-1,+1}
};

// bucket_of(i) uniform in [r], sign_of(i) uniform +-1, independent across i.
CountSketchOp build_countsketch(Rng rng, std::size_t r, std::size_t n);

// out[b] = sum_{i : bucket_of(i)=b} sign_of(i) * v[i]; O(nnz(v)).
void apply(const CountSketchOp& op, std::span<const double> v, std::span<double> out);
std::vector<double> apply(const CountSketchOp& op, std::span<const double> v);

// Column-wise application, O(nnz(A)) arithmetic. flops, when given, receives
// the multiply-add count (<= 2 nnz(A)).
DenseMatrix apply_matrix(const CountSketchOp& op, const DenseMatrix& a,
                         std::size_t* flops = nullptr);

}  // namespace l1sketch

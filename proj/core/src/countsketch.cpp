#include "l1sketch/countsketch.hpp"

#include <stdexcept>

#include "l1sketch/common.hpp"

namespace l1sketch {

CountSketchOp build_countsketch(Rng rng, std::size_t r, std::size_t n) {
  if (r == 0 || n == 0) throw std::invalid_argument("countsketch: r and n must be >= 1");
  if (r > (std::size_t{1} << 31)) throw std::invalid_argument("countsketch: r too large");
  CountSketchOp op;
  op.r = r;
  op.n = n;
  op.bucket_of.resize(n);
  op.sign_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.bucket_of[i] = static_cast<std::uint32_t>(rng.below(r));
    op.sign_of[i] = (rng.next_u64() & 1) ? 1 : -1;
  }
  return op;
}

void apply(const CountSketchOp& op, std::span<const double> v, std::span<double> out) {
  if (v.size() != op.n) throw dimension_error("countsketch apply: v.len != n");
  if (out.size() != op.r) throw dimension_error("countsketch apply: out.len != r");
  for (auto& x : out) x = 0.0;
  for (std::size_t i = 0; i < op.n; ++i) {
    double x = v[i];
    if (x != 0.0) out[op.bucket_of[i]] += op.sign_of[i] * x;
  }
}

std::vector<double> apply(const CountSketchOp& op, std::span<const double> v) {
  std::vector<double> out(op.r, 0.0);
  apply(op, v, out);
  return out;
}

DenseMatrix apply_matrix(const CountSketchOp& op, const DenseMatrix& a,
                         std::size_t* flops) {
  if (a.rows != op.n) throw dimension_error("countsketch apply_matrix: A.rows != n");
  DenseMatrix out(op.r, a.cols);
  std::size_t ops = 0;
  for (std::size_t i = 0; i < op.n; ++i) {
    double s = op.sign_of[i];
    double* dst = out.data.data() + op.bucket_of[i] * a.cols;
    const double* src = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (src[j] != 0.0) {
        dst[j] += s * src[j];
        ops += 2;
      }
    }
  }
  if (flops) *flops = ops;
  return out;
}

}  // namespace l1sketch

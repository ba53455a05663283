#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "l1sketch/common.hpp"

namespace l1sketch {

// Row-major dense matrix of 64-bit floats.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  std::vector<double> col(std::size_t j) const;
};

DenseMatrix identity(std::size_t n);

// Compensated (Kahan) sum of absolute values.
double l1_norm(std::span<const double> v);
double l1_norm(const DenseMatrix& a);

// y = A x
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);

// Binary layout: two 64-bit little-endian counts (rows, cols) followed by
// rows*cols 64-bit little-endian floats, row-major.
void write_matrix_binary(const DenseMatrix& a, const std::string& path);
DenseMatrix read_matrix_binary(const std::string& path);

// One row per line, comma-separated.
DenseMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const DenseMatrix& a, const std::string& path);

}  // namespace l1sketch

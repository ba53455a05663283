#include "l1sketch/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace l1sketch {

std::vector<double> DenseMatrix::col(std::size_t j) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
  return out;
}

DenseMatrix identity(std::size_t n) {
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;
  return a;
}

double l1_norm(std::span<const double> v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    double a = std::abs(x);
    double y = a - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double l1_norm(const DenseMatrix& a) { return l1_norm(std::span<const double>(a.data)); }

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols) throw dimension_error("matvec: size mismatch");
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.data.data() + i * a.cols;
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

namespace {

void put_u64(std::ofstream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>((v >> (8 * k)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::ifstream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  return v;
}

}  // namespace

void write_matrix_binary(const DenseMatrix& a, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  put_u64(os, a.rows);
  put_u64(os, a.cols);
  // entries are serialized via their bit pattern, little-endian
  for (double x : a.data) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(os, bits);
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

DenseMatrix read_matrix_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  DenseMatrix a;
  a.rows = get_u64(is);
  a.cols = get_u64(is);
  if (!is || a.rows * a.cols > (std::size_t{1} << 32))
    throw std::runtime_error("bad matrix header: " + path);
  a.data.resize(a.rows * a.cols);
  for (auto& x : a.data) {
    std::uint64_t bits = get_u64(is);
    std::memcpy(&x, &bits, 8);
  }
  if (!is) throw std::runtime_error("truncated matrix file: " + path);
  return a;
}

DenseMatrix read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw parse_error("bad CSV cell '" + cell + "'", lineno);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error("ragged CSV row", lineno);
    rows.push_back(std::move(row));
  }
  DenseMatrix a(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < a.cols; ++j) a.at(i, j) = rows[i][j];
  return a;
}

void write_matrix_csv(const DenseMatrix& a, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  char buf[40];
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a.at(i, j));
      os << buf << (j + 1 < a.cols ? "," : "");
    }
    os << "\n";
  }
}

}  // namespace l1sketch

#include "l1sketch/stream_io.hpp"

#include <fstream>
#include <sstream>

namespace l1sketch {

namespace {

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::vector<std::pair<std::uint64_t, double>> parse_l1_stream(const std::string& path,
                                                              std::uint64_t n) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::vector<std::pair<std::uint64_t, double>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    long long i = 0;
    double delta = 0;
    if (!(ss >> i >> delta)) throw parse_error("expected 'i delta'", lineno);
    std::string extra;
    if (ss >> extra) throw parse_error("trailing tokens", lineno);
    if (i < 1 || static_cast<std::uint64_t>(i) > n)
      throw parse_error("coordinate out of range [1," + std::to_string(n) + "]", lineno);
    out.emplace_back(static_cast<std::uint64_t>(i - 1), delta);
  }
  return out;
}

std::vector<StreamUpdate> parse_tuple_stream(const std::string& path, std::size_t q,
                                             std::size_t d) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::vector<StreamUpdate> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    std::vector<double> tokens;
    double v;
    while (ss >> v) tokens.push_back(v);
    if (!ss.eof()) throw parse_error("non-numeric token", lineno);
    if (tokens.size() != q && tokens.size() != q + 1)
      throw parse_error("expected q or q+1 fields (q = " + std::to_string(q) + ")", lineno);
    StreamUpdate u;
    u.idx.resize(q);
    for (std::size_t j = 0; j < q; ++j) {
      double ix = tokens[j];
      if (ix < 1 || ix > static_cast<double>(d) || ix != std::floor(ix))
        throw parse_error("index out of range [1," + std::to_string(d) + "]", lineno);
      u.idx[j] = static_cast<std::uint32_t>(ix) - 1;
    }
    u.delta = tokens.size() == q + 1 ? tokens[q] : 1.0;
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace l1sketch

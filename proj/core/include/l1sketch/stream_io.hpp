#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "l1sketch/common.hpp"
#include "l1sketch/tensor_independence.hpp"

namespace l1sketch {

// Text stream "i delta" per line: 1-based coordinate, signed integer delta.
// Blank lines and '#' comments are skipped.
std::vector<std::pair<std::uint64_t, double>> parse_l1_stream(const std::string& path,
                                                              std::uint64_t n);

// Text stream "i1 i2 ... iq" (delta=+1 implied) or "i1 ... iq delta" per
// line, indices 1-based in [d]. Throws parse_error with the line number.
std::vector<StreamUpdate> parse_tuple_stream(const std::string& path, std::size_t q,
                                             std::size_t d);

}  // namespace l1sketch

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace l1sketch {

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a + kGamma * (b + 0x632be59bd9b4e019ULL));
}

}  // namespace detail

// Counter-based generator keyed by (seed, stream-id). Equal keys give
// bit-identical sequences on every platform; disjoint stream-ids give
// independent streams, which is how each sketch component gets its own
// randomness from one experiment seed.
class Rng {
 public:
  Rng() = default;
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::combine(detail::mix64(seed + detail::kGamma), stream)) {}

  // Child generator for a labelled subcomponent; independent of the parent's
  // own output sequence.
  Rng derive(std::uint64_t substream) const {
    Rng r;
    r.key_ = detail::combine(key_, substream ^ 0xa5a5a5a5a5a5a5a5ULL);
    return r;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + detail::kGamma * ++ctr_); }

  // Random access without advancing the counter; used for lazily
  // materialized operators (dense Cauchy rows and the like).
  std::uint64_t at(std::uint64_t index) const {
    return detail::mix64(key_ + detail::kGamma * (index + 1));
  }

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); safe as a log/tan argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection-free scaling (bound << 2^64,
  // bias is negligible for bucket counts but we use Lemire reduction anyway).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  double sign() { return (next_u64() & 1) ? 1.0 : -1.0; }

  // Box-Muller; draws a fresh pair of uniforms per call.
  double gaussian() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard Cauchy via the inverse CDF.
  double cauchy() { return std::tan(std::numbers::pi * (uniform_pos() - 0.5)); }

  double exponential() { return -std::log(uniform_pos()); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

// Stateless draws addressed by (key, index); the lazily evaluated operators
// use these so an entry can be recomputed without storing it.
inline double uniform_at(std::uint64_t key, std::uint64_t index) {
  return static_cast<double>(detail::mix64(key + detail::kGamma * (index + 1)) >> 11) *
         0x1.0p-53;
}

inline double cauchy_at(std::uint64_t key, std::uint64_t index) {
  double u = (static_cast<double>(
                  detail::mix64(key + detail::kGamma * (index + 1)) >> 11) +
              0.5) *
             0x1.0p-53;
  return std::tan(std::numbers::pi * (u - 0.5));
}

}  // namespace l1sketch

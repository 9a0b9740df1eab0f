#pragma once

// Seeded bit generation shared by every experiment.
//
// Generator: SplitMix64 (Steele, Lea, Flood 2014) with the standard constants
// 0x9e3779b97f4a7c15 / 0xbf58476d1ce4e5b9 / 0x94d049bb133111eb. A stream is
// keyed by mixing (master_seed, stream_id); bits are taken MSB-first from
// successive 64-bit outputs. Only fixed-width unsigned arithmetic is used, so
// the output is identical on every platform.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>

#include "incomp/bitstring.hpp"

namespace incomp {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ull;

  explicit SplitMix64(std::uint64_t state = 0) noexcept : state_(state) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() noexcept { return mix(state_ += golden_gamma); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  bool next_bit() noexcept {
    if (bits_left_ == 0) {
      buffer_ = (*this)();
      bits_left_ = 64;
    }
    --bits_left_;
    return (buffer_ >> bits_left_) & 1u;
  }

  // Uniform in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t v = 0;
    do v = (*this)();
    while (v >= limit);
    return v % bound;
  }

 private:
  std::uint64_t state_;
  std::uint64_t buffer_ = 0;
  int bits_left_ = 0;
};

// Order-sensitive combination of seed components into one stream key.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ull;
  for (std::uint64_t p : parts) h = SplitMix64::mix(h ^ SplitMix64::mix(p + SplitMix64::golden_gamma));
  return h;
}

// FNV-1a, used to turn experiment names into seed components.
constexpr std::uint64_t tag_hash(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline SplitMix64 make_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
  return SplitMix64(derive_seed({master_seed, stream_id}));
}

inline BitString seeded_bits(std::uint64_t master_seed, std::uint64_t stream_id,
                             std::size_t count) {
  SplitMix64 rng = make_stream(master_seed, stream_id);
  BitString out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(rng.next_bit());
  return out;
}

}  // namespace incomp

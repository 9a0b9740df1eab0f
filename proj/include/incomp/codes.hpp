#pragma once

// String/number bijection, the self-delimiting code ladder E_0..E_3, the
// pairing function <x,y> = E_2(x) y and prefix-set verification.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "incomp/bitstring.hpp"

namespace incomp {

using Natural = std::uint64_t;

// Raised when a stream does not begin with a complete codeword.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at bit " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

namespace codes {

// Length-increasing lexicographic index: eps->0, 0->1, 1->2, 00->3, ...
// Computed as binary(n + 1) with the leading 1 removed.
inline Natural to_number(const BitString& x) {
  if (x.size() >= 64)
    throw std::overflow_error("to_number: strings of length >= 64 overflow Natural");
  const Natural offset = (Natural{1} << x.size()) - 1;
  return offset + x.read_uint(0, x.size());
}

inline BitString to_string(Natural n) {
  if (n == std::numeric_limits<Natural>::max()) return BitString(64, false);
  const Natural m = n + 1;
  const std::size_t len = static_cast<std::size_t>(std::bit_width(m)) - 1;
  return BitString::from_uint(m, len);
}

// l(l(x)) in the ladder: the length of the string naming the number len.
inline std::size_t length_of_length(std::size_t len) {
  return static_cast<std::size_t>(std::bit_width(static_cast<Natural>(len) + 1)) - 1;
}

class CodeLevel {
 public:
  static constexpr int max_level = 3;
  explicit CodeLevel(int level) : level_(level) {
    if (level < 0 || level > max_level)
      throw std::invalid_argument("unsupported code level " + std::to_string(level) +
                                  " (supported: 0..3)");
  }
  int value() const noexcept { return level_; }
  friend bool operator==(CodeLevel, CodeLevel) = default;

 private:
  int level_;
};

// E_0 applied to a number: 1^n 0.
inline BitString encode_unary(Natural n) {
  BitString out;
  out.append_run(true, static_cast<std::size_t>(n));
  out.push_back(false);
  return out;
}

inline void encode_into(CodeLevel level, const BitString& x, BitString& out) {
  if (level.value() == 0) {
    out.append_run(true, static_cast<std::size_t>(to_number(x)));
    out.push_back(false);
    return;
  }
  encode_into(CodeLevel(level.value() - 1), to_string(x.size()), out);
  out.append(x);
}

// Level 0 reads x as a Natural through the bijection.
inline BitString encode(CodeLevel level, const BitString& x) {
  BitString out;
  encode_into(level, x, out);
  return out;
}

inline Natural decode_unary(BitReader& in) {
  const std::size_t start = in.position();
  Natural count = 0;
  bool bit = false;
  while (true) {
    if (!in.try_read(bit))
      throw DecodeError("stream exhausted inside E_0 codeword started at bit " +
                            std::to_string(start),
                        in.position());
    if (!bit) return count;
    ++count;
  }
}

// Consumes exactly one level-`level` codeword from `in`.
inline BitString decode(CodeLevel level, BitReader& in) {
  if (level.value() == 0) return to_string(decode_unary(in));
  const std::size_t start = in.position();
  const Natural len = level.value() == 1
                          ? decode_unary(in)
                          : to_number(decode(CodeLevel(level.value() - 1), in));
  if (len > in.remaining())
    throw DecodeError("stream exhausted: E_" + std::to_string(level.value()) +
                          " codeword started at bit " + std::to_string(start) +
                          " announces " + std::to_string(len) + " payload bits",
                      in.source().size());
  BitString x;
  x.reserve(static_cast<std::size_t>(len));
  bool bit = false;
  for (Natural k = 0; k < len; ++k) {
    in.try_read(bit);
    x.push_back(bit);
  }
  return x;
}

struct Decoded {
  BitString value;
  BitString remainder;
};

inline Decoded decode(CodeLevel level, const BitString& stream) {
  BitReader in(stream);
  BitString value = decode(level, in);
  return {std::move(value), in.rest()};
}

inline std::size_t encoded_length(CodeLevel level, std::size_t len) {
  if (level.value() == 0) throw std::invalid_argument("E_0 length depends on the value");
  if (level.value() == 1) return 2 * len + 1;
  return len + encoded_length(CodeLevel(level.value() - 1), length_of_length(len));
}

// <x, y> = E_2(x) y
inline BitString pair(const BitString& x, const BitString& y) {
  BitString out;
  encode_into(CodeLevel(2), x, out);
  out.append(y);
  return out;
}

inline std::pair<BitString, BitString> unpair(const BitString& z) {
  auto d = decode(CodeLevel(2), z);
  return {std::move(d.value), std::move(d.remainder)};
}

struct PrefixCheck {
  bool prefix_free = true;
  // (shorter, longer) when a violation exists.
  std::optional<std::pair<BitString, BitString>> witness;
};

// A set is prefix-free iff, after lexicographic sorting, no element is a
// prefix of its successor. Duplicates are the same member of the set.
inline PrefixCheck is_prefix_free(std::span<const BitString> words) {
  std::vector<const BitString*> sorted;
  sorted.reserve(words.size());
  for (const auto& w : words) sorted.push_back(&w);
  std::sort(sorted.begin(), sorted.end(),
            [](const BitString* a, const BitString* b) { return *a < *b; });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const BitString* a, const BitString* b) { return *a == *b; }),
               sorted.end());
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k - 1]->is_prefix_of(*sorted[k]))
      return {false, std::pair{*sorted[k - 1], *sorted[k]}};
  return {};
}

}  // namespace codes
}  // namespace incomp

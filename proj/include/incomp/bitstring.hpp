#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace incomp {

// Packed, MSB-first bit string. Bit i lives in word i/64 at bit 63 - i%64, so
// whole-word unsigned comparison agrees with lexicographic order. Bits past
// size() are always zero.
class BitString {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;

  BitString() = default;
  explicit BitString(std::size_t n, bool value = false)
      : words_(words_for(n), value ? ~word_type{0} : word_type{0}), size_(n) {
    clear_tail();
  }

  // Parses an ASCII '0'/'1' string; anything else is rejected.
  static BitString from_string(std::string_view s) {
    BitString b;
    b.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("bit string may only contain '0' and '1'");
      b.push_back(c == '1');
    }
    return b;
  }

  // Low `width` bits of value, most significant first.
  static BitString from_uint(std::uint64_t value, std::size_t width) {
    BitString b;
    b.append_uint(value, width);
    return b;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  void reserve(std::size_t n) { words_.reserve(words_for(n)); }

  bool operator[](std::size_t i) const noexcept {
    return (words_[i / word_bits] >> (word_bits - 1 - i % word_bits)) & 1u;
  }

  bool at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("BitString::at");
    return (*this)[i];
  }

  void set(std::size_t i, bool v) noexcept {
    const word_type mask = word_type{1} << (word_bits - 1 - i % word_bits);
    if (v)
      words_[i / word_bits] |= mask;
    else
      words_[i / word_bits] &= ~mask;
  }

  void flip(std::size_t i) noexcept {
    words_[i / word_bits] ^= word_type{1} << (word_bits - 1 - i % word_bits);
  }

  void push_back(bool v) {
    if (size_ % word_bits == 0) words_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  void append(const BitString& other) {
    reserve(size_ + other.size_);
    for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
  }

  void append_run(bool v, std::size_t count) {
    reserve(size_ + count);
    for (std::size_t i = 0; i < count; ++i) push_back(v);
  }

  void append_uint(std::uint64_t value, std::size_t width) {
    if (width > 64) throw std::invalid_argument("append_uint: width > 64");
    for (std::size_t k = width; k-- > 0;) push_back((value >> k) & 1u);
  }

  // Reads `width` bits starting at pos as an unsigned integer, MSB first.
  std::uint64_t read_uint(std::size_t pos, std::size_t width) const {
    if (width > 64 || pos + width > size_)
      throw std::out_of_range("BitString::read_uint");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 1) | (*this)[pos + i];
    return v;
  }

  BitString slice(std::size_t pos, std::size_t len) const {
    if (pos > size_ || len > size_ - pos)
      throw std::out_of_range("BitString::slice");
    BitString b;
    b.reserve(len);
    for (std::size_t i = 0; i < len; ++i) b.push_back((*this)[pos + i]);
    return b;
  }

  BitString suffix(std::size_t pos) const { return slice(pos, size_ - pos); }

  std::size_t popcount() const noexcept {
    std::size_t c = 0;
    for (word_type w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  // True when *this is a (not necessarily proper) prefix of other.
  bool is_prefix_of(const BitString& other) const noexcept {
    if (size_ > other.size_) return false;
    const std::size_t full = size_ / word_bits;
    for (std::size_t w = 0; w < full; ++w)
      if (words_[w] != other.words_[w]) return false;
    const std::size_t rest = size_ % word_bits;
    if (rest == 0) return true;
    const word_type mask = ~word_type{0} << (word_bits - rest);
    return (words_[full] & mask) == (other.words_[full] & mask);
  }

  friend BitString operator+(BitString a, const BitString& b) {
    a.append(b);
    return a;
  }

  friend bool operator==(const BitString& a, const BitString& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  // Plain lexicographic order: a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const BitString& a,
                                          const BitString& b) noexcept {
    const std::size_t common = std::min(a.size_, b.size_);
    const std::size_t full = common / word_bits;
    for (std::size_t w = 0; w < full; ++w)
      if (a.words_[w] != b.words_[w]) return a.words_[w] <=> b.words_[w];
    const std::size_t rest = common % word_bits;
    if (rest != 0) {
      const word_type mask = ~word_type{0} << (word_bits - rest);
      const word_type x = a.words_[full] & mask, y = b.words_[full] & mask;
      if (x != y) return x <=> y;
    }
    return a.size_ <=> b.size_;
  }

  std::span<const word_type> words() const noexcept { return words_; }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(size_);
    for (word_type w : words_)
      h ^= std::hash<word_type>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }

 private:
  static std::size_t words_for(std::size_t n) {
    return (n + word_bits - 1) / word_bits;
  }
  void clear_tail() noexcept {
    const std::size_t rest = size_ % word_bits;
    if (rest != 0) words_.back() &= ~word_type{0} << (word_bits - rest);
  }

  std::vector<word_type> words_;
  std::size_t size_ = 0;
};

// Length-increasing lexicographic order (the order of the string/number
// bijection).
struct LengthLexLess {
  bool operator()(const BitString& a, const BitString& b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

inline BitString operator""_bits(const char* s, std::size_t n) {
  return BitString::from_string(std::string_view(s, n));
}

// Sequential reader over a BitString. It never looks past the last bit it
// returned, so callers can check exactly how much of a stream a decoder used.
class BitReader {
 public:
  explicit BitReader(const BitString& src, std::size_t pos = 0)
      : src_(&src), pos_(pos) {}

  bool exhausted() const noexcept { return pos_ >= src_->size(); }
  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return src_->size() - pos_; }
  const BitString& source() const noexcept { return *src_; }

  // Returns false when the stream is exhausted; otherwise stores the bit.
  bool try_read(bool& bit) noexcept {
    if (exhausted()) return false;
    bit = (*src_)[pos_++];
    return true;
  }

  BitString rest() const { return src_->suffix(pos_); }

 private:
  const BitString* src_;
  std::size_t pos_;
};

}  // namespace incomp

template <>
struct std::hash<incomp::BitString> {
  std::size_t operator()(const incomp::BitString& b) const noexcept {
    return b.hash();
  }
};

#pragma once

// Boolean matrix multiplication by sequential search over the ones of each
// row of A (QuickMultiply), with exact probe accounting, a word-packed naive
// oracle, and the compressor that shortens (A, B) whenever some search reads
// ceil(4 log2 n) zeros in a row.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "incomp/bitstring.hpp"
#include "incomp/codes.hpp"
#include "incomp/random.hpp"

namespace incomp::matmul {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BoolMatrix {
 public:
  BoolMatrix() = default;
  explicit BoolMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  static BoolMatrix identity(std::size_t n) {
    BoolMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static BoolMatrix from_rows(const std::vector<std::string>& rows) {
    BoolMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw DimensionMismatch("matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) m.set(i, j, rows[i][j] == '1');
    }
    return m;
  }

  // Row-major reading of n*n bits starting at pos.
  static BoolMatrix from_bits(const BitString& bits, std::size_t n, std::size_t pos = 0) {
    if (pos + n * n > bits.size()) throw DimensionMismatch("not enough bits for matrix");
    BoolMatrix m(n);
    for (std::size_t k = 0; k < n * n; ++k) m.bits_[k] = bits[pos + k];
    return m;
  }

  static BoolMatrix random(std::size_t n, SplitMix64& rng) {
    BoolMatrix m(n);
    for (auto& b : m.bits_) b = rng.next_bit();
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, bool v) noexcept { bits_[i * n_ + j] = v; }

  void append_to(BitString& out) const {
    out.reserve(out.size() + bits_.size());
    for (auto b : bits_) out.push_back(b != 0);
  }

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Row-major A followed by row-major B: 2n^2 bits.
inline BitString serialize_pair(const BoolMatrix& a, const BoolMatrix& b) {
  BitString out;
  a.append_to(out);
  b.append_to(out);
  return out;
}

inline void require_same_size(const BoolMatrix& a, const BoolMatrix& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
}

// c_ij = OR_k a_ik AND b_kj, computed by OR-ing packed rows of B.
inline BoolMatrix naive_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  require_same_size(a, b);
  const std::size_t n = a.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> packed(n * words, 0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      if (b(k, j)) packed[k * words + j / 64] |= std::uint64_t{1} << (j % 64);
  BoolMatrix c(n);
  std::vector<std::uint64_t> acc(words);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t k = 0; k < n; ++k)
      if (a(i, k))
        for (std::size_t w = 0; w < words; ++w) acc[w] |= packed[k * words + w];
    for (std::size_t j = 0; j < n; ++j) c.set(i, j, (acc[j / 64] >> (j % 64)) & 1u);
  }
  return c;
}

struct MultiplyCounters {
  std::size_t n = 0;
  // search_depth[i * n + j]: probes of B made by search (i, j).
  std::vector<std::uint32_t> search_depth;
  // resolved[i * n + j]: the search found a 1.
  std::vector<std::uint8_t> resolved;
  std::vector<std::uint32_t> row_ones;        // m_i
  std::vector<std::uint64_t> row_probes;
  std::uint64_t total_probes = 0;

  std::uint32_t depth(std::size_t i, std::size_t j) const { return search_depth.at(i * n + j); }
  std::uint32_t max_depth() const {
    std::uint32_t m = 0;
    for (auto d : search_depth) m = std::max(m, d);
    return m;
  }
};

struct MultiplyResult {
  BoolMatrix product;
  MultiplyCounters counters;
};

inline MultiplyResult quick_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  require_same_size(a, b);
  const std::size_t n = a.size();
  MultiplyResult r{BoolMatrix(n), {}};
  auto& ctr = r.counters;
  ctr.n = n;
  ctr.search_depth.assign(n * n, 0);
  ctr.resolved.assign(n * n, 0);
  ctr.row_ones.assign(n, 0);
  ctr.row_probes.assign(n, 0);
  std::vector<std::size_t> ones;
  ones.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ones.clear();
    for (std::size_t k = 0; k < n; ++k)
      if (a(i, k)) ones.push_back(k);
    ctr.row_ones[i] = static_cast<std::uint32_t>(ones.size());
    for (std::size_t j = 0; j < n; ++j) {
      std::uint32_t probes = 0;
      bool found = false;
      for (std::size_t k : ones) {
        ++probes;
        if (b(k, j)) {
          found = true;
          break;
        }
      }
      r.product.set(i, j, found);
      ctr.search_depth[i * n + j] = probes;
      ctr.resolved[i * n + j] = found;
      ctr.row_probes[i] += probes;
    }
    ctr.total_probes += ctr.row_probes[i];
  }
  return r;
}

struct DepthHistogram {
  // depth k -> number of searches of row i that found their 1 at probe k.
  std::map<std::uint32_t, std::size_t> resolved_at;
  std::size_t unresolved = 0;
  std::uint32_t unresolved_depth = 0;  // m_i: probes spent by each unresolved search

  std::size_t count(std::uint32_t k) const {
    auto it = resolved_at.find(k);
    return it == resolved_at.end() ? 0 : it->second;
  }
  std::size_t total() const {
    std::size_t t = unresolved;
    for (const auto& [k, c] : resolved_at) t += c;
    return t;
  }
};

inline DepthHistogram search_depth_histogram(const MultiplyCounters& ctr, std::size_t i) {
  if (i >= ctr.n) throw std::out_of_range("row index out of range");
  DepthHistogram h;
  h.unresolved_depth = ctr.row_ones[i];
  for (std::size_t j = 0; j < ctr.n; ++j) {
    if (ctr.resolved[i * ctr.n + j])
      ++h.resolved_at[ctr.search_depth[i * ctr.n + j]];
    else
      ++h.unresolved;
  }
  return h;
}

// t = ceil(4 log2 n): the number of leading zero probes the witness omits.
inline std::size_t omitted_probe_count(std::size_t n) {
  if (n < 2) return 0;
  return static_cast<std::size_t>(std::ceil(4.0 * std::log2(static_cast<double>(n)) - 1e-9));
}

inline std::size_t ceil_log2(std::size_t n) {
  return n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1));
}

// Tag: 4-bit format version, then ceil(log2 n) in 4 bits.
inline constexpr std::uint64_t witness_version = 0x1;
inline constexpr std::size_t witness_tag_bits = 8;
inline constexpr std::size_t max_witness_dimension = std::size_t{1} << 15;

struct WitnessDescription {
  BitString bits;
  std::size_t n = 0;
  std::size_t omitted = 0;  // t

  std::size_t size() const noexcept { return bits.size(); }
};

class WitnessPreconditionError : public std::invalid_argument {
 public:
  // probe_position is 1-based; 0 when the row simply has fewer than t ones.
  WitnessPreconditionError(const std::string& what, std::size_t probe_position)
      : std::invalid_argument(what), probe_position_(probe_position) {}
  std::size_t probe_position() const noexcept { return probe_position_; }

 private:
  std::size_t probe_position_;
};

namespace detail {
inline std::vector<std::size_t> probe_rows(const BoolMatrix& a, std::size_t i, std::size_t t) {
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < a.size() && rows.size() < t; ++k)
    if (a(i, k)) rows.push_back(k);
  return rows;
}
}  // namespace detail

// Exact length of a witness for dimension n and search (i, j).
inline std::size_t witness_length(std::size_t n, std::size_t i, std::size_t j) {
  const codes::CodeLevel e2(2);
  return witness_tag_bits + codes::encode(e2, codes::to_string(i)).size() +
         codes::encode(e2, codes::to_string(j)).size() + 2 * n * n - omitted_probe_count(n);
}

inline WitnessDescription matmul_witness_encode(const BoolMatrix& a, const BoolMatrix& b,
                                                std::size_t i, std::size_t j) {
  require_same_size(a, b);
  const std::size_t n = a.size();
  if (n < 2 || n > max_witness_dimension)
    throw std::invalid_argument("witness dimension out of range");
  if (i >= n || j >= n) throw std::out_of_range("witness row/column out of range");
  const std::size_t t = omitted_probe_count(n);
  const auto rows = detail::probe_rows(a, i, t);
  if (rows.size() < t)
    throw WitnessPreconditionError("row " + std::to_string(i) + " of A has only " +
                                       std::to_string(rows.size()) + " ones, need " +
                                       std::to_string(t),
                                   0);
  for (std::size_t k = 0; k < t; ++k)
    if (b(rows[k], j))
      throw WitnessPreconditionError("search (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ") finds a 1 at probe " +
                                         std::to_string(k + 1),
                                     k + 1);

  WitnessDescription d;
  d.n = n;
  d.omitted = t;
  auto& out = d.bits;
  out.reserve(witness_length(n, i, j));
  out.append_uint(witness_version, 4);
  out.append_uint(ceil_log2(n), 4);
  codes::encode_into(codes::CodeLevel(2), codes::to_string(i), out);
  codes::encode_into(codes::CodeLevel(2), codes::to_string(j), out);
  a.append_to(out);
  std::vector<std::uint8_t> skip(n, 0);
  for (std::size_t k : rows) skip[k] = 1;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (!(c == j && skip[r])) out.push_back(b(r, c));
  return d;
}

struct DecodedPair {
  BoolMatrix a;
  BoolMatrix b;
  std::size_t i = 0;
  std::size_t j = 0;
};

inline DecodedPair matmul_witness_decode(const BitString& d, std::size_t n) {
  if (n < 2 || n > max_witness_dimension)
    throw std::invalid_argument("witness dimension out of range");
  if (d.size() < witness_tag_bits) throw DecodeError("description shorter than its tag", d.size());
  if (d.read_uint(0, 4) != witness_version)
    throw DecodeError("unknown witness version", 0);
  if (d.read_uint(4, 4) != ceil_log2(n))
    throw DimensionMismatch("witness tag is for a different dimension than n = " +
                            std::to_string(n));
  BitReader in(d, witness_tag_bits);
  const codes::CodeLevel e2(2);
  const Natural i = codes::to_number(codes::decode(e2, in));
  const Natural j = codes::to_number(codes::decode(e2, in));
  if (i >= n || j >= n) throw DecodeError("decoded row/column out of range", in.position());
  const std::size_t t = omitted_probe_count(n);
  const std::size_t payload = 2 * n * n - t;
  if (in.remaining() < payload)
    throw DecodeError("description truncated: " + std::to_string(in.remaining()) +
                          " payload bits, expected " + std::to_string(payload),
                      d.size());
  if (in.remaining() > payload)
    throw DimensionMismatch("description has " + std::to_string(in.remaining() - payload) +
                            " bits more than dimension n = " + std::to_string(n) + " allows");

  DecodedPair out{BoolMatrix::from_bits(d, n, in.position()), BoolMatrix(n),
                  static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
  const auto rows = detail::probe_rows(out.a, out.i, t);
  if (rows.size() < t) throw DecodeError("decoded row of A has fewer than t ones", in.position());
  std::vector<std::uint8_t> skip(n, 0);
  for (std::size_t k : rows) skip[k] = 1;
  std::size_t pos = in.position() + n * n;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      out.b.set(r, c, (c == out.j && skip[r]) ? false : d[pos++]);
  return out;
}

inline DecodedPair matmul_witness_decode(const WitnessDescription& d, std::size_t n) {
  return matmul_witness_decode(d.bits, n);
}

// Random (A, B) with row i of A all ones and the first t probed bits of
// column j of B set to zero.
inline std::pair<BoolMatrix, BoolMatrix> planted_instance(std::size_t n, std::size_t i,
                                                          std::size_t j, SplitMix64& rng) {
  BoolMatrix a = BoolMatrix::random(n, rng);
  BoolMatrix b = BoolMatrix::random(n, rng);
  for (std::size_t k = 0; k < n; ++k) a.set(i, k, true);
  const std::size_t t = omitted_probe_count(n);
  for (std::size_t k = 0; k < t && k < n; ++k) b.set(k, j, false);
  return {std::move(a), std::move(b)};
}

// Smallest power-of-two n (up to 2^max_exp) at which the witness for the
// most expensive indices (n-1, n-1) is strictly shorter than 2n^2 - log2 n.
// Uses exact code lengths; no matrices are built.
inline std::size_t worst_case_threshold_dimension(unsigned max_exp = 40) {
  for (unsigned e = 1; e <= max_exp; ++e) {
    const std::uint64_t n = std::uint64_t{1} << e;
    const codes::CodeLevel e2(2);
    const double overhead =
        static_cast<double>(witness_tag_bits +
                            2 * codes::encoded_length(e2, codes::to_string(n - 1).size())) -
        static_cast<double>(omitted_probe_count(static_cast<std::size_t>(n)));
    if (overhead < -static_cast<double>(e)) return static_cast<std::size_t>(n);
  }
  return 0;
}

}  // namespace incomp::matmul

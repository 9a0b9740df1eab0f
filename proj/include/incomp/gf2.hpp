#pragma once

// Dense GF(2) matrices with packed rows; rank and null-space basis by
// Gauss-Jordan elimination.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "incomp/bitstring.hpp"

namespace incomp::gf2 {

class Gf2Matrix {
 public:
  using word_type = std::uint64_t;

  explicit Gf2Matrix(std::size_t cols = 0) : cols_(cols), words_((cols + 63) / 64) {}

  static Gf2Matrix from_rows(std::size_t cols, const std::vector<BitString>& rows) {
    Gf2Matrix m(cols);
    for (const auto& r : rows) m.push_row(r);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  void push_row(const BitString& row) {
    if (row.size() != cols_)
      throw std::invalid_argument("row has " + std::to_string(row.size()) + " bits, matrix has " +
                                  std::to_string(cols_) + " columns");
    ++rows_;
    data_.resize(data_.size() + words_, 0);
    for (std::size_t j = 0; j < cols_; ++j)
      if (row[j]) set(rows() - 1, j, true);
  }

  bool get(std::size_t i, std::size_t j) const noexcept {
    return (data_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }
  void set(std::size_t i, std::size_t j, bool v) noexcept {
    const word_type mask = word_type{1} << (j % 64);
    if (v)
      data_[i * words_ + j / 64] |= mask;
    else
      data_[i * words_ + j / 64] &= ~mask;
  }

  BitString row(std::size_t i) const {
    BitString r;
    r.reserve(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r.push_back(get(i, j));
    return r;
  }

  // M v over GF(2).
  BitString multiply(const BitString& v) const {
    if (v.size() != cols_) throw std::invalid_argument("vector length != column count");
    BitString out;
    for (std::size_t i = 0; i < rows(); ++i) {
      bool acc = false;
      for (std::size_t j = 0; j < cols_; ++j) acc ^= get(i, j) && v[j];
      out.push_back(acc);
    }
    return out;
  }

  void xor_row_into(std::size_t src, std::size_t dst) noexcept {
    for (std::size_t w = 0; w < words_; ++w) data_[dst * words_ + w] ^= data_[src * words_ + w];
  }
  void swap_rows(std::size_t a, std::size_t b) noexcept {
    for (std::size_t w = 0; w < words_; ++w) std::swap(data_[a * words_ + w], data_[b * words_ + w]);
  }

 private:
  std::size_t cols_;
  std::size_t words_;
  std::size_t rows_ = 0;
  std::vector<word_type> data_;
};

struct RankNullspace {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_columns;
  std::vector<std::size_t> free_columns;
  // One vector per free column f: 1 at f, pivot entries fixed by the RREF,
  // 0 at every other free column. Coordinates of any null vector in this
  // basis are therefore its bits at the free columns.
  std::vector<BitString> basis;
};

inline RankNullspace rank_nullspace(Gf2Matrix m) {
  const std::size_t n = m.cols();
  RankNullspace out;
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m.rows(); ++col) {
    std::size_t pivot = r;
    while (pivot < m.rows() && !m.get(pivot, col)) ++pivot;
    if (pivot == m.rows()) continue;
    m.swap_rows(pivot, r);
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (i != r && m.get(i, col)) m.xor_row_into(r, i);
    out.pivot_columns.push_back(col);
    ++r;
  }
  out.rank = r;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : out.pivot_columns) is_pivot[c] = true;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) out.free_columns.push_back(c);
  for (std::size_t f : out.free_columns) {
    BitString v(n, false);
    v.set(f, true);
    for (std::size_t k = 0; k < out.pivot_columns.size(); ++k)
      if (m.get(k, f)) v.set(out.pivot_columns[k], true);
    out.basis.push_back(std::move(v));
  }
  if (out.rank + out.basis.size() != n)
    throw std::logic_error("rank-nullity violated: " + std::to_string(out.rank) + " + " +
                           std::to_string(out.basis.size()) + " != " + std::to_string(n));
  return out;
}

// Sum of the basis vectors selected by coords (coords[k] picks basis[k]).
inline BitString combine(const std::vector<BitString>& basis, const BitString& coords,
                         std::size_t n) {
  if (coords.size() != basis.size()) throw std::invalid_argument("coordinate count != basis size");
  BitString v(n, false);
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (coords[k])
      for (std::size_t j = 0; j < n; ++j)
        if (basis[k][j]) v.flip(j);
  return v;
}

}  // namespace incomp::gf2

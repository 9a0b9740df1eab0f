#include <gtest/gtest.h>

#include "incomp/gf2.hpp"
#include "incomp/random.hpp"

namespace incomp::gf2 {
namespace {

BitString B(const char* s) { return BitString::from_string(s); }

Gf2Matrix random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  Gf2Matrix m(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    BitString r;
    for (std::size_t j = 0; j < cols; ++j) r.push_back(rng.next_bit());
    m.push_row(r);
  }
  return m;
}

// |Null(M)| by trying every vector, for n <= 12.
std::size_t brute_null_count(const Gf2Matrix& m) {
  std::size_t count = 0;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << m.cols()); ++v)
    count += m.multiply(BitString::from_uint(v, m.cols())).popcount() == 0;
  return count;
}

TEST(RankNullspace, HandExample) {
  const auto r = rank_nullspace(Gf2Matrix::from_rows(2, {B("00"), B("11")}));
  EXPECT_EQ(r.rank, 1u);
  ASSERT_EQ(r.basis.size(), 1u);
  EXPECT_EQ(r.basis[0].to_string(), "11");
}

TEST(RankNullspace, Identity) {
  std::vector<BitString> rows;
  for (std::size_t i = 0; i < 9; ++i) {
    BitString r(9, false);
    r.set(i, true);
    rows.push_back(r);
  }
  const auto r = rank_nullspace(Gf2Matrix::from_rows(9, rows));
  EXPECT_EQ(r.rank, 9u);
  EXPECT_TRUE(r.basis.empty());
}

TEST(RankNullspace, EmptyMatrixHasFullNullspace) {
  const auto r = rank_nullspace(Gf2Matrix(5));
  EXPECT_EQ(r.rank, 0u);
  EXPECT_EQ(r.basis.size(), 5u);
}

TEST(RankNullspace, RejectsWrongRowLength) {
  Gf2Matrix m(3);
  EXPECT_THROW(m.push_row(B("01")), std::invalid_argument);
}

TEST(RankNullspace, BasisIsInNullspaceAndCountMatches) {
  SplitMix64 rng(21);
  for (int k = 0; k < 300; ++k) {
    const std::size_t cols = 1 + rng.below(10), rows = rng.below(14);
    const auto m = random_matrix(rows, cols, rng);
    const auto r = rank_nullspace(m);
    EXPECT_EQ(r.rank + r.basis.size(), cols);
    for (const auto& v : r.basis) EXPECT_EQ(m.multiply(v).popcount(), 0u);
    EXPECT_EQ(brute_null_count(m), std::size_t{1} << r.basis.size());
  }
}

// Coordinates of a null vector are its bits at the free columns.
TEST(RankNullspace, CoordinatesRoundTrip) {
  SplitMix64 rng(22);
  for (int k = 0; k < 100; ++k) {
    const std::size_t cols = 2 + rng.below(8);
    const auto m = random_matrix(rng.below(cols), cols, rng);
    const auto r = rank_nullspace(m);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << cols); ++v) {
      const auto y = BitString::from_uint(v, cols);
      if (m.multiply(y).popcount() != 0) continue;
      BitString coords;
      for (std::size_t f : r.free_columns) coords.push_back(y[f]);
      ASSERT_EQ(combine(r.basis, coords, cols), y);
    }
  }
}

TEST(RankNullspace, WideMatrices) {
  SplitMix64 rng(23);
  for (int k = 0; k < 200; ++k) {
    const std::size_t cols = 60 + rng.below(80);
    const auto m = random_matrix(rng.below(cols + 10), cols, rng);
    const auto r = rank_nullspace(m);
    EXPECT_EQ(r.rank + r.basis.size(), cols);
    for (const auto& v : r.basis) ASSERT_EQ(m.multiply(v).popcount(), 0u);
  }
}

}  // namespace
}  // namespace incomp::gf2

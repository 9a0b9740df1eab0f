#pragma once

// Tournament majority finding with exact comparison counting, a counting
// oracle, the cluster/weight accounting of comparison transcripts, and nu(n).

#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "incomp/bitstring.hpp"

namespace incomp::majority {

class MajorityVerdict {
 public:
  static MajorityVerdict none() { return MajorityVerdict(); }
  static MajorityVerdict bit(bool b) { return MajorityVerdict(b); }

  bool has_majority() const noexcept { return bit_.has_value(); }
  bool majority_bit() const { return bit_.value(); }
  std::string to_string() const {
    return bit_ ? std::string("majority_bit(") + (*bit_ ? "1" : "0") + ")" : "no_majority";
  }

  friend bool operator==(const MajorityVerdict&, const MajorityVerdict&) = default;

 private:
  MajorityVerdict() = default;
  explicit MajorityVerdict(bool b) : bit_(b) {}
  std::optional<bool> bit_;
};

enum class Mode {
  paper_faithful,  // odd-element rule as published: append x_n when floor(n/2) is even
  corrected,       // append x_n when n is odd and l(y) is even
  verified,        // corrected, then count the claimed bit
};

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::paper_faithful: return "paper_faithful";
    case Mode::corrected: return "corrected";
    case Mode::verified: return "verified";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "paper_faithful" || s == "paper-faithful") return Mode::paper_faithful;
  if (s == "corrected") return Mode::corrected;
  if (s == "verified") return Mode::verified;
  throw std::invalid_argument("unknown tournament mode '" + s + "'");
}

// Counts above floor(n/2) win. The empty string has no majority.
inline MajorityVerdict majority_oracle(const BitString& x) {
  const std::size_t n = x.size();
  const std::size_t ones = x.popcount();
  if (ones > n / 2) return MajorityVerdict::bit(true);
  if (n - ones > n / 2) return MajorityVerdict::bit(false);
  return MajorityVerdict::none();
}

struct Comparison {
  std::uint32_t a = 0;  // 1-based positions in the original input
  std::uint32_t b = 0;
  bool equal = false;
  std::uint32_t level = 0;  // recursion depth, 0 = top call
};

using ComparisonTranscript = std::vector<Comparison>;

struct TournamentResult {
  MajorityVerdict verdict = MajorityVerdict::none();
  std::size_t comparisons = 0;  // tournament comparisons, plus verification in verified mode
  std::size_t verification_comparisons = 0;
  std::size_t discordant_top_pairs = 0;  // unequal pairs in the top-level pairing pass
  ComparisonTranscript transcript;
};

namespace detail {

struct Item {
  bool bit;
  std::uint32_t origin;  // 1-based position in the original input
};

inline MajorityVerdict tournament_rec(std::vector<Item> x, bool literal_step11,
                                      std::uint32_t level, TournamentResult& out) {
  const std::size_t n = x.size();
  auto compare = [&](const Item& p, const Item& q) {
    const bool eq = p.bit == q.bit;
    out.transcript.push_back({p.origin, q.origin, eq, level});
    ++out.comparisons;
    return eq;
  };
  if (n == 0) return MajorityVerdict::none();
  if (n == 1) return MajorityVerdict::bit(x[0].bit);
  if (n == 2) return compare(x[0], x[1]) ? MajorityVerdict::bit(x[0].bit) : MajorityVerdict::none();
  if (n == 3)
    return compare(x[0], x[1]) ? MajorityVerdict::bit(x[0].bit) : MajorityVerdict::bit(x[2].bit);

  std::vector<Item> y;
  y.reserve(n / 2 + 1);
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (compare(x[2 * i], x[2 * i + 1]))
      y.push_back(x[2 * i + 1]);
    else if (level == 0)
      ++out.discordant_top_pairs;
  }
  const bool append = literal_step11 ? (n / 2) % 2 == 0 : (n % 2 == 1 && y.size() % 2 == 0);
  if (append) y.push_back(x[n - 1]);
  return tournament_rec(std::move(y), literal_step11, level + 1, out);
}

}  // namespace detail

inline TournamentResult tournament(const BitString& x, Mode mode) {
  if (x.empty() && mode == Mode::paper_faithful)
    throw std::invalid_argument("paper_faithful tournament requires n >= 1");
  std::vector<detail::Item> items(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    items[i] = {x[i], static_cast<std::uint32_t>(i + 1)};
  TournamentResult r;
  r.verdict = detail::tournament_rec(std::move(items), mode == Mode::paper_faithful, 0, r);
  if (mode == Mode::verified && r.verdict.has_majority()) {
    const bool b = r.verdict.majority_bit();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < x.size(); ++i) hits += x[i] == b;
    r.verification_comparisons = x.size();
    r.comparisons += x.size();
    if (hits <= x.size() / 2) r.verdict = MajorityVerdict::none();
  }
  return r;
}

inline std::size_t nu(std::uint64_t n) noexcept { return static_cast<std::size_t>(std::popcount(n)); }

inline constexpr std::size_t max_worst_case_n = 18;

struct WorstCase {
  std::size_t n = 0;
  std::size_t max_comparisons = 0;
  BitString argmax_input;  // first input (in numeric order) attaining the max
  std::size_t n_minus_nu = 0;
  bool matches_n_minus_nu = false;
};

inline WorstCase worst_case_scan(std::size_t n, Mode mode) {
  if (n > max_worst_case_n)
    throw std::invalid_argument("worst_case_scan: n = " + std::to_string(n) + " exceeds " +
                                std::to_string(max_worst_case_n));
  if (n == 0 && mode == Mode::paper_faithful)
    throw std::invalid_argument("paper_faithful tournament requires n >= 1");
  WorstCase w;
  w.n = n;
  bool first = true;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    const BitString x = BitString::from_uint(v, n);
    const std::size_t c = tournament(x, mode).comparisons;
    if (first || c > w.max_comparisons) {
      w.max_comparisons = c;
      w.argmax_input = x;
      first = false;
    }
  }
  w.n_minus_nu = n - nu(n);
  w.matches_n_minus_nu = w.max_comparisons == w.n_minus_nu;
  return w;
}

class InconsistentTranscript : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Cluster {
  std::vector<std::uint32_t> positions;  // 1-based, ascending
  std::size_t zeros = 0;
  std::size_t ones = 0;
  std::size_t weight() const noexcept { return zeros > ones ? zeros - ones : ones - zeros; }
};

struct ClusterPartition {
  std::vector<Cluster> clusters;  // ordered by smallest position
  // Index of the unique cluster with w(C_i) > sum_{j != i} w(C_j), if any.
  std::optional<std::size_t> dominant;
};

// Union-find over compared positions. Each component carries, for every
// member, its relation (same / complementary) to the component root so that
// the transcript can be checked for consistency with itself and with x.
inline ClusterPartition cluster_analyze(const ComparisonTranscript& transcript, const BitString& x) {
  const std::size_t n = x.size();
  std::vector<std::uint32_t> parent(n);
  std::vector<std::uint8_t> parity(n, 0);  // relation to parent: 1 = complementary
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t v) {
    std::uint8_t acc = 0;
    std::uint32_t r = v;
    while (parent[r] != r) {
      acc ^= parity[r];
      r = parent[r];
    }
    // Path compression with parity fix-up.
    std::uint8_t rel = acc;
    while (parent[v] != v) {
      const std::uint32_t next = parent[v];
      const std::uint8_t p = parity[v];
      parent[v] = r;
      parity[v] = rel;
      rel ^= p;
      v = next;
    }
    return std::pair{r, acc};
  };

  for (const Comparison& cmp : transcript) {
    if (cmp.a == 0 || cmp.b == 0 || cmp.a > n || cmp.b > n || cmp.a == cmp.b)
      throw InconsistentTranscript("transcript position out of range or repeated");
    const std::uint32_t a = cmp.a - 1, b = cmp.b - 1;
    if ((x[a] == x[b]) != cmp.equal)
      throw InconsistentTranscript("comparison (" + std::to_string(cmp.a) + ", " +
                                   std::to_string(cmp.b) + ") disagrees with the input");
    const std::uint8_t rel = cmp.equal ? 0 : 1;
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) {
      if ((pa ^ pb) != rel)
        throw InconsistentTranscript("transcript contradicts itself at (" +
                                     std::to_string(cmp.a) + ", " + std::to_string(cmp.b) + ")");
      continue;
    }
    parent[rb] = ra;
    parity[rb] = static_cast<std::uint8_t>(pa ^ pb ^ rel);
  }

  ClusterPartition out;
  std::vector<std::int64_t> slot(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto root = find(v).first;
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(out.clusters.size());
      out.clusters.emplace_back();
    }
    Cluster& c = out.clusters[static_cast<std::size_t>(slot[root])];
    c.positions.push_back(v + 1);
    (x[v] ? c.ones : c.zeros) += 1;
  }
  std::size_t total = 0;
  for (const auto& c : out.clusters) total += c.weight();
  for (std::size_t i = 0; i < out.clusters.size(); ++i) {
    const std::size_t w = out.clusters[i].weight();
    if (w > total - w) out.dominant = i;
  }
  return out;
}

}  // namespace incomp::majority

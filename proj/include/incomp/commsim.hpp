#pragma once

// Two-party deterministic protocols as trees, the inner-product function, the
// description/reconstruction codec for inputs with inner product 0, the flip
// reduction for inner product 1, and private-coin protocol families.
//
// Inputs are packed into 32-bit words with x_1 as the most significant of the
// n low bits, so numeric order on packed inputs is lexicographic order.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "incomp/bitstring.hpp"
#include "incomp/codes.hpp"
#include "incomp/gf2.hpp"
#include "incomp/random.hpp"

namespace incomp::commsim {

using Input = std::uint32_t;
inline constexpr std::size_t max_input_bits = 32;
inline constexpr std::size_t max_enumeration_n = 13;

inline Input pack(const BitString& x) {
  if (x.size() > max_input_bits) throw std::invalid_argument("input longer than 32 bits");
  return static_cast<Input>(x.read_uint(0, x.size()));
}
inline BitString unpack(Input v, std::size_t n) { return BitString::from_uint(v, n); }

// Bit k (0-based from the left) of an n-bit packed input.
constexpr bool input_bit(Input v, std::size_t n, std::size_t k) noexcept {
  return (v >> (n - 1 - k)) & 1u;
}

inline bool inner_product(Input x, Input y) noexcept { return std::popcount(x & y) & 1; }

inline bool inner_product(const BitString& x, const BitString& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("inner_product: length mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  bool acc = false;
  for (std::size_t i = 0; i < x.size(); ++i) acc ^= x[i] && y[i];
  return acc;
}

enum class Speaker { alice, bob };

class ProtocolTree {
 public:
  using BitFn = std::function<bool(Input)>;
  using NodeId = std::uint32_t;

  struct Node {
    bool leaf = true;
    Speaker speaker = Speaker::alice;
    BitFn fn;  // next bit of the speaker (internal) or Alice's output (leaf)
    NodeId child[2] = {0, 0};
  };

  explicit ProtocolTree(std::size_t n) : n_(n) {
    if (n > max_input_bits) throw std::invalid_argument("protocol input length > 32");
  }

  NodeId add_leaf(BitFn alice_output) {
    nodes_.push_back(Node{true, Speaker::alice, std::move(alice_output), {0, 0}});
    return static_cast<NodeId>(nodes_.size() - 1);
  }
  NodeId add_node(Speaker who, BitFn next_bit, NodeId on_zero, NodeId on_one) {
    if (on_zero >= nodes_.size() || on_one >= nodes_.size())
      throw std::invalid_argument("children must be added before their parent");
    nodes_.push_back(Node{false, who, std::move(next_bit), {on_zero, on_one}});
    return static_cast<NodeId>(nodes_.size() - 1);
  }
  void set_root(NodeId id) {
    if (id >= nodes_.size()) throw std::out_of_range("root id");
    root_ = id;
  }

  std::size_t input_length() const noexcept { return n_; }
  NodeId root() const noexcept { return root_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  std::size_t n_;
  std::vector<Node> nodes_;
  NodeId root_ = 0;
};

struct RunResult {
  bool output = false;
  BitString transcript;
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

inline RunResult run_protocol(const ProtocolTree& p, Input x, Input y) {
  if (p.node_count() == 0) throw std::logic_error("empty protocol tree");
  RunResult r;
  auto id = p.root();
  while (!p.node(id).leaf) {
    const auto& nd = p.node(id);
    const bool bit = nd.fn(nd.speaker == Speaker::alice ? x : y);
    r.transcript.push_back(bit);
    id = nd.child[bit];
  }
  r.output = p.node(id).fn(x);
  return r;
}

inline RunResult run_protocol(const ProtocolTree& p, const BitString& x, const BitString& y) {
  const std::size_t n = p.input_length();
  if (x.size() != n || y.size() != n)
    throw std::invalid_argument("run_protocol: inputs must have length " + std::to_string(n));
  return run_protocol(p, pack(x), pack(y));
}

// Bob sends y_1 .. y_n; Alice outputs <x, y> mod 2.
inline ProtocolTree build_trivial_ip_protocol(std::size_t n) {
  if (n < 1) throw std::invalid_argument("trivial protocol needs n >= 1");
  ProtocolTree p(n);
  // Build level by level from the leaves; prefix holds the bits Bob sent.
  std::function<ProtocolTree::NodeId(std::size_t, Input)> build = [&](std::size_t depth,
                                                                      Input prefix) {
    if (depth == n) return p.add_leaf([prefix](Input x) { return inner_product(x, prefix); });
    const auto zero = build(depth + 1, prefix << 1);
    const auto one = build(depth + 1, (prefix << 1) | 1u);
    return p.add_node(Speaker::bob, [n, depth](Input y) { return input_bit(y, n, depth); }, zero,
                      one);
  };
  p.set_root(build(0, 0));
  return p;
}

// Single leaf: Alice always answers `answer` without communicating.
inline ProtocolTree build_constant_protocol(std::size_t n, bool answer) {
  ProtocolTree p(n);
  p.set_root(p.add_leaf([answer](Input) { return answer; }));
  return p;
}

inline std::uint64_t input_space(std::size_t n) { return std::uint64_t{1} << n; }

// S = { a : exists b, P(a, b) = 0 with transcript C }, ascending. Along one
// path the reachable inputs form a rectangle, so Alice's and Bob's sets are
// narrowed independently; b only matters through the rectangle being nonempty.
inline std::vector<Input> enumerate_S(const ProtocolTree& p, const BitString& c) {
  const std::size_t n = p.input_length();
  if (n > max_enumeration_n)
    throw std::invalid_argument("enumerate_S: n = " + std::to_string(n) + " exceeds " +
                                std::to_string(max_enumeration_n));
  const std::uint64_t space = input_space(n);
  std::vector<std::uint8_t> alice(space, 1), bob(space, 1);
  auto id = p.root();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto& nd = p.node(id);
    if (nd.leaf) return {};  // C runs past a leaf: not a transcript of P
    auto& side = nd.speaker == Speaker::alice ? alice : bob;
    for (std::uint64_t v = 0; v < space; ++v)
      if (side[v] && nd.fn(static_cast<Input>(v)) != c[k]) side[v] = 0;
    id = nd.child[c[k]];
  }
  const auto& leaf = p.node(id);
  if (!leaf.leaf) return {};
  if (std::find(bob.begin(), bob.end(), 1) == bob.end()) return {};
  std::vector<Input> s;
  for (std::uint64_t v = 0; v < space; ++v)
    if (alice[v] && !leaf.fn(static_cast<Input>(v))) s.push_back(static_cast<Input>(v));
  return s;
}

inline gf2::Gf2Matrix matrix_of(const std::vector<Input>& s, std::size_t n) {
  gf2::Gf2Matrix m(n);
  for (Input a : s) m.push_row(unpack(a, n));
  return m;
}

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// f(x, y) = 1: describe_z only handles inner product 0; use flip_reduce.
class ReductionRequired : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::size_t ceil_log2(std::size_t v) {
  return v <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(v - 1));
}

struct IpDescription {
  BitString bits;  // C ++ x-index ++ y-coordinates
  std::size_t transcript_length = 0;
  std::size_t set_size = 0;  // l = |S|
  std::size_t index_width = 0;  // ceil(log2 l)
  std::size_t rank = 0;
  std::size_t coordinate_width = 0;  // n - rank
  std::size_t size() const noexcept { return bits.size(); }
};

inline IpDescription describe_z(const ProtocolTree& p, const BitString& z) {
  const std::size_t n = p.input_length();
  if (z.size() != 2 * n)
    throw std::invalid_argument("describe_z: z must have length 2n = " + std::to_string(2 * n));
  const Input x = pack(z.slice(0, n));
  const BitString y_bits = z.slice(n, n);
  const Input y = pack(y_bits);
  if (inner_product(x, y))
    throw ReductionRequired("describe_z: f(x, y) = 1; apply flip_reduce first");
  const RunResult run = run_protocol(p, x, y);
  if (run.output) throw ProtocolError("protocol outputs 1 on an input with inner product 0");

  const auto s = enumerate_S(p, run.transcript);
  const auto it = std::lower_bound(s.begin(), s.end(), x);
  if (it == s.end() || *it != x) throw ProtocolError("x is not in S: protocol is incorrect");
  IpDescription d;
  d.transcript_length = run.transcript.size();
  d.set_size = s.size();
  d.index_width = ceil_log2(s.size());

  const gf2::Gf2Matrix m = matrix_of(s, n);
  const auto rn = gf2::rank_nullspace(m);
  d.rank = rn.rank;
  d.coordinate_width = n - rn.rank;
  // y must be orthogonal to every a in S, i.e. y in Null(M).
  for (Input a : s)
    if (inner_product(a, y))
      throw ProtocolError("y is not in Null(M): some a in S has <a, y> = 1");
  if (d.rank < d.index_width) throw std::logic_error("rank(M) < ceil(log2 |S|)");

  BitString coords;
  for (std::size_t f : rn.free_columns) coords.push_back(y_bits[f]);
  if (gf2::combine(rn.basis, coords, n) != y_bits)
    throw std::logic_error("null-space coordinates do not reproduce y");

  d.bits = run.transcript;
  d.bits.append_uint(static_cast<std::uint64_t>(it - s.begin()), d.index_width);
  d.bits.append(coords);
  return d;
}

inline BitString reconstruct_z(const ProtocolTree& p, const BitString& d) {
  const std::size_t n = p.input_length();
  BitReader in(d);
  BitString c;
  auto id = p.root();
  while (!p.node(id).leaf) {
    bool bit = false;
    if (!in.try_read(bit)) throw DecodeError("description ends inside the transcript", in.position());
    c.push_back(bit);
    id = p.node(id).child[bit];
  }
  const auto s = enumerate_S(p, c);
  if (s.empty()) throw DecodeError("transcript is not realized by the protocol with output 0", c.size());
  const std::size_t width = ceil_log2(s.size());
  if (in.remaining() < width) throw DecodeError("description ends inside the x-index", d.size());
  const std::uint64_t index = d.read_uint(in.position(), width);
  if (index >= s.size())
    throw DecodeError("x-index " + std::to_string(index) + " out of range for |S| = " +
                          std::to_string(s.size()),
                      in.position());
  const std::size_t coord_pos = in.position() + width;
  const auto rn = gf2::rank_nullspace(matrix_of(s, n));
  const std::size_t dim = n - rn.rank;
  if (d.size() - coord_pos != dim)
    throw DecodeError("expected " + std::to_string(dim) + " null-space coordinates, found " +
                          std::to_string(d.size() - coord_pos),
                      coord_pos);
  const BitString y = gf2::combine(rn.basis, d.suffix(coord_pos), n);
  return unpack(s[static_cast<std::size_t>(index)], n) + y;
}

inline BitString reconstruct_z(const ProtocolTree& p, const IpDescription& d) {
  return reconstruct_z(p, d.bits);
}

// For f(x, y) = 1: flip x_k and y_k at the first position where x_k = y_k.
// Such k exists (some x_k = y_k = 1), the product term at k toggles, and
// the map is an involution, hence injective from {f = 1} into {f = 0}.
inline BitString flip_reduce(const BitString& z) {
  if (z.size() % 2 != 0) throw std::invalid_argument("flip_reduce: odd length");
  const std::size_t n = z.size() / 2;
  const BitString x = z.slice(0, n), y = z.slice(n, n);
  if (!inner_product(x, y)) throw std::invalid_argument("flip_reduce: f(x, y) = 0, nothing to reduce");
  BitString out = z;
  for (std::size_t k = 0; k < n; ++k) {
    if (x[k] == y[k]) {
      out.flip(k);
      out.flip(n + k);
      return out;
    }
  }
  throw std::logic_error("flip_reduce: no equal position despite f = 1");
}

struct CostEstimate {
  double mean = 0;
  double standard_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t total_length = 0;
  std::uint64_t errors = 0;  // runs whose output differs from the inner product
  double error_rate() const { return samples ? static_cast<double>(errors) / samples : 0; }
};

namespace detail {
// Runs body(a) for a in [0, count) over `workers` threads; body returns
// integer tallies that are summed, so the result does not depend on the split.
template <typename Tally, typename Body>
Tally parallel_sum(std::uint64_t count, unsigned workers, Body body) {
  workers = std::max(1u, workers);
  std::vector<Tally> partial(workers);
  std::vector<std::thread> pool;
  std::atomic<std::uint64_t> next{0};
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::uint64_t a = next++; a < count; a = next++) partial[w] += body(a);
    });
  for (auto& t : pool) t.join();
  Tally total{};
  for (auto& t : partial) total += t;
  return total;
}

struct CostTally {
  std::uint64_t length = 0, length_sq = 0, errors = 0, samples = 0;
  CostTally& operator+=(const CostTally& o) {
    length += o.length;
    length_sq += o.length_sq;
    errors += o.errors;
    samples += o.samples;
    return *this;
  }
};

inline CostEstimate finish(const CostTally& t) {
  CostEstimate e;
  e.samples = t.samples;
  e.total_length = t.length;
  e.errors = t.errors;
  if (t.samples == 0) return e;
  const double n = static_cast<double>(t.samples);
  e.mean = static_cast<double>(t.length) / n;
  if (t.samples > 1) {
    const double var = (static_cast<double>(t.length_sq) - n * e.mean * e.mean) / (n - 1);
    e.standard_error = std::sqrt(std::max(0.0, var) / n);
  }
  return e;
}
}  // namespace detail

inline constexpr std::size_t max_exhaustive_cost_n = 10;

// Mean transcript length under the uniform distribution on {0,1}^{2n}.
inline CostEstimate average_cost_exhaustive(const ProtocolTree& p, unsigned workers = 1) {
  const std::size_t n = p.input_length();
  if (n > max_exhaustive_cost_n)
    throw std::invalid_argument("exhaustive average_cost requires n <= 10");
  const std::uint64_t space = input_space(n);
  auto tally = detail::parallel_sum<detail::CostTally>(space, workers, [&](std::uint64_t a) {
    detail::CostTally t;
    for (std::uint64_t b = 0; b < space; ++b) {
      const auto r = run_protocol(p, static_cast<Input>(a), static_cast<Input>(b));
      const std::uint64_t len = r.transcript.size();
      t.length += len;
      t.length_sq += len * len;
      t.errors += r.output != inner_product(static_cast<Input>(a), static_cast<Input>(b));
      ++t.samples;
    }
    return t;
  });
  return detail::finish(tally);
}

inline CostEstimate average_cost_sampled(const ProtocolTree& p, std::uint64_t trials,
                                         std::uint64_t seed) {
  const std::size_t n = p.input_length();
  detail::CostTally t;
  for (std::uint64_t k = 0; k < trials; ++k) {
    SplitMix64 rng(derive_seed({seed, tag_hash("commsim.avgcost"), n, k}));
    const auto a = static_cast<Input>(rng.below(input_space(n)));
    const auto b = static_cast<Input>(rng.below(input_space(n)));
    const auto r = run_protocol(p, a, b);
    const std::uint64_t len = r.transcript.size();
    t.length += len;
    t.length_sq += len * len;
    t.errors += r.output != inner_product(a, b);
    ++t.samples;
  }
  return detail::finish(t);
}

// A protocol for every coin string R = (Alice's coins, Bob's coins).
struct CoinParameterizedProtocol {
  std::size_t n = 0;
  std::size_t alice_coins = 0;
  std::size_t bob_coins = 0;
  double epsilon = 0;  // declared error tolerance
  std::function<ProtocolTree(const BitString& alice_r, const BitString& bob_r)> make;

  std::size_t coin_length() const noexcept { return alice_coins + bob_coins; }
  ProtocolTree fix(const BitString& r) const {
    if (r.size() != coin_length())
      throw std::invalid_argument("coin string has " + std::to_string(r.size()) +
                                  " bits, family expects " + std::to_string(coin_length()));
    return make(r.slice(0, alice_coins), r.slice(alice_coins, bob_coins));
  }
};

inline RunResult run_randomized(const CoinParameterizedProtocol& f, const BitString& x,
                                const BitString& y, const BitString& r) {
  return run_protocol(f.fix(r), x, y);
}

// Bob sends y XOR mask; Alice computes the inner product with what she
// received and XORs her answer with flip_output.
inline ProtocolTree build_masked_ip_protocol(std::size_t n, Input mask, bool flip_output) {
  ProtocolTree p(n);
  std::function<ProtocolTree::NodeId(std::size_t, Input)> build = [&](std::size_t depth,
                                                                      Input prefix) {
    if (depth == n)
      return p.add_leaf(
          [prefix, flip_output](Input x) { return inner_product(x, prefix) != flip_output; });
    const auto zero = build(depth + 1, prefix << 1);
    const auto one = build(depth + 1, (prefix << 1) | 1u);
    const bool m = input_bit(mask, n, depth);
    return p.add_node(Speaker::bob, [n, depth, m](Input y) { return input_bit(y, n, depth) != m; },
                      zero, one);
  };
  p.set_root(build(0, 0));
  return p;
}

// Trivial protocol whose first bit from Bob is XORed with Bob's first coin.
inline CoinParameterizedProtocol xor_corrupt_family(std::size_t n) {
  CoinParameterizedProtocol f;
  f.n = n;
  f.alice_coins = 1;
  f.bob_coins = 1;
  f.epsilon = 0.5;
  f.make = [n](const BitString&, const BitString& bob_r) {
    const Input mask = bob_r[0] ? Input{1} << (n - 1) : 0;
    return build_masked_ip_protocol(n, mask, false);
  };
  return f;
}

inline CoinParameterizedProtocol constant_family(std::size_t n, std::size_t coins, bool answer) {
  CoinParameterizedProtocol f;
  f.n = n;
  f.alice_coins = coins / 2;
  f.bob_coins = coins - coins / 2;
  f.epsilon = 0.5;
  f.make = [n, answer](const BitString&, const BitString&) {
    return build_constant_protocol(n, answer);
  };
  return f;
}

inline CoinParameterizedProtocol trivial_family(std::size_t n, std::size_t coins) {
  CoinParameterizedProtocol f;
  f.n = n;
  f.alice_coins = coins / 2;
  f.bob_coins = coins - coins / 2;
  f.make = [n](const BitString&, const BitString&) { return build_trivial_ip_protocol(n); };
  return f;
}

// Seeded family: Bob's coins select a corruption mask for what he sends,
// Alice's coins decide whether she flips her answer. Each mask bit and the
// flip are set with probability 1/4 per coin value.
inline CoinParameterizedProtocol random_family(std::size_t n, std::size_t alice_coins,
                                               std::size_t bob_coins, std::uint64_t seed) {
  CoinParameterizedProtocol f;
  f.n = n;
  f.alice_coins = alice_coins;
  f.bob_coins = bob_coins;
  f.epsilon = 0.5;
  f.make = [n, seed](const BitString& alice_r, const BitString& bob_r) {
    SplitMix64 bob_rng(derive_seed({seed, 0xb0b, pack(bob_r), bob_r.size()}));
    Input mask = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (bob_rng.below(4) == 0) mask |= Input{1} << k;
    SplitMix64 alice_rng(derive_seed({seed, 0xa11ce, pack(alice_r), alice_r.size()}));
    const bool flip = alice_rng.below(4) == 0;
    return build_masked_ip_protocol(n, mask, flip);
  };
  return f;
}

inline constexpr std::size_t max_coin_length = 16;
inline constexpr std::size_t max_coin_search_n = 6;

struct CoinSearch {
  BitString best_coins;
  std::uint64_t best_errors = 0;
  std::uint64_t inputs = 0;        // 2^{2n}
  std::uint64_t total_errors = 0;  // summed over every R
  std::uint64_t coin_strings = 0;  // 2^{coin length}

  double best_error_rate() const { return static_cast<double>(best_errors) / inputs; }
  double mean_error_rate() const {
    return static_cast<double>(total_errors) / (static_cast<double>(inputs) * coin_strings);
  }
  // min_R error(R) <= mean_R error(R), compared exactly.
  bool pigeonhole_holds() const { return best_errors * coin_strings <= total_errors; }
};

inline std::uint64_t count_errors(const ProtocolTree& p) {
  const std::size_t n = p.input_length();
  std::uint64_t errors = 0;
  for (std::uint64_t a = 0; a < input_space(n); ++a)
    for (std::uint64_t b = 0; b < input_space(n); ++b) {
      const auto x = static_cast<Input>(a), y = static_cast<Input>(b);
      errors += run_protocol(p, x, y).output != inner_product(x, y);
    }
  return errors;
}

// Exhaustive over R and all input pairs. Ties go to the smallest R.
inline CoinSearch best_coin_sequence(const CoinParameterizedProtocol& f, unsigned workers = 1) {
  if (f.coin_length() > max_coin_length || f.n > max_coin_search_n)
    throw std::invalid_argument("best_coin_sequence: needs coin length <= 16 and n <= 6");
  const std::size_t k = f.coin_length();
  const std::uint64_t coin_strings = std::uint64_t{1} << k;
  std::vector<std::uint64_t> errors(coin_strings, 0);
  struct Unit {
    Unit& operator+=(const Unit&) { return *this; }
  };
  detail::parallel_sum<Unit>(coin_strings, workers, [&](std::uint64_t r) {
    errors[r] = count_errors(f.fix(BitString::from_uint(r, k)));
    return Unit{};
  });
  CoinSearch out;
  out.inputs = input_space(2 * f.n);
  out.coin_strings = coin_strings;
  std::uint64_t best = 0;
  for (std::uint64_t r = 0; r < coin_strings; ++r) {
    out.total_errors += errors[r];
    if (errors[r] < errors[best]) best = r;
  }
  out.best_coins = BitString::from_uint(best, k);
  out.best_errors = errors[best];
  return out;
}

}  // namespace incomp::commsim

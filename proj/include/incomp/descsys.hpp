#pragma once

// Finite description systems: bounded partial decoders from programs to
// strings, the complexity measure C_D they induce, and exhaustive checks of
// the counting arguments (incompressibility lemma, maximal-complexity census,
// the U'(1p) = p / U'(0p) = U(p) transformation).
//
// Strings and programs are stored by their index under the length-increasing
// lexicographic bijection, so "all programs of length < k" is the index range
// [0, 2^k - 1).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "incomp/bitstring.hpp"
#include "incomp/codes.hpp"
#include "incomp/random.hpp"

namespace incomp::descsys {

inline constexpr std::size_t max_program_length = 22;
inline constexpr std::size_t max_generated_length = 20;

// Number of strings of length <= len, i.e. 2^{len+1} - 1.
constexpr std::uint64_t strings_up_to(std::size_t len) noexcept {
  return (std::uint64_t{1} << (len + 1)) - 1;
}

// Length of the string with the given bijection index.
constexpr std::size_t length_of_index(std::uint64_t index) noexcept {
  return static_cast<std::size_t>(std::bit_width(index + 1)) - 1;
}

class DescriptionSystem {
 public:
  using index_type = std::int64_t;
  static constexpr index_type absent = -1;

  explicit DescriptionSystem(std::size_t program_length_bound)
      : bound_(program_length_bound) {
    if (bound_ > max_program_length)
      throw std::invalid_argument("program length bound " + std::to_string(bound_) +
                                  " exceeds supported maximum " +
                                  std::to_string(max_program_length));
    images_.assign(static_cast<std::size_t>(strings_up_to(bound_)), absent);
  }

  std::size_t program_length_bound() const noexcept { return bound_; }
  std::size_t program_count() const noexcept { return images_.size(); }

  void set(std::uint64_t program, std::uint64_t image) {
    check_program(program);
    images_[program] = static_cast<index_type>(image);
  }
  void set(const BitString& program, const BitString& image) {
    set(codes::to_number(program), codes::to_number(image));
  }
  void erase(std::uint64_t program) {
    check_program(program);
    images_[program] = absent;
  }
  void erase(const BitString& program) { erase(codes::to_number(program)); }

  // Index of D(p), or absent.
  index_type image_index(std::uint64_t program) const noexcept {
    return program < images_.size() ? images_[program] : absent;
  }

  std::optional<BitString> operator()(const BitString& program) const {
    if (program.size() > bound_) return std::nullopt;
    const index_type v = images_[codes::to_number(program)];
    if (v == absent) return std::nullopt;
    return codes::to_string(static_cast<std::uint64_t>(v));
  }

  std::size_t domain_size() const noexcept {
    std::size_t n = 0;
    for (index_type v : images_) n += v != absent;
    return n;
  }

  friend bool operator==(const DescriptionSystem&, const DescriptionSystem&) = default;

 private:
  void check_program(std::uint64_t program) const {
    if (program >= images_.size())
      throw std::out_of_range("program longer than the system's length bound");
  }

  std::size_t bound_;
  std::vector<index_type> images_;
};

// Minimal program lengths C_D(x) for every x with l(x) <= universe_max_len.
class ComplexityProfile {
 public:
  static constexpr std::uint32_t undescribed = ~std::uint32_t{0};

  ComplexityProfile(std::size_t universe_max_len, std::vector<std::uint32_t> values)
      : universe_max_len_(universe_max_len), values_(std::move(values)) {}

  std::size_t universe_max_len() const noexcept { return universe_max_len_; }
  std::size_t size() const noexcept { return values_.size(); }

  // nullopt means no program describes x (C_D(x) = infinity).
  std::optional<std::size_t> complexity(std::uint64_t index) const {
    const std::uint32_t v = values_.at(static_cast<std::size_t>(index));
    if (v == undescribed) return std::nullopt;
    return v;
  }
  std::optional<std::size_t> complexity(const BitString& x) const {
    return complexity(codes::to_number(x));
  }

  bool at_least(std::uint64_t index, std::int64_t threshold) const {
    const std::uint32_t v = values_.at(static_cast<std::size_t>(index));
    return v == undescribed || static_cast<std::int64_t>(v) >= threshold;
  }

  // #{x in universe : C_D(x) < k}
  std::size_t count_below(std::size_t k) const noexcept {
    std::size_t n = 0;
    for (std::uint32_t v : values_) n += v != undescribed && v < k;
    return n;
  }

  std::span<const std::uint32_t> raw() const noexcept { return values_; }

 private:
  std::size_t universe_max_len_;
  std::vector<std::uint32_t> values_;
};

inline ComplexityProfile complexity_profile(const DescriptionSystem& d,
                                            std::size_t universe_max_len) {
  if (universe_max_len > 30)
    throw std::invalid_argument("universe too large for an exhaustive profile");
  const auto universe = static_cast<std::size_t>(strings_up_to(universe_max_len));
  std::vector<std::uint32_t> values(universe, ComplexityProfile::undescribed);
  // Program indices increase with length, so the first hit is minimal.
  for (std::uint64_t p = 0; p < d.program_count(); ++p) {
    const auto img = d.image_index(p);
    if (img == DescriptionSystem::absent || static_cast<std::uint64_t>(img) >= universe)
      continue;
    auto& slot = values[static_cast<std::size_t>(img)];
    if (slot == ComplexityProfile::undescribed)
      slot = static_cast<std::uint32_t>(length_of_index(p));
  }
  return ComplexityProfile(universe_max_len, std::move(values));
}

class InfeasibleBound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic pseudo-random partial decoder. Each unreserved program is in
// the domain with probability 1/2 and maps to a uniform string of the
// universe. With c_bound, every universe string is first given a private
// program of length <= l(x) + c_bound (capped at L).
inline DescriptionSystem random_description_system(std::size_t L,
                                                   std::size_t universe_max_len,
                                                   std::optional<std::size_t> c_bound,
                                                   std::uint64_t seed) {
  if (L > max_generated_length)
    throw std::invalid_argument("L = " + std::to_string(L) + " exceeds " +
                                std::to_string(max_generated_length));
  if (universe_max_len > max_generated_length)
    throw std::invalid_argument("universe too large");
  DescriptionSystem d(L);
  SplitMix64 rng(derive_seed({seed, tag_hash("descsys"), L, universe_max_len,
                              c_bound ? *c_bound + 1 : 0}));
  const std::uint64_t universe = strings_up_to(universe_max_len);
  std::vector<bool> reserved(d.program_count(), false);

  if (c_bound) {
    std::vector<std::uint64_t> pool;
    std::uint64_t next_program = 0;
    for (std::uint64_t x = 0; x < universe; ++x) {
      const std::size_t cap = std::min(L, length_of_index(x) + *c_bound);
      const std::uint64_t limit = strings_up_to(cap);
      for (; next_program < limit; ++next_program) pool.push_back(next_program);
      if (pool.empty())
        throw InfeasibleBound("c_bound " + std::to_string(*c_bound) + " infeasible: " +
                              std::to_string(d.program_count()) +
                              " programs cannot cover " + std::to_string(universe) +
                              " strings (ran out at length " +
                              std::to_string(length_of_index(x)) + ")");
      const auto k = static_cast<std::size_t>(rng.below(pool.size()));
      std::swap(pool[k], pool.back());
      const std::uint64_t p = pool.back();
      pool.pop_back();
      reserved[p] = true;
      d.set(p, x);
    }
  }
  for (std::uint64_t p = 0; p < d.program_count(); ++p) {
    if (reserved[p]) continue;
    if (rng.next_bit()) d.set(p, rng.below(universe));
  }
  return d;
}

// D'(1p) = p and D'(0p) = D(p).
inline DescriptionSystem prefix_adjoin(const DescriptionSystem& d) {
  const std::size_t L = d.program_length_bound();
  if (L + 1 > max_program_length)
    throw std::invalid_argument("prefix_adjoin would exceed the supported program length");
  DescriptionSystem out(L + 1);
  for (std::uint64_t p = 0; p < d.program_count(); ++p) {
    const std::size_t len = length_of_index(p);
    const std::uint64_t offset = p - (strings_up_to(len) >> 1);  // value of p's bits
    const std::uint64_t base = strings_up_to(len + 1) >> 1;      // first program of length len+1
    const std::uint64_t zero_p = base + offset;
    const std::uint64_t one_p = base + (std::uint64_t{1} << len) + offset;
    out.set(one_p, p);
    if (const auto img = d.image_index(p); img != DescriptionSystem::absent)
      out.set(zero_p, static_cast<std::uint64_t>(img));
  }
  return out;
}

struct LemmaReport {
  std::size_t m = 0;
  std::size_t c = 0;
  std::int64_t threshold = 0;  // floor(log2 m) - c
  std::size_t count_incompressible = 0;
  // Proof form: m - 2^threshold + 1; meaningless when threshold < 0.
  std::int64_t bound = 0;
  bool vacuous = false;
  // Stated form m(1 - 2^-c) + 1 as numerator / 2^c.
  std::uint64_t stated_bound_num = 0;
  std::uint64_t stated_bound_den = 1;
  bool stated_form_holds = false;
  bool holds = false;
};

inline LemmaReport check_counting_lemma(const DescriptionSystem& d,
                                        std::span<const BitString> set, std::size_t c) {
  if (set.empty()) throw std::invalid_argument("check_counting_lemma: A must be nonempty");
  if (c < 1 || c > 62) throw std::invalid_argument("check_counting_lemma: c must be in 1..62");
  std::size_t max_len = 0;
  for (const auto& x : set) max_len = std::max(max_len, x.size());
  const ComplexityProfile profile = complexity_profile(d, max_len);

  LemmaReport r;
  r.m = set.size();
  r.c = c;
  const auto log_m = static_cast<std::int64_t>(std::bit_width(r.m)) - 1;
  r.threshold = log_m - static_cast<std::int64_t>(c);
  for (const auto& x : set)
    r.count_incompressible += profile.at_least(codes::to_number(x), r.threshold);

  r.stated_bound_den = std::uint64_t{1} << c;
  r.stated_bound_num = r.m * (r.stated_bound_den - 1) + r.stated_bound_den;
  r.stated_form_holds = r.count_incompressible * r.stated_bound_den >= r.stated_bound_num;

  if (r.threshold < 0) {
    r.vacuous = true;
    r.holds = true;
  } else {
    r.bound = static_cast<std::int64_t>(r.m) - (std::int64_t{1} << r.threshold) + 1;
    r.holds = static_cast<std::int64_t>(r.count_incompressible) >= r.bound;
  }
  return r;
}

struct CensusReport {
  std::size_t n = 0;
  std::size_t c = 0;
  // D is c-bounded on strings of length <= n: C_D(x) <= l(x) + c.
  bool premise_c_bounded = false;
  std::size_t count_at_least_n = 0;    // l(x) = n, C_D(x) >= n
  std::size_t count_greater_n = 0;     // l(x) = n, C_D(x) > n
  std::size_t count_equal_n = 0;       // l(x) = n, C_D(x) = n
  std::size_t count_equal_n_plus_1 = 0;
  std::size_t count_undescribed_n = 0;  // l(x) = n, no program at all
  std::uint64_t bound = 0;             // 2^{n-c}
  bool bound_vacuous = false;          // c > n
  bool asserted = false;
  bool holds = true;
  // #{x : n - c <= l(x) <= n, C_D(x) > n}
  std::size_t window_count_greater_n = 0;
  // Some x with l(x) <= n has no program of length <= n.
  bool some_string_beyond_n = false;
};

inline CensusReport max_complexity_census(const DescriptionSystem& d, std::size_t n,
                                          std::size_t c) {
  if (n > 30) throw std::invalid_argument("census length too large");
  const ComplexityProfile profile = complexity_profile(d, n);
  CensusReport r;
  r.n = n;
  r.c = c;
  r.premise_c_bounded = true;
  const auto raw = profile.raw();
  for (std::uint64_t x = 0; x < raw.size(); ++x) {
    const std::size_t len = length_of_index(x);
    const std::uint32_t v = raw[static_cast<std::size_t>(x)];
    const bool undescribed = v == ComplexityProfile::undescribed;
    if (undescribed || v > len + c) r.premise_c_bounded = false;
    if (undescribed || v > n) {
      r.some_string_beyond_n = true;
      if (len + c >= n) ++r.window_count_greater_n;
    }
    if (len != n) continue;
    if (undescribed) ++r.count_undescribed_n;
    if (undescribed || v >= n) ++r.count_at_least_n;
    if (undescribed || v > n) ++r.count_greater_n;
    if (!undescribed && v == n) ++r.count_equal_n;
    if (!undescribed && v == n + 1) ++r.count_equal_n_plus_1;
  }
  r.bound_vacuous = c > n;
  r.bound = r.bound_vacuous ? 0 : std::uint64_t{1} << (n - c);
  r.asserted = r.premise_c_bounded && !r.bound_vacuous;
  if (r.asserted) r.holds = r.count_at_least_n >= r.bound;
  return r;
}

}  // namespace incomp::descsys

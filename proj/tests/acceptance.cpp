// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and runtime limits are pinned here.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "incomp/incomp.hpp"

namespace {

using namespace incomp;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

unsigned workers() { return std::max(2u, std::thread::hardware_concurrency()); }

void criterion(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  char timing[96];
  if (limit_seconds > 0) {
    std::snprintf(timing, sizeof timing, "%.2fs, limit %.0fs", secs, limit_seconds);
    if (secs >= limit_seconds) o.pass = false;
  } else {
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-28s %s [%s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Splits [0, count) over threads; returns the sum of fn over the range.
std::uint64_t parallel_count(std::uint64_t count, const std::function<std::uint64_t(std::uint64_t)>& fn) {
  std::atomic<std::uint64_t> total{0};
  harness::parallel_for(count, workers(), [&](std::uint64_t k) { total += fn(k); });
  return total;
}

Outcome codes_exhaustive() {
  const std::uint64_t count = descsys::strings_up_to(12);
  std::uint64_t bad_roundtrip = 0, bad_length = 0, not_prefix_free = 0;
  const BitString tail = BitString::from_string("1011");
  for (int level = 0; level <= 3; ++level) {
    const codes::CodeLevel lv(level);
    std::vector<BitString> words;
    words.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const BitString x = codes::to_string(i);
      BitString w = codes::encode(lv, x);
      const std::size_t l = x.size();
      if (level == 1 && w.size() != 2 * l + 1) ++bad_length;
      if (level == 2 && w.size() != l + 2 * codes::length_of_length(l) + 1) ++bad_length;
      const auto d = codes::decode(lv, w + tail);
      if (!(d.value == x && d.remainder == tail)) ++bad_roundtrip;
      words.push_back(std::move(w));
    }
    not_prefix_free += !codes::is_prefix_free(words).prefix_free;
  }
  return {bad_roundtrip + bad_length + not_prefix_free == 0,
          fmt("4 levels x %llu strings: roundtrip failures %llu, length failures %llu, "
              "non-prefix-free levels %llu",
              (unsigned long long)count, (unsigned long long)bad_roundtrip,
              (unsigned long long)bad_length, (unsigned long long)not_prefix_free)};
}

Outcome counting_lemma() {
  harness::ExperimentConfig cfg;
  cfg.experiment = harness::Experiment::descsys_check;
  cfg.trials = 1000;
  cfg.workers = workers();
  cfg.options = {{"L", "12"}, {"universe", "8"}, {"c", "1..6"}};
  const auto r = harness::run_experiment(cfg);
  const std::uint64_t checks = r.summary["checks_run"], fails = r.summary["failures"];
  return {r.passed && checks == 6000,
          fmt("%llu (system, c) checks, %llu violations of count >= m - 2^(floor(log m) - c) + 1",
              (unsigned long long)checks, (unsigned long long)fails)};
}

Outcome census() {
  std::atomic<std::uint64_t> checks{0}, fails{0}, premise{0};
  harness::parallel_for(3 * 10 * 100, workers(), [&](std::uint64_t k) {
    const std::size_t c = k / 1000, n = 1 + (k / 100) % 10, s = k % 100;
    const auto d = descsys::random_description_system(n + c, n, c, derive_seed({tag_hash("census"), c, n, s}));
    const auto r = descsys::max_complexity_census(d, n, c);
    premise += !r.premise_c_bounded;
    if (r.bound_vacuous) return;
    ++checks;
    fails += !r.holds;
  });
  return {fails == 0 && premise == 0 && checks > 0,
          fmt("%llu systems (c in 0..2, n in 1..10): %llu below 2^(n-c), %llu premise violations",
              (unsigned long long)checks.load(), (unsigned long long)fails.load(),
              (unsigned long long)premise.load())};
}

Outcome prefix_adjoin_remark() {
  std::atomic<std::uint64_t> strings{0}, fails{0};
  const std::uint64_t per_L = 20;
  harness::parallel_for(11 * per_L, workers(), [&](std::uint64_t k) {
    const std::size_t L = k / per_L;
    const auto d = descsys::random_description_system(L, L, std::nullopt, derive_seed({tag_hash("adjoin"), k}));
    const auto prof = descsys::complexity_profile(descsys::prefix_adjoin(d), L);
    for (std::uint64_t x = 0; x < prof.size(); ++x) {
      const auto c = prof.complexity(x);
      fails += !c || *c > descsys::length_of_index(x) + 1;
    }
    strings += prof.size();
  });
  return {fails == 0, fmt("220 systems, L in 0..10, %llu strings checked, %llu with C_D'(x) > l(x)+1",
                          (unsigned long long)strings.load(), (unsigned long long)fails.load())};
}

Outcome quickmultiply_correct() {
  std::uint64_t exhaustive = 0, mismatches = 0;
  for (std::size_t n : {2, 3}) {
    const std::size_t cells = n * n;
    const std::uint64_t space = std::uint64_t{1} << cells;
    mismatches += parallel_count(space, [&](std::uint64_t va) {
      std::uint64_t bad = 0;
      const auto a = matmul::BoolMatrix::from_bits(BitString::from_uint(va, cells), n);
      for (std::uint64_t vb = 0; vb < space; ++vb) {
        const auto b = matmul::BoolMatrix::from_bits(BitString::from_uint(vb, cells), n);
        bad += !(matmul::quick_multiply(a, b).product == matmul::naive_multiply(a, b));
      }
      return bad;
    });
    exhaustive += space * space;
  }
  const std::uint64_t seeded = 10'000;
  mismatches += parallel_count(seeded, [](std::uint64_t k) {
    const std::size_t n = 8 + k % 121;
    SplitMix64 rng(derive_seed({tag_hash("qm-correct"), k}));
    const auto a = matmul::BoolMatrix::random(n, rng), b = matmul::BoolMatrix::random(n, rng);
    return std::uint64_t(!(matmul::quick_multiply(a, b).product == matmul::naive_multiply(a, b)));
  });
  return {mismatches == 0, fmt("%llu exhaustive pairs (n=2,3) + %llu seeded (n=8..128): %llu mismatches",
                               (unsigned long long)exhaustive, (unsigned long long)seeded,
                               (unsigned long long)mismatches)};
}

Outcome quickmultiply_cost() {
  harness::ExperimentConfig cfg;
  cfg.experiment = harness::Experiment::matmul_bench;
  cfg.sizes = {64, 128, 256, 512};
  cfg.trials = 100;
  cfg.workers = workers();
  const auto r = harness::run_experiment(cfg);
  std::string detail;
  bool within = true;
  for (const auto& s : r.summary["per_size"]) {
    const double n = s["n"], mean = s["mean"];
    detail += fmt("n=%g mean/n^2=%.3f; ", n, mean / (n * n));
    within = within && mean <= 3 * n * n;
  }
  const double slope = r.summary["slope_runtime_proxy"];
  const bool slope_ok = slope >= 1.8 && slope <= 2.2;
  detail += fmt("all <= 3: %s; slope of (mean probes + n^2) = %.4f, window [1.8, 2.2]",
                within ? "yes" : "no", slope);
  return {within && slope_ok, detail};
}

Outcome witness_codec() {
  const std::size_t n = 64;
  const double limit = 2.0 * n * n - std::log2(static_cast<double>(n));
  std::uint64_t bad_roundtrip = 0, too_long = 0;
  std::size_t longest = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    SplitMix64 rng(derive_seed({tag_hash("witness"), k}));
    auto [a, b] = matmul::planted_instance(n, 0, 0, rng);
    const auto d = matmul::matmul_witness_encode(a, b, 0, 0);
    const auto back = matmul::matmul_witness_decode(d, n);
    bad_roundtrip += !(back.a == a && back.b == b && back.i == 0 && back.j == 0);
    too_long += !(static_cast<double>(d.size()) < limit);
    longest = std::max(longest, d.size());
  }
  return {bad_roundtrip == 0 && too_long == 0,
          fmt("100 planted n=64: roundtrip failures %llu, longest %zu bits vs bound %.0f, over bound %llu",
              (unsigned long long)bad_roundtrip, longest, limit, (unsigned long long)too_long)};
}

Outcome tournament_correct() {
  std::atomic<std::uint64_t> verified_bad{0}, corrected_bad{0}, inputs{0};
  for (std::size_t n = 0; n <= 20; ++n) {
    const std::uint64_t space = std::uint64_t{1} << n;
    const std::uint64_t chunk = 4096;
    harness::parallel_for((space + chunk - 1) / chunk, workers(), [&](std::uint64_t c) {
      std::uint64_t vb = 0, cb = 0;
      for (std::uint64_t v = c * chunk; v < std::min(space, (c + 1) * chunk); ++v) {
        const auto x = BitString::from_uint(v, n);
        const auto truth = majority::majority_oracle(x);
        vb += !(majority::tournament(x, majority::Mode::verified).verdict == truth);
        if (truth.has_majority()) cb += !(majority::tournament(x, majority::Mode::corrected).verdict == truth);
      }
      verified_bad += vb;
      corrected_bad += cb;
    });
    inputs += space;
  }
  return {verified_bad == 0 && corrected_bad == 0,
          fmt("%llu inputs n=0..20: verified disagreements %llu, corrected misses on majorities %llu",
              (unsigned long long)inputs.load(), (unsigned long long)verified_bad.load(),
              (unsigned long long)corrected_bad.load())};
}

Outcome tournament_worst_case() {
  std::string mismatched;
  std::vector<majority::WorstCase> ws(18);
  harness::parallel_for(18, workers(), [&](std::uint64_t k) {
    ws[k] = majority::worst_case_scan(k + 1, majority::Mode::corrected);
  });
  for (const auto& w : ws)
    if (!w.matches_n_minus_nu)
      mismatched += fmt("n=%zu max=%zu expected=%zu; ", w.n, w.max_comparisons, w.n_minus_nu);
  return {mismatched.empty(),
          mismatched.empty() ? std::string("max comparisons = n - nu(n) for n = 1..18") : mismatched};
}

Outcome tournament_average() {
  harness::ExperimentConfig cfg;
  cfg.experiment = harness::Experiment::majority_bench;
  cfg.sizes = {4096};
  cfg.trials = 10'000;
  cfg.mode = "corrected";
  cfg.workers = workers();
  const auto r = harness::run_experiment(cfg);
  const auto& s = r.summary["per_size"][0];
  const double ratio = s["mean_over_n"], lo = s["window"][0], hi = s["window"][1];
  return {ratio >= lo && ratio <= hi,
          fmt("mean comparisons / n = %.5f, window [%.3f, %.3f]", ratio, lo, hi)};
}

Outcome commsim_reconstruction() {
  std::atomic<std::uint64_t> checks{0}, bad{0};
  auto check = [&](const commsim::ProtocolTree& p, std::size_t n, const BitString& z) {
    const auto d = commsim::describe_z(p, z);
    const bool ok = d.size() == d.transcript_length + d.index_width + (n - d.rank) &&
                    d.size() <= 2 * n && commsim::reconstruct_z(p, d) == z;
    ++checks;
    bad += !ok;
  };
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto p = commsim::build_trivial_ip_protocol(n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << (2 * n)); ++v) {
      const auto z = BitString::from_uint(v, 2 * n);
      if (!commsim::inner_product(z.slice(0, n), z.slice(n, n))) check(p, n, z);
    }
  }
  const std::size_t n = 10;
  const auto p = commsim::build_trivial_ip_protocol(n);
  harness::parallel_for(1000, workers(), [&](std::uint64_t k) {
    SplitMix64 rng(derive_seed({tag_hash("commsim-random"), k}));
    BitString z;
    do {
      z = BitString();
      for (std::size_t i = 0; i < 2 * n; ++i) z.push_back(rng.next_bit());
    } while (commsim::inner_product(z.slice(0, n), z.slice(n, n)));
    check(p, n, z);
  });
  return {bad == 0, fmt("%llu descriptions (exhaustive n<=5, 1000 random n=10): %llu failures",
                        (unsigned long long)checks.load(), (unsigned long long)bad.load())};
}

// Rank of the transpose by a separate elimination; row rank = column rank.
std::size_t transpose_rank(const gf2::Gf2Matrix& m) {
  gf2::Gf2Matrix t(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    BitString col;
    for (std::size_t i = 0; i < m.rows(); ++i) col.push_back(m.get(i, j));
    t.push_row(col);
  }
  return gf2::rank_nullspace(t).rank;
}

bool rank_nullity_ok(const gf2::Gf2Matrix& m) {
  const auto r = gf2::rank_nullspace(m);
  if (r.rank + r.basis.size() != m.cols()) return false;
  if (m.rows() > 0 && transpose_rank(m) != r.rank) return false;
  for (std::size_t k = 0; k < r.basis.size(); ++k) {
    if (m.multiply(r.basis[k]).popcount() != 0) return false;
    // independence: basis restricted to the free columns is the identity
    for (std::size_t f = 0; f < r.free_columns.size(); ++f)
      if (r.basis[k][r.free_columns[f]] != (f == k)) return false;
  }
  return true;
}

Outcome rank_nullity() {
  std::uint64_t bad = parallel_count(1u << 16, [](std::uint64_t v) {
    gf2::Gf2Matrix m(4);
    for (std::size_t i = 0; i < 4; ++i) m.push_row(BitString::from_uint((v >> (4 * i)) & 15u, 4));
    // the null space has exactly 2^dim members
    std::size_t members = 0;
    for (std::uint64_t y = 0; y < 16; ++y) members += m.multiply(BitString::from_uint(y, 4)).popcount() == 0;
    const auto r = gf2::rank_nullspace(m);
    return std::uint64_t(!rank_nullity_ok(m) || members != (std::size_t{1} << r.basis.size()));
  });
  bad += parallel_count(10'000, [](std::uint64_t k) {
    SplitMix64 rng(derive_seed({tag_hash("rank"), k}));
    const std::size_t cols = 1 + rng.below(32), rows = rng.below(33);
    gf2::Gf2Matrix m(cols);
    for (std::size_t i = 0; i < rows; ++i) {
      BitString row;
      // sparse rows now and then, so low ranks occur
      const bool sparse = k % 3 == 0;
      for (std::size_t j = 0; j < cols; ++j) row.push_back(sparse ? rng.below(8) == 0 : rng.next_bit());
      m.push_row(row);
    }
    return std::uint64_t(!rank_nullity_ok(m));
  });
  return {bad == 0, fmt("65536 4x4 + 10000 random (n<=32) matrices: %llu failures", (unsigned long long)bad)};
}

Outcome average_communication() {
  std::string costs;
  bool exact = true;
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto e = commsim::average_cost_exhaustive(commsim::build_trivial_ip_protocol(n), workers());
    exact = exact && e.total_length == n * e.samples && e.errors == 0;
  }
  bool counts_ok = true;
  for (std::size_t n = 1; n <= 6; ++n) {
    std::uint64_t zeros = 0;
    std::vector<std::uint8_t> hit(std::size_t{1} << (2 * n), 0);
    for (std::uint64_t v = 0; v < hit.size(); ++v) {
      const auto z = BitString::from_uint(v, 2 * n);
      if (!commsim::inner_product(z.slice(0, n), z.slice(n, n))) {
        ++zeros;
        continue;
      }
      const auto r = commsim::flip_reduce(z);
      const auto idx = r.read_uint(0, 2 * n);
      if (commsim::inner_product(r.slice(0, n), r.slice(n, n)) || hit[idx]) counts_ok = false;
      hit[idx] = 1;
    }
    counts_ok = counts_ok && zeros >= (std::uint64_t{1} << (2 * n - 1));
  }
  return {exact && counts_ok,
          fmt("trivial protocol mean cost == n for n=1..10: %s; flip_reduce injective into f=0 and "
              "#f=0 >= 2^(2n-1) for n=1..6: %s",
              exact ? "yes" : "no", counts_ok ? "yes" : "no")};
}

Outcome randomized() {
  const auto x = commsim::best_coin_sequence(commsim::xor_corrupt_family(2), workers());
  std::uint64_t pigeon_bad = !x.pigeonhole_holds();
  double worst_gap = 1;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto s = commsim::best_coin_sequence(commsim::random_family(3, 2, 3, derive_seed({tag_hash("coins"), k})));
    pigeon_bad += !s.pigeonhole_holds();
    worst_gap = std::min(worst_gap, s.mean_error_rate() - s.best_error_rate());
  }
  return {x.best_errors == 0 && pigeon_bad == 0,
          fmt("xor-corrupt n=2 best error %.3f (mean over R %.3f); 100 random families: %llu "
              "pigeonhole violations, smallest mean-min gap %.4f",
              x.best_error_rate(), x.mean_error_rate(), (unsigned long long)pigeon_bad, worst_gap)};
}

}  // namespace

int main() {
  std::printf("acceptance suite, %u workers\n", workers());
  criterion(1, "codes roundtrip/prefix", 10, codes_exhaustive);
  criterion(2, "counting lemma", 60, counting_lemma);
  criterion(3, "max-complexity census", 0, census);
  criterion(4, "prefix adjoin remark", 0, prefix_adjoin_remark);
  criterion(5, "quickmultiply correctness", 0, quickmultiply_correct);
  criterion(6, "quickmultiply average cost", 300, quickmultiply_cost);
  criterion(7, "matmul witness codec", 0, witness_codec);
  criterion(8, "tournament correctness", 300, tournament_correct);
  criterion(9, "tournament worst case", 0, tournament_worst_case);
  criterion(10, "tournament average", 120, tournament_average);
  criterion(11, "commsim reconstruction", 0, commsim_reconstruction);
  criterion(12, "rank-nullity", 0, rank_nullity);
  criterion(13, "average communication", 0, average_communication);
  criterion(14, "randomized protocols", 0, randomized);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

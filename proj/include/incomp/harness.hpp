#pragma once

// Experiment orchestration: configs, seeded batch runs of the module
// benchmarks, CSV rows plus a JSON summary, and the key = value config format.
//
// Per-trial seeds are derive_seed({master_seed, tag_hash(experiment), size,
// trial}); rows are collected per trial and emitted in trial order, so the
// output bytes do not depend on the worker count.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "incomp/bitstring.hpp"
#include "incomp/codes.hpp"
#include "incomp/commsim.hpp"
#include "incomp/descsys.hpp"
#include "incomp/majority.hpp"
#include "incomp/matmul.hpp"
#include "incomp/random.hpp"
#include "incomp/stats.hpp"

namespace incomp::harness {

using json = nlohmann::ordered_json;

enum class Experiment { matmul_bench, majority_bench, commsim_verify, descsys_check, codes_check };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::matmul_bench: return "matmul_bench";
    case Experiment::majority_bench: return "majority_bench";
    case Experiment::commsim_verify: return "commsim_verify";
    case Experiment::descsys_check: return "descsys_check";
    case Experiment::codes_check: return "codes_check";
  }
  return "?";
}

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::matmul_bench, Experiment::majority_bench, Experiment::commsim_verify,
                 Experiment::descsys_check, Experiment::codes_check})
    if (to_string(e) == s) return e;
  throw ConfigError("unknown experiment '" + s + "'");
}

struct ExperimentConfig {
  Experiment experiment = Experiment::codes_check;
  std::vector<std::uint64_t> sizes;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::string mode;  // majority_bench: tournament mode
  bool record_wallclock = false;  // off keeps matmul CSVs byte-reproducible
  std::map<std::string, std::string> options;
  std::filesystem::path output;

  std::uint64_t option(const std::string& key, std::uint64_t fallback) const {
    auto it = options.find(key);
    if (it == options.end()) return fallback;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("option '" + key + "' must be a non-negative integer");
    }
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a non-negative integer");
  }
  if (used != s.size() || (!s.empty() && s[0] == '-'))
    throw ConfigError(what + ": '" + s + "' is not a non-negative integer");
  return v;
}

// "64,128" or "1..6" (inclusive range) or a mix: "2,4..6".
inline std::vector<std::uint64_t> parse_list(const std::string& text, const std::string& what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto lo = parse_uint(trim(item.substr(0, dots)), what);
      const auto hi = parse_uint(trim(item.substr(dots + 2)), what);
      if (lo > hi) throw ConfigError(what + ": empty range '" + item + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_uint(item, what));
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

// key = value lines; '#' starts a comment. Unknown keys become options.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool have_experiment = false;
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") {
      cfg.experiment = parse_experiment(value);
      have_experiment = true;
    } else if (key == "sizes") {
      cfg.sizes = parse_list(value, "sizes");
    } else if (key == "trials") {
      cfg.trials = parse_uint(value, "trials");
    } else if (key == "seed" || key == "master_seed") {
      cfg.master_seed = parse_uint(value, "seed");
    } else if (key == "workers") {
      cfg.workers = static_cast<unsigned>(parse_uint(value, "workers"));
    } else if (key == "mode") {
      cfg.mode = value;
    } else if (key == "wallclock") {
      cfg.record_wallclock = value == "1" || value == "true";
    } else if (key == "out" || key == "output") {
      cfg.output = value;
    } else {
      cfg.options[key] = value;
    }
  }
  if (!have_experiment) throw ConfigError("config is missing 'experiment'");
  return cfg;
}

inline std::uint64_t trial_seed(const ExperimentConfig& cfg, std::uint64_t size,
                                std::uint64_t trial) {
  return derive_seed({cfg.master_seed, tag_hash(to_string(cfg.experiment)), size, trial});
}

// Calls fn(k) for k in [0, count) across workers threads.
inline void parallel_for(std::uint64_t count, unsigned workers,
                         const std::function<void(std::uint64_t)>& fn) {
  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::uint64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      try {
        for (std::uint64_t k = next++; k < count && !failed; k = next++) fn(k);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct ExperimentResult {
  std::string csv;
  json summary;
  bool passed = true;
};

inline json summary_json(const stats::StatSummary& s) {
  json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev ? json(*s.stddev) : json(nullptr);
  j["min"] = s.min;
  j["max"] = s.max;
  if (s.slope) {
    j["slope"] = s.slope->slope;
    j["slope_residual"] = s.slope->residual;
  }
  return j;
}

inline json config_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["sizes"] = cfg.sizes;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  if (!cfg.mode.empty()) j["mode"] = cfg.mode;
  if (!cfg.options.empty()) j["options"] = cfg.options;
  return j;
}

namespace detail {

inline void require_sizes(const ExperimentConfig& cfg) {
  if (cfg.sizes.empty()) throw ConfigError(to_string(cfg.experiment) + " needs at least one size");
}

inline ExperimentResult run_matmul_bench(const ExperimentConfig& cfg) {
  require_sizes(cfg);
  for (auto n : cfg.sizes)
    if (n < 1 || n > 4096) throw ConfigError("matmul sizes must be in 1..4096");
  const bool verify = cfg.option("verify", 0) != 0;
  ExperimentResult res;
  std::string csv = "n,trial,total_probes,max_depth,wallclock_ns\n";
  std::vector<stats::Row> probe_rows;
  std::uint64_t mismatches = 0;
  json per_size = json::array();
  std::vector<std::pair<double, double>> proxy_points;
  bool cost_ok = true;
  for (auto n : cfg.sizes) {
    std::vector<std::string> lines(cfg.trials);
    std::vector<std::uint64_t> probes(cfg.trials);
    std::atomic<std::uint64_t> bad{0};
    parallel_for(cfg.trials, cfg.workers, [&](std::uint64_t t) {
      SplitMix64 rng(trial_seed(cfg, n, t));
      const auto a = matmul::BoolMatrix::random(n, rng);
      const auto b = matmul::BoolMatrix::random(n, rng);
      const auto start = std::chrono::steady_clock::now();
      const auto r = matmul::quick_multiply(a, b);
      const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      if (verify && !(r.product == matmul::naive_multiply(a, b))) ++bad;
      probes[t] = r.counters.total_probes;
      lines[t] = std::to_string(n) + "," + std::to_string(t) + "," +
                 std::to_string(r.counters.total_probes) + "," +
                 std::to_string(r.counters.max_depth()) + "," +
                 std::to_string(cfg.record_wallclock ? ns : 0) + "\n";
    });
    mismatches += bad;
    std::vector<stats::Row> rows;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      csv += lines[t];
      rows.push_back({static_cast<double>(n), static_cast<double>(probes[t])});
      probe_rows.push_back(rows.back());
    }
    const auto s = stats::summarize(rows);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    json j{{"n", n}};
    j.update(summary_json(s));
    j["mean_over_n2"] = s.mean / n2;
    j["within_3n2"] = s.mean <= 3 * n2;
    cost_ok = cost_ok && s.mean <= 3 * n2;
    per_size.push_back(j);
    proxy_points.emplace_back(static_cast<double>(n), s.mean + n2);
  }
  res.csv = std::move(csv);
  json sum;
  sum["config"] = config_json(cfg);
  sum["per_size"] = per_size;
  const auto all = stats::summarize(probe_rows);
  if (all.slope) sum["slope_log_mean_probes"] = all.slope->slope;
  bool slope_ok = true;
  if (proxy_points.size() >= 2) {
    const auto fit = stats::fit_log_log(proxy_points);
    sum["slope_runtime_proxy"] = fit.slope;
    sum["slope_runtime_proxy_window"] = {1.8, 2.2};
    slope_ok = fit.slope >= 1.8 && fit.slope <= 2.2;
  }
  if (verify) sum["oracle_mismatches"] = mismatches;
  res.passed = cost_ok && slope_ok && mismatches == 0;
  sum["passed"] = res.passed;
  res.summary = std::move(sum);
  return res;
}

inline ExperimentResult run_majority_bench(const ExperimentConfig& cfg) {
  require_sizes(cfg);
  const auto mode = majority::parse_mode(cfg.mode.empty() ? "corrected" : cfg.mode);
  ExperimentResult res;
  std::string csv = "n,trial,comparisons,verdict,oracle_agrees\n";
  json per_size = json::array();
  bool ok = true;
  for (auto n : cfg.sizes) {
    if (n < 1 || n > (1u << 24)) throw ConfigError("majority sizes must be in 1..2^24");
    std::vector<std::string> lines(cfg.trials);
    std::vector<std::uint64_t> comps(cfg.trials), discordant(cfg.trials);
    std::atomic<std::uint64_t> promised_failures{0}, disagreements{0};
    parallel_for(cfg.trials, cfg.workers, [&](std::uint64_t t) {
      SplitMix64 rng(trial_seed(cfg, n, t));
      BitString x;
      x.reserve(n);
      for (std::uint64_t i = 0; i < n; ++i) x.push_back(rng.next_bit());
      const auto r = majority::tournament(x, mode);
      const auto oracle = majority::majority_oracle(x);
      const bool agrees = r.verdict == oracle;
      if (!agrees) ++disagreements;
      // verified promises agreement everywhere; the others only when a majority exists
      if (!agrees && (mode == majority::Mode::verified ||
                      (mode == majority::Mode::corrected && oracle.has_majority())))
        ++promised_failures;
      comps[t] = r.comparisons;
      discordant[t] = r.discordant_top_pairs;
      lines[t] = std::to_string(n) + "," + std::to_string(t) + "," + std::to_string(r.comparisons) +
                 "," + r.verdict.to_string() + "," + (agrees ? "1" : "0") + "\n";
    });
    std::vector<stats::Row> rows, drows;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      csv += lines[t];
      rows.push_back({static_cast<double>(n), static_cast<double>(comps[t])});
      drows.push_back({static_cast<double>(n), static_cast<double>(discordant[t])});
    }
    const auto s = stats::summarize(rows);
    const auto d = stats::summarize(drows);
    const double nd = static_cast<double>(n);
    const double ratio = s.mean / nd;
    // half width sqrt(log2 n / n), i.e. [0.613, 0.720] at n = 4096
    const double half_width = std::sqrt(std::log2(nd) / nd);
    const bool in_window = std::abs(ratio - 2.0 / 3.0) <= half_width;
    json j{{"n", n}, {"residue_mod_4", n % 4}};
    j.update(summary_json(s));
    j["mean_over_n"] = ratio;
    j["window"] = {2.0 / 3.0 - half_width, 2.0 / 3.0 + half_width};
    j["within_window"] = in_window;
    j["mean_discordant_pairs"] = d.mean;
    j["expected_discordant_pairs"] = static_cast<double>(n / 2) / 2.0;
    j["oracle_disagreements"] = disagreements.load();
    j["promise_failures"] = promised_failures.load();
    ok = ok && promised_failures == 0 && (mode == majority::Mode::paper_faithful || in_window);
    per_size.push_back(j);
  }
  res.csv = std::move(csv);
  res.summary["config"] = config_json(cfg);
  res.summary["per_size"] = per_size;
  res.passed = ok;
  res.summary["passed"] = ok;
  return res;
}

inline ExperimentResult run_commsim_verify(const ExperimentConfig& cfg) {
  require_sizes(cfg);
  const std::uint64_t exhaustive_max = cfg.option("exhaustive_max", 5);
  ExperimentResult res;
  std::string csv =
      "n,z,transcript_length,index_width,coordinate_width,description_length,roundtrip_ok\n";
  std::uint64_t checks = 0, failures = 0;
  json per_size = json::array();
  double last_cost = 0;
  for (auto n : cfg.sizes) {
    if (n < 1 || n > commsim::max_enumeration_n)
      throw ConfigError("commsim sizes must be in 1..13");
    const auto p = commsim::build_trivial_ip_protocol(n);
    std::vector<BitString> zs;
    if (n <= exhaustive_max) {
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << (2 * n)); ++v) {
        BitString z = BitString::from_uint(v, 2 * n);
        if (!commsim::inner_product(z.slice(0, n), z.slice(n, n))) zs.push_back(std::move(z));
      }
    } else {
      for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(trial_seed(cfg, n, t));
        BitString z;
        for (std::uint64_t i = 0; i < 2 * n; ++i) z.push_back(rng.next_bit());
        if (commsim::inner_product(z.slice(0, n), z.slice(n, n))) z = commsim::flip_reduce(z);
        zs.push_back(std::move(z));
      }
    }
    std::vector<std::string> lines(zs.size());
    std::atomic<std::uint64_t> bad{0};
    parallel_for(zs.size(), cfg.workers, [&](std::uint64_t k) {
      const auto& z = zs[k];
      bool ok = false;
      std::string fields = ",,,";
      try {
        const auto d = commsim::describe_z(p, z);
        const std::size_t expected = d.transcript_length + d.index_width + (n - d.rank);
        ok = commsim::reconstruct_z(p, d) == z && d.size() == expected && d.size() <= 2 * n &&
             d.rank >= d.index_width;
        fields = std::to_string(d.transcript_length) + "," + std::to_string(d.index_width) + "," +
                 std::to_string(d.coordinate_width) + "," + std::to_string(d.size());
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) ++bad;
      lines[k] = std::to_string(n) + "," + z.to_string() + "," + fields + "," + (ok ? "1" : "0") +
                 "\n";
    });
    for (auto& l : lines) csv += l;
    checks += zs.size();
    failures += bad;
    json j{{"n", n}, {"checks_run", zs.size()}, {"failures", bad.load()}};
    if (n <= commsim::max_exhaustive_cost_n) {
      last_cost = commsim::average_cost_exhaustive(p, cfg.workers).mean;
      j["mean_cost"] = last_cost;
    }
    per_size.push_back(j);
  }
  res.csv = std::move(csv);
  res.summary["n"] = cfg.sizes.back();
  res.summary["checks_run"] = checks;
  res.summary["failures"] = failures;
  res.summary["mean_cost"] = per_size.back().contains("mean_cost") ? json(last_cost) : json(nullptr);
  res.summary["min_coin_error"] = nullptr;
  res.summary["per_size"] = per_size;
  res.summary["config"] = config_json(cfg);
  res.passed = failures == 0;
  res.summary["passed"] = res.passed;
  return res;
}

inline ExperimentResult run_descsys_check(const ExperimentConfig& cfg) {
  const std::size_t L = cfg.option("L", 12);
  const std::size_t universe = cfg.option("universe", 8);
  std::vector<std::uint64_t> cs{1, 2, 3, 4, 5, 6};
  if (auto it = cfg.options.find("c"); it != cfg.options.end()) cs = parse_list(it->second, "c");
  for (auto c : cs)
    if (c < 1) throw ConfigError("c must be >= 1");
  const std::uint64_t systems = cfg.trials;
  // A = all strings of length `universe`.
  std::vector<BitString> set;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << universe); ++v)
    set.push_back(BitString::from_uint(v, universe));

  std::vector<std::string> lines(systems);
  std::atomic<std::uint64_t> failures{0};
  parallel_for(systems, cfg.workers, [&](std::uint64_t s) {
    const auto d = descsys::random_description_system(L, universe, std::nullopt,
                                                      trial_seed(cfg, L, s));
    std::string out;
    for (auto c : cs) {
      const auto r = descsys::check_counting_lemma(d, set, c);
      if (!r.holds) ++failures;
      out += std::to_string(s) + "," + std::to_string(c) + "," + std::to_string(r.m) + "," +
             std::to_string(r.threshold) + "," + std::to_string(r.count_incompressible) + "," +
             (r.vacuous ? std::string("vacuous") : std::to_string(r.bound)) + "," +
             std::to_string(r.stated_bound_num) + "/" + std::to_string(r.stated_bound_den) + "," +
             (r.holds ? "1" : "0") + "\n";
    }
    lines[s] = std::move(out);
  });
  ExperimentResult res;
  res.csv = "system,c,m,threshold,count_incompressible,bound,stated_bound,holds\n";
  for (auto& l : lines) res.csv += l;
  res.summary["config"] = config_json(cfg);
  res.summary["checks_run"] = systems * cs.size();
  res.summary["failures"] = failures.load();
  res.passed = failures == 0;
  res.summary["passed"] = res.passed;
  return res;
}

inline ExperimentResult run_codes_check(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> sizes = cfg.sizes.empty() ? std::vector<std::uint64_t>{12} : cfg.sizes;
  ExperimentResult res;
  res.csv = "level,max_len,codewords,roundtrip_failures,length_failures,prefix_free\n";
  std::uint64_t failures = 0;
  for (auto max_len : sizes) {
    if (max_len > 20) throw ConfigError("codes_check max length must be <= 20");
    for (int level = 0; level <= codes::CodeLevel::max_level; ++level) {
      const codes::CodeLevel lv(level);
      SplitMix64 rng(trial_seed(cfg, max_len, static_cast<std::uint64_t>(level)));
      std::vector<BitString> words;
      std::uint64_t rt_fail = 0, len_fail = 0;
      const std::uint64_t count = descsys::strings_up_to(max_len);
      for (std::uint64_t idx = 0; idx < count; ++idx) {
        const BitString x = codes::to_string(idx);
        BitString w = codes::encode(lv, x);
        const std::size_t l = x.size();
        if (level == 1 && w.size() != 2 * l + 1) ++len_fail;
        if (level == 2 && w.size() != l + 2 * codes::length_of_length(l) + 1) ++len_fail;
        BitString r;
        const auto rlen = rng.below(9);
        for (std::uint64_t k = 0; k < rlen; ++k) r.push_back(rng.next_bit());
        try {
          const auto d = codes::decode(lv, w + r);
          if (!(d.value == x && d.remainder == r)) ++rt_fail;
        } catch (const DecodeError&) {
          ++rt_fail;
        }
        words.push_back(std::move(w));
      }
      const bool pf = codes::is_prefix_free(words).prefix_free;
      failures += rt_fail + len_fail + (pf ? 0 : 1);
      res.csv += std::to_string(level) + "," + std::to_string(max_len) + "," +
                 std::to_string(count) + "," + std::to_string(rt_fail) + "," +
                 std::to_string(len_fail) + "," + (pf ? "1" : "0") + "\n";
    }
  }
  res.summary["config"] = config_json(cfg);
  res.summary["failures"] = failures;
  res.passed = failures == 0;
  res.summary["passed"] = res.passed;
  return res;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::matmul_bench: return detail::run_matmul_bench(cfg);
    case Experiment::majority_bench: return detail::run_majority_bench(cfg);
    case Experiment::commsim_verify: return detail::run_commsim_verify(cfg);
    case Experiment::descsys_check: return detail::run_descsys_check(cfg);
    case Experiment::codes_check: return detail::run_codes_check(cfg);
  }
  throw ConfigError("unknown experiment");
}

// <stem>.summary.json next to the CSV.
inline std::filesystem::path summary_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".summary.json");
  return p;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline void write_result(const ExperimentResult& r, const std::filesystem::path& csv_path) {
  write_text(csv_path, r.csv);
  write_text(summary_path(csv_path), r.summary.dump(2) + "\n");
}

}  // namespace incomp::harness

#pragma once

// Summary statistics over benchmark rows and exact block statistics of bit
// strings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "incomp/bitstring.hpp"

namespace incomp::stats {

struct Row {
  double size = 0;
  double value = 0;
};

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // root mean square residual in log space
  std::size_t points = 0;
};

struct StatSummary {
  std::size_t count = 0;
  double mean = 0;
  std::optional<double> stddev;  // sample standard deviation; needs count >= 2
  double min = 0;
  double max = 0;
  std::map<double, double> mean_by_size;
  std::optional<SlopeFit> slope;  // log(mean) against log(size)
};

// Least squares of log(y) on log(x). Points must be positive.
inline SlopeFit fit_log_log(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    if (x <= 0 || y <= 0) throw std::invalid_argument("log-log fit needs positive values");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("slope fit needs two distinct sizes");
  SlopeFit f;
  f.points = points.size();
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - (f.intercept + f.slope * std::log(x));
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

namespace detail {
// Sorted summation keeps results independent of row order.
inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  return s;
}
}  // namespace detail

inline StatSummary summarize(const std::vector<Row>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no rows");
  StatSummary s;
  s.count = rows.size();
  std::vector<double> values;
  std::map<double, std::vector<double>> by_size;
  values.reserve(rows.size());
  for (const auto& r : rows) {
    values.push_back(r.value);
    by_size[r.size].push_back(r.value);
  }
  s.mean = detail::sorted_sum(values) / static_cast<double>(s.count);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (s.count >= 2) {
    std::vector<double> sq;
    sq.reserve(values.size());
    for (double v : values) sq.push_back((v - s.mean) * (v - s.mean));
    s.stddev = std::sqrt(detail::sorted_sum(std::move(sq)) / static_cast<double>(s.count - 1));
  }
  std::vector<std::pair<double, double>> points;
  bool positive = true;
  for (auto& [size, vals] : by_size) {
    const double m = detail::sorted_sum(vals) / static_cast<double>(vals.size());
    s.mean_by_size[size] = m;
    points.emplace_back(size, m);
    positive = positive && size > 0 && m > 0;
  }
  if (points.size() >= 2 && positive) s.slope = fit_log_log(points);
  return s;
}

struct BlockStats {
  std::size_t length = 0;
  std::size_t ones = 0;
  double ones_deviation = 0;  // |#1 - n/2|
  std::size_t discordant_pairs = 0;  // pairs (x_{2i-1}, x_{2i}) with unequal bits
  // For each designated probe list: 1-based depth of the first 1, or 0 when
  // the list holds no 1.
  std::vector<std::size_t> first_one_depth;
};

inline BlockStats block_stats(const BitString& x,
                              const std::vector<std::vector<std::size_t>>& probe_lists = {}) {
  BlockStats b;
  b.length = x.size();
  b.ones = x.popcount();
  b.ones_deviation = std::abs(static_cast<double>(b.ones) - static_cast<double>(b.length) / 2.0);
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) b.discordant_pairs += x[i] != x[i + 1];
  for (const auto& list : probe_lists) {
    std::size_t depth = 0;
    for (std::size_t k = 0; k < list.size(); ++k)
      if (x.at(list[k])) {
        depth = k + 1;
        break;
      }
    b.first_one_depth.push_back(depth);
  }
  return b;
}

}  // namespace incomp::stats

#include "gtsi/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gtsi {

Metrics confusion(std::span<const double> xhat, std::span<const std::uint8_t> truth,
                  double threshold) {
  if (xhat.size() != truth.size()) throw DimensionError("confusion: length mismatch");
  Metrics m;
  for (size_t i = 0; i < xhat.size(); ++i) {
    const bool declared = xhat[i] >= threshold;
    if (truth[i]) {
      declared ? ++m.tp : ++m.fn;
    } else {
      declared ? ++m.fp : ++m.tn;
    }
  }
  m.fpr = (m.fp + m.tn) > 0 ? static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn) : 0.0;
  if (m.tp + m.fn > 0)
    m.fnr = static_cast<double>(m.fn) / static_cast<double>(m.fn + m.tp);
  m.total_error = m.fpr + m.fnr.value_or(0.0);
  m.success = (m.fp == 0 && m.fn == 0);
  return m;
}

std::vector<double> threshold_grid(double step) {
  if (!(step > 0 && step <= 1)) throw ConfigError("threshold_grid: step must be in (0,1]");
  std::vector<double> grid;
  for (double t = 0.0; t < 1.0 - 1e-12; t += step) grid.push_back(t);
  grid.push_back(1.0);
  return grid;
}

std::vector<RocPoint> roc_sweep(std::span<const double> xhat,
                                std::span<const std::uint8_t> truth,
                                std::span<const double> thresholds) {
  std::vector<RocPoint> sweep;
  sweep.reserve(thresholds.size());
  for (double t : thresholds) {
    const Metrics m = confusion(xhat, truth, t);
    sweep.push_back({t, m.fpr, m.fnr});
  }
  return sweep;
}

OperatingPoint select_operating_point(std::span<const RocPoint> sweep) {
  if (sweep.empty()) throw ConfigError("select_operating_point: empty sweep");
  const auto total = [](const RocPoint& p) { return p.fpr + p.fnr.value_or(0.0); };
  const auto fnr = [](const RocPoint& p) { return p.fnr.value_or(0.0); };
  size_t best = 0;
  for (size_t i = 1; i < sweep.size(); ++i) {
    const double ti = total(sweep[i]), tb = total(sweep[best]);
    if (ti < tb || (ti == tb && fnr(sweep[i]) < fnr(sweep[best]))) best = i;
  }
  // midpoint of the contiguous fully tied run around the winner
  const auto tied = [&](size_t i) {
    return total(sweep[i]) == total(sweep[best]) && fnr(sweep[i]) == fnr(sweep[best]);
  };
  size_t lo = best, hi = best;
  while (lo > 0 && tied(lo - 1)) --lo;
  while (hi + 1 < sweep.size() && tied(hi + 1)) ++hi;
  OperatingPoint op;
  // identical rates at both run ends mean no classification mass moves inside
  // the run, so the midpoint value inherits the run's confusion
  op.threshold = 0.5 * (sweep[lo].threshold + sweep[hi].threshold);
  op.fpr = sweep[best].fpr;
  op.fnr = fnr(sweep[best]);
  op.total_error = total(sweep[best]);
  return op;
}

double success_probability(std::span<const Metrics> runs) {
  if (runs.empty()) throw ConfigError("success_probability: no runs");
  double hits = 0;
  for (const auto& m : runs) hits += m.success ? 1.0 : 0.0;
  return hits / static_cast<double>(runs.size());
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ConfigError("mean: empty");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw ConfigError("median: empty");
  std::sort(xs.begin(), xs.end());
  const size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

}  // namespace gtsi

#include "gtsi/baselines.hpp"

#include <functional>
#include <limits>

#include "gtsi/metrics.hpp"

namespace gtsi {

namespace {
constexpr double kDoubleMax = std::numeric_limits<double>::max();
}

std::vector<std::uint8_t> noisy_coma(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                                     const ComaConfig& cfg) {
  if (static_cast<int>(y.size()) != A.m()) throw DimensionError("noisy_coma: y length mismatch");
  std::vector<std::uint8_t> xhat(A.n(), 0);
  for (int i = 0; i < A.n(); ++i) {
    const auto& pools = A.col(i);
    int positive = 0;
    for (int j : pools) positive += y[j];
    const double frac = static_cast<double>(positive) / static_cast<double>(pools.size());
    xhat[i] = frac >= cfg.threshold ? 1 : 0;
  }
  return xhat;
}

std::vector<std::uint8_t> noisy_dd(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                                   const DdConfig& cfg) {
  if (static_cast<int>(y.size()) != A.m()) throw DimensionError("noisy_dd: y length mismatch");
  const int n = A.n(), m = A.m();
  // stage 1: eliminate items seen in more than `slack` negative pools
  std::vector<std::uint8_t> candidate(n, 1);
  for (int i = 0; i < n; ++i) {
    int negatives = 0;
    for (int j : A.col(i)) negatives += y[j] ? 0 : 1;
    if (negatives > cfg.negative_slack) candidate[i] = 0;
  }
  // stage 2: a candidate alone in a positive pool is definitely defective
  std::vector<std::uint8_t> xhat(n, 0);
  for (int j = 0; j < m; ++j) {
    if (!y[j]) continue;
    int count = 0, last = -1;
    for (int i : A.row(j)) {
      if (candidate[i]) {
        ++count;
        last = i;
      }
    }
    if (count == 1) xhat[last] = 1;
  }
  return xhat;
}

namespace {

double summed_error(std::span<const LabeledInstance> val,
                    const std::function<std::vector<std::uint8_t>(const LabeledInstance&)>& decode) {
  double total = 0.0;
  for (const auto& inst : val) {
    const auto xb = decode(inst);
    std::vector<double> xf(xb.begin(), xb.end());
    const Metrics mt = confusion(xf, inst.truth, 0.5);
    total += mt.fpr + mt.fnr.value_or(0.0);
  }
  return total;
}

}  // namespace

ComaConfig tune_coma(std::span<const LabeledInstance> val,
                     std::span<const double> threshold_grid) {
  if (val.empty() || threshold_grid.empty())
    throw ConfigError("tune_coma: empty validation set or grid");
  ComaConfig best{threshold_grid[0]};
  double best_err = kDoubleMax;
  for (double t : threshold_grid) {
    const double err = summed_error(
        val, [&](const LabeledInstance& inst) { return noisy_coma(*inst.A, inst.y, {t}); });
    if (err < best_err) {
      best_err = err;
      best = {t};
    }
  }
  return best;
}

DdConfig tune_dd(std::span<const LabeledInstance> val, int max_slack) {
  if (val.empty() || max_slack < 0) throw ConfigError("tune_dd: bad arguments");
  DdConfig best{0};
  double best_err = kDoubleMax;
  for (int s = 0; s <= max_slack; ++s) {
    const double err = summed_error(
        val, [&](const LabeledInstance& inst) { return noisy_dd(*inst.A, inst.y, {s}); });
    if (err < best_err) {
      best_err = err;
      best = {s};
    }
  }
  return best;
}

}  // namespace gtsi

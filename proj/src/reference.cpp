#include "gtsi/reference.hpp"

#include <cmath>

namespace gtsi::reference {

GampResult gamp_run_dense(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                          const NoiseModel& noise, const Denoiser& denoiser,
                          const GampConfig& cfg) {
  cfg.validate();
  const int m = A.m(), n = A.n();
  if (static_cast<int>(y.size()) != m) throw DimensionError("reference: y length mismatch");

  std::vector<std::uint8_t> dense(static_cast<size_t>(m) * n, 0);
  for (int j = 0; j < m; ++j)
    for (int i : A.row(j)) dense[static_cast<size_t>(j) * n + i] = 1;

  const std::vector<double> prior = denoiser.initial_mean();
  GampState st = initialize(n, m, prior);
  GampResult res;

  std::vector<double> r(m), xhat_new(n), s_new(n);
  for (int t = 0; t < cfg.t_max; ++t) {
    for (int j = 0; j < m; ++j) {
      double theta = 0.0, mean = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!dense[static_cast<size_t>(j) * n + i]) continue;
        theta += st.s[i];
        mean += st.xhat[i];
      }
      if (theta < cfg.delta_floor) theta = cfg.delta_floor;
      const double k = mean - theta * st.h[j];
      const GoutResult g = gout(y[j], k, theta, noise);
      st.theta[j] = theta;
      st.k[j] = k;
      st.h[j] = cfg.damping * g.h + (1.0 - cfg.damping) * st.h[j];
      r[j] = g.r;
    }

    const double r_scale = cfg.use_one_over_N_factor ? 1.0 / static_cast<double>(n) : 1.0;
    for (int i = 0; i < n; ++i) {
      double r_sum = 0.0, h_sum = 0.0;
      for (int j = 0; j < m; ++j) {
        if (!dense[static_cast<size_t>(j) * n + i]) continue;
        r_sum += r[j];
        h_sum += st.h[j];
      }
      r_sum *= r_scale;
      double delta;
      if (r_sum > 1.0 / cfg.delta_max) {
        delta = std::max(1.0 / r_sum, cfg.delta_floor);
      } else {
        delta = cfg.delta_max;
      }
      st.delta[i] = delta;
      st.v[i] = st.xhat[i] + delta * h_sum;
    }

    denoiser.estimate(st.v, st.delta, xhat_new, s_new, Exec::serial);

    double abs_change = 0.0, delta_mean = 0.0;
    for (int i = 0; i < n; ++i) {
      const double old = st.xhat[i];
      st.xhat[i] = cfg.damping * xhat_new[i] + (1.0 - cfg.damping) * old;
      st.s[i] = st.xhat[i] * (1.0 - st.xhat[i]);
      abs_change += std::abs(st.xhat[i] - old);
      delta_mean += st.delta[i];
    }
    st.t = t + 1;

    IterationStat stat{};
    stat.iter = st.t;
    stat.mean_abs_change = abs_change / n;
    stat.mean_delta = delta_mean / n;
    res.trace.push_back(stat);
    for (double x : st.xhat)
      if (!std::isfinite(x)) throw NumericError("reference gamp: non-finite state");
    if (stat.mean_abs_change < cfg.convergence_tol) {
      res.converged = true;
      break;
    }
  }
  res.iterations = st.t;
  res.xhat = std::move(st.xhat);
  res.v = std::move(st.v);
  res.delta = std::move(st.delta);
  return res;
}

}  // namespace gtsi::reference

#include "gtsi/gamp.hpp"

#include <cmath>
#include <sstream>

#include "gtsi/csv.hpp"
#include "gtsi/mathutil.hpp"

namespace gtsi {

WPosterior posterior_w_moments(int y, double k, double theta, const NoiseModel& noise) {
  if (!(theta > 0)) throw NumericError("posterior_w_moments: theta must be positive");
  // likelihood levels on {w <= split} and {w > split}
  const double level0 = y ? noise.fp : 1.0 - noise.fp;
  const double level1 = y ? 1.0 - noise.fn : noise.fn;
  const double sigma = std::sqrt(theta);
  const double alpha = (kWSplit - k) / sigma;

  const double la = std::log(level0) + log_ndtr(alpha);   // mass of the lower region
  const double lb = std::log(level1) + log_ndtr(-alpha);  // mass of the upper region
  if (la == -kInf && lb == -kInf)
    throw NumericError("posterior_w_moments: zero posterior mass");
  const double p_hi = sigmoid(lb - la);
  const double p_lo = 1.0 - p_hi;

  // one-sided truncated-Gaussian moments; the variance clamp guards the
  // large-|alpha| cancellation in 1 -+ alpha*m - m^2
  const auto lower_moments = [&](double& mu, double& var) {
    const double m = mills_lower(alpha);
    mu = k - sigma * m;
    var = std::max(theta * (1.0 - alpha * m - m * m), 0.0);
  };
  const auto upper_moments = [&](double& mu, double& var) {
    const double m = mills_upper(alpha);
    mu = k + sigma * m;
    var = std::max(theta * (1.0 + alpha * m - m * m), 0.0);
  };

  WPosterior out;
  // a weight that underflowed to exactly 0 must not touch its region's
  // moments: the truncated mean diverges there and 0*inf would poison the mix
  if (p_hi == 0.0) {
    lower_moments(out.mean, out.var);
    return out;
  }
  if (p_lo == 0.0) {
    upper_moments(out.mean, out.var);
    return out;
  }
  double mu_lo, var_lo, mu_hi, var_hi;
  lower_moments(mu_lo, var_lo);
  upper_moments(mu_hi, var_hi);
  out.mean = p_lo * mu_lo + p_hi * mu_hi;
  const double dm = mu_lo - mu_hi;
  out.var = p_lo * var_lo + p_hi * var_hi + p_lo * p_hi * dm * dm;
  return out;
}

GoutResult gout(int y, double k, double theta, const NoiseModel& noise) {
  const WPosterior post = posterior_w_moments(y, k, theta, noise);
  GoutResult g;
  g.h = (post.mean - k) / theta;
  g.r = (1.0 - post.var / theta) / theta;
  return g;
}

void GampConfig::validate() const {
  if (t_max < 1) throw ConfigError("gamp: t_max must be >= 1");
  if (!(damping > 0 && damping <= 1)) throw ConfigError("gamp: damping must be in (0,1]");
  if (!(delta_floor > 0)) throw ConfigError("gamp: delta_floor must be positive");
  if (!(delta_max >= delta_floor)) throw ConfigError("gamp: delta_max < delta_floor");
  if (!(convergence_tol >= 0)) throw ConfigError("gamp: convergence_tol must be >= 0");
}

GampState initialize(int n, int m, std::span<const double> prior) {
  if (static_cast<int>(prior.size()) != n)
    throw DimensionError("gamp initialize: prior has wrong length");
  GampState st;
  st.xhat.assign(prior.begin(), prior.end());
  st.s.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!(prior[i] >= 0.0 && prior[i] <= 1.0))
      throw ConfigError("gamp initialize: prior outside [0,1]");
    st.s[i] = prior[i] * (1.0 - prior[i]);
  }
  st.h.assign(m, 0.0);
  st.theta.assign(m, 0.0);
  st.k.assign(m, 0.0);
  st.v.assign(prior.begin(), prior.end());
  st.delta.assign(n, 0.0);
  return st;
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

IterationStat gamp_step(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                        const NoiseModel& noise, const Denoiser& denoiser,
                        const GampConfig& cfg, GampState& st) {
  const int m = A.m(), n = A.n();
  if (static_cast<int>(y.size()) != m) throw DimensionError("gamp: y has wrong length");
  if (denoiser.n() != n) throw DimensionError("gamp: denoiser dimension mismatch");
  const bool par = cfg.exec == Exec::parallel;

  IterationStat stat{};
  stat.iter = st.t + 1;

  // output channel: per-pool prior moments of W, then gout
  std::vector<double> r(m);
  int theta_clips = 0;
#pragma omp parallel for if (par) schedule(static) reduction(+ : theta_clips)
  for (int j = 0; j < m; ++j) {
    double theta = 0.0, mean = 0.0;
    for (int i : A.row(j)) {
      theta += st.s[i];
      mean += st.xhat[i];
    }
    if (theta < cfg.delta_floor) {
      theta = cfg.delta_floor;
      ++theta_clips;
    }
    const double k = mean - theta * st.h[j];
    const GoutResult g = gout(y[j], k, theta, noise);
    st.theta[j] = theta;
    st.k[j] = k;
    st.h[j] = cfg.damping * g.h + (1.0 - cfg.damping) * st.h[j];
    r[j] = g.r;
  }

  // scalar pseudo-channel per individual, then the input-channel denoiser
  const double r_scale = cfg.use_one_over_N_factor ? 1.0 / static_cast<double>(n) : 1.0;
  int delta_clamps = 0;
#pragma omp parallel for if (par) schedule(static) reduction(+ : delta_clamps)
  for (int i = 0; i < n; ++i) {
    double r_sum = 0.0, h_sum = 0.0;
    for (int j : A.col(i)) {
      r_sum += r[j];
      h_sum += st.h[j];
    }
    r_sum *= r_scale;
    double delta;
    if (r_sum > 1.0 / cfg.delta_max) {
      delta = 1.0 / r_sum;
      if (delta < cfg.delta_floor) {
        delta = cfg.delta_floor;
        ++delta_clamps;
      }
    } else {
      delta = cfg.delta_max;  // uninformative: r-sum nonpositive or vanishing
      ++delta_clamps;
    }
    st.delta[i] = delta;
    st.v[i] = st.xhat[i] + delta * h_sum;
  }

  std::vector<double> xhat_new(n), s_new(n);
  denoiser.estimate(st.v, st.delta, xhat_new, s_new, cfg.exec);

  // damp xhat; recompute s from the damped mean so the binary posterior
  // identity s = xhat(1-xhat) survives the blend exactly
  double abs_change = 0.0, delta_mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double old = st.xhat[i];
    const double blended = cfg.damping * xhat_new[i] + (1.0 - cfg.damping) * old;
    st.xhat[i] = blended;
    st.s[i] = blended * (1.0 - blended);
    abs_change += std::abs(blended - old);
    delta_mean += st.delta[i];
  }
  st.t += 1;

  stat.mean_abs_change = abs_change / n;
  stat.mean_delta = delta_mean / n;
  stat.theta_clips = theta_clips;
  stat.delta_clamps = delta_clamps;

  if (!all_finite(st.xhat) || !all_finite(st.s) || !all_finite(st.h) ||
      !all_finite(st.theta) || !all_finite(st.k) || !all_finite(st.v) ||
      !all_finite(st.delta))
    throw NumericError("gamp: non-finite state at iteration " + std::to_string(st.t));
  return stat;
}

GampResult gamp_run(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                    const NoiseModel& noise, const Denoiser& denoiser, const GampConfig& cfg,
                    const IterObserver& observer) {
  cfg.validate();
  GampState st = initialize(A.n(), A.m(), denoiser.initial_mean());
  GampResult res;
  res.trace.reserve(cfg.t_max);
  try {
    for (int t = 0; t < cfg.t_max; ++t) {
      const IterationStat stat = gamp_step(A, y, noise, denoiser, cfg, st);
      res.trace.push_back(stat);
      if (observer) observer(st, stat);
      if (stat.mean_abs_change < cfg.convergence_tol) {
        res.converged = true;
        break;
      }
    }
  } catch (const NumericError& e) {
    throw NumericError(e.what(), render_trace(res.trace));
  }
  res.iterations = st.t;
  res.xhat = std::move(st.xhat);
  res.v = std::move(st.v);
  res.delta = std::move(st.delta);
  return res;
}

std::string render_trace(std::span<const IterationStat> trace) {
  std::ostringstream os;
  os << "iter mean_abs_change mean_delta theta_clips delta_clamps\n";
  for (const auto& s : trace)
    os << s.iter << ' ' << s.mean_abs_change << ' ' << s.mean_delta << ' ' << s.theta_clips
       << ' ' << s.delta_clamps << '\n';
  return os.str();
}

void write_trace_csv(const std::filesystem::path& path, std::span<const IterationStat> trace) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : trace)
    rows.push_back({std::to_string(s.iter), fmt_double(s.mean_abs_change),
                    fmt_double(s.mean_delta)});
  write_csv(path, {"iter", "mean_abs_change", "mean_delta"}, rows);
}

static void write_indexed_csv(const std::filesystem::path& path, const char* value_name,
                              std::span<const double> values) {
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < values.size(); ++i)
    rows.push_back({std::to_string(i), fmt_double(values[i])});
  write_csv(path, {"individual", value_name}, rows);
}

static std::vector<double> read_indexed_csv(const std::filesystem::path& path,
                                            const char* value_name) {
  const CsvTable t = read_csv(path);
  const int ci = t.column("individual"), cv = t.column(value_name);
  std::vector<double> out(t.rows.size(), 0.0);
  for (const auto& row : t.rows) {
    const long i = parse_long(row[ci], "individual");
    if (i < 0 || i >= static_cast<long>(out.size()))
      throw ConfigError(path.string() + ": individual ids must be 0..n-1 without gaps");
    out[i] = parse_double(row[cv], value_name);
  }
  return out;
}

void write_estimate_csv(const std::filesystem::path& path, std::span<const double> xhat) {
  write_indexed_csv(path, "xhat", xhat);
}
std::vector<double> read_estimate_csv(const std::filesystem::path& path) {
  return read_indexed_csv(path, "xhat");
}
void write_prior_csv(const std::filesystem::path& path, std::span<const double> prior) {
  write_indexed_csv(path, "prior", prior);
}
std::vector<double> read_prior_csv(const std::filesystem::path& path) {
  return read_indexed_csv(path, "prior");
}

}  // namespace gtsi

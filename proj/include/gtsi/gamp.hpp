#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gtsi/pooling.hpp"

namespace gtsi {

// The measurement channel acts on the pool load through the indicator
// 1[w > w_split]: loads at or below the split behave as "no infected member".
inline constexpr double kWSplit = 0.5;

enum class Exec { serial, parallel };

// Posterior moments of W given pool outcome y, where W ~ N(k, theta) a priori
// and Pr(y | w) is the two-level likelihood defined by the noise model. The
// posterior is a two-component mixture of one-sided truncated Gaussians split
// at kWSplit; weights are combined in the log domain and the Mills ratios use
// erfcx, so no CDF differences are formed anywhere.
struct WPosterior {
  double mean;
  double var;
};
WPosterior posterior_w_moments(int y, double k, double theta, const NoiseModel& noise);

// Scalar output-channel update: h = (E[W|y] - k)/theta and its negated
// k-sensitivity r = -dh/dk = (1 - Var[W|y]/theta)/theta. r may be negative
// when the mixture variance exceeds theta; the engine clamps downstream.
struct GoutResult {
  double h;
  double r;
};
GoutResult gout(int y, double k, double theta, const NoiseModel& noise);

// Input-channel interface: posterior mean/variance of each x_i from its
// scalar pseudo-observation v_i ~ N(x_i, delta_i) plus side information held
// by the concrete denoiser. Implementations must be pure element/family-wise
// so serial and parallel execution agree bit for bit.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual int n() const = 0;
  virtual std::vector<double> initial_mean() const = 0;
  virtual void estimate(std::span<const double> v, std::span<const double> delta,
                        std::span<double> xhat, std::span<double> s, Exec exec) const = 0;
};

struct GampConfig {
  int t_max = 50;
  double damping = 0.7;          // xhat and h blend weight on the new value
  double delta_floor = 1e-12;    // lower clamp for theta and Delta
  double delta_max = 1e12;       // upper clamp for Delta (nonpositive r-sums land here)
  double convergence_tol = 1e-6; // stop when mean |xhat change| falls below
  bool use_one_over_N_factor = false;  // scale the r-sum by 1/n in the Delta update
  Exec exec = Exec::parallel;

  void validate() const;
};

struct IterationStat {
  int iter;
  double mean_abs_change;
  double mean_delta;
  int theta_clips;   // pools whose prior variance hit the floor
  int delta_clamps;  // individuals whose Delta was clamped
};

struct GampState {
  std::vector<double> xhat, s;      // n
  std::vector<double> h, theta, k;  // m
  std::vector<double> v, delta;     // n
  int t = 0;
};

// xhat = prior, s = prior(1-prior), h = 0
GampState initialize(int n, int m, std::span<const double> prior);

// One full iteration: output sweep, scalar channel, input sweep, damping.
// After return state.s[i] == state.xhat[i]*(1 - state.xhat[i]) exactly.
// Throws NumericError (with rendered trace) if any state entry goes non-finite.
IterationStat gamp_step(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                        const NoiseModel& noise, const Denoiser& denoiser,
                        const GampConfig& cfg, GampState& state);

struct GampResult {
  std::vector<double> xhat, v, delta;
  std::vector<IterationStat> trace;
  int iterations = 0;
  bool converged = false;
};

using IterObserver = std::function<void(const GampState&, const IterationStat&)>;

GampResult gamp_run(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                    const NoiseModel& noise, const Denoiser& denoiser, const GampConfig& cfg,
                    const IterObserver& observer = {});

std::string render_trace(std::span<const IterationStat> trace);

// csv "iter,mean_abs_change,mean_delta"
void write_trace_csv(const std::filesystem::path& path, std::span<const IterationStat> trace);
// csv "individual,xhat"
void write_estimate_csv(const std::filesystem::path& path, std::span<const double> xhat);
std::vector<double> read_estimate_csv(const std::filesystem::path& path);
// csv "individual,prior"
void write_prior_csv(const std::filesystem::path& path, std::span<const double> prior);
std::vector<double> read_prior_csv(const std::filesystem::path& path);

}  // namespace gtsi

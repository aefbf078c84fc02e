#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gtsi/baselines.hpp"
#include "gtsi/config.hpp"
#include "gtsi/ct_prior.hpp"
#include "gtsi/denoisers.hpp"
#include "gtsi/metrics.hpp"
#include "gtsi/presets.hpp"

namespace gtsi {

enum class DenoiserKind { Ct, Family };
DenoiserKind denoiser_kind_from(const std::string& name);
const char* denoiser_kind_name(DenoiserKind k);

// Weekly testing protocol. Days [0, startup_period) are the startup phase
// with collected infection status (optionally degraded: a fixed random subset
// of the population, fraction p_excluded, has its status replaced by the
// constant replacement_prior). Group tests run on days
// startup_period, startup_period + test_period, ... while the horizon lasts.
// Each test's SI window is the trailing si_window days clipped at day 0;
// status estimates inside the window come from startup data or, later, from
// the most recent test's posterior held constant until the next test.
struct RegimeConfig {
  int test_period = 7;
  int startup_period = 8;
  int si_window = 8;
  double p_excluded = 0.0;
  double replacement_prior = 0.05;
  double threshold_step = 0.001;
  DenoiserKind denoiser = DenoiserKind::Ct;
  // Every contact contributes at least exp(-1/epsilon) to the prior. The floor
  // must be material (~1e-4 per contact here): infections with no flagged
  // contact on record (strays, spreaders caught only later) otherwise enter
  // the decoder at prior zero, which no measurement can lift, and each one
  // poisons the next week's estimates. 1e-3 would underflow the floor to 0.
  double epsilon = 0.115;
  double bootstrap_prior = 0.05;  // flat prior for the pseudo-data burn-in run
  double lambda_lo = 1e-6, lambda_hi = 100.0;
  int lambda_grid = 200;
  bool refit_each_iteration = false;  // refit the rate after every GAMP iteration
  FamilyParams family_init{0.05, 0.5};
  FamilyParamsBounds family_bounds{};
  int family_grid = 48;

  void validate() const;
};

struct TestDayRecord {
  int day = 0;
  double sparsity = 0.0;
  double lambda_hat = 0.0;       // ct runs
  bool lambda_flat = false;
  FamilyParams family_hat{};     // family runs
  std::vector<std::uint8_t> truth;
  std::vector<std::uint8_t> y;
  std::vector<double> prior;
  std::vector<double> xhat;
  double day_threshold = 0.0;    // per-day operating point
  Metrics day_metrics;           // at day_threshold
  Metrics at_run_threshold;      // at the run-level operating point
};

struct RegimeResult {
  OperatingPoint run_op;         // selected on posteriors pooled over test days
  Metrics pooled;                // confusion of the pooled data at run_op.threshold
  std::vector<TestDayRecord> days;
  double mean_fpr = 0.0;         // over all test days, at run_op.threshold
  double mean_fnr = 0.0;         // over days with defined FNR
  double mean_total_error = 0.0; // over days with defined FNR
  int undefined_fnr_days = 0;
  double success_rate = 0.0;     // fraction of test days exactly recovered
  double mean_sparsity = 0.0;
};

// run_rng seeds the per-run streams (measurement noise per test day, startup
// exclusion set); the epidemic itself is owned by `sim` so ablation conditions
// can share it.
RegimeResult run_weekly_regime(const SimResult& sim, const PoolingMatrix& A,
                               const NoiseModel& noise, const RegimeConfig& rc,
                               const GampConfig& gc, const Rng& run_rng);

// --- study drivers -------------------------------------------------------

struct StudyConfig {
  std::string study;             // roc | weekly | p_excluded | si_period | baseline_compare
  std::string preset = "sparsity_2";
  SimConfig sim;                 // resolved preset + overrides
  NoiseModel noise = noise_asymmetric();
  std::vector<int> m_list{375};
  std::vector<DenoiserKind> denoisers{DenoiserKind::Ct};
  int seeds = 10;
  std::uint64_t seed0 = 1;
  int matrix_draws = 1;
  std::vector<double> p_excluded_list{0.0, 0.1, 0.5, 0.75, 1.0};
  std::vector<int> startup_list{4, 8, 12};
  RegimeConfig regime;
  GampConfig gamp;
};

// parses and fully consumes a flat config (unknown keys are errors)
StudyConfig parse_study_config(KeyValueConfig& cfg);

// writes results.json, aggregate.csv (and study-specific extras) to out_dir
void run_study(const StudyConfig& sc, const std::filesystem::path& out_dir);

}  // namespace gtsi

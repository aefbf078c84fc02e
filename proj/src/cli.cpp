#include "gtsi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "gtsi/experiments.hpp"
#include "gtsi/gamp.hpp"
#include "gtsi/manifest.hpp"

namespace gtsi {
namespace {

namespace fs = std::filesystem;

std::string join_argv(int argc, const char* const* argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out.push_back(' ');
    out += argv[i];
  }
  return out;
}

SimConfig parse_sim_config(KeyValueConfig& cfg) {
  SimConfig sim;
  if (cfg.has("preset")) sim = preset_sim(cfg.req_string("preset"));
  sim.n = static_cast<int>(cfg.get_long("n", sim.n));
  sim.days = static_cast<int>(cfg.get_long("days", sim.days));
  sim.k1 = static_cast<int>(cfg.get_long("k1", sim.k1));
  sim.k2 = static_cast<int>(cfg.get_long("k2", sim.k2));
  sim.infection_period = static_cast<int>(cfg.get_long("infection_period", sim.infection_period));
  sim.lambda0 = cfg.get_double("lambda0", sim.lambda0);
  sim.p1 = cfg.get_double("p1", sim.p1);
  sim.viral_load_max = cfg.get_double("viral_load_max", sim.viral_load_max);
  sim.family_min = static_cast<int>(cfg.get_long("family_min", sim.family_min));
  sim.family_max = static_cast<int>(cfg.get_long("family_max", sim.family_max));
  sim.p_cross = cfg.get_double("p_cross", sim.p_cross);
  sim.tau_family_min = cfg.get_double("tau_family_min", sim.tau_family_min);
  sim.tau_family_max = cfg.get_double("tau_family_max", sim.tau_family_max);
  sim.tau_cross_min = cfg.get_double("tau_cross_min", sim.tau_cross_min);
  sim.tau_cross_max = cfg.get_double("tau_cross_max", sim.tau_cross_max);
  sim.d_min = cfg.get_double("d_min", sim.d_min);
  sim.d_max = cfg.get_double("d_max", sim.d_max);
  sim.initial_infected = static_cast<int>(cfg.get_long("initial_infected", sim.initial_infected));
  sim.seed = static_cast<std::uint64_t>(cfg.get_long("seed", static_cast<long>(sim.seed)));
  sim.validate();
  return sim;
}

struct SimulateArgs {
  std::string config, out;
  long seed = -1;  // <0: keep the config's seed
};

int cmd_simulate(const SimulateArgs& a, const std::string& command) {
  RunManifest man;
  man.command = command;
  KeyValueConfig cfg = KeyValueConfig::parse_file(a.config);
  man.config_digest = config_digest(cfg);
  SimConfig sim = parse_sim_config(cfg);
  cfg.finish();
  if (a.seed >= 0) sim.seed = static_cast<std::uint64_t>(a.seed);
  man.seeds = {sim.seed};

  fs::create_directories(a.out);
  SimResult res;
  {
    StageTimer t(man, "simulate");
    res = run_simulation(sim);
  }
  {
    StageTimer t(man, "write");
    write_contacts_csv(fs::path(a.out) / "contacts.csv", res.contacts);
    write_status_csv(fs::path(a.out) / "status.csv", res.states);
    write_families_csv(fs::path(a.out) / "families.csv", res.families);
  }
  man.add_output("contacts.csv");
  man.add_output("status.csv");
  man.add_output("families.csv");
  man.write(fs::path(a.out) / "manifest.json");
  std::printf("simulate: n=%d days=%d final sparsity %.4f -> %s\n", sim.n, sim.days,
              res.sparsity_at(sim.days), a.out.c_str());
  return 0;
}

struct PoolArgs {
  int n = 0, m = 0;
  long seed = 1;
  std::string out;
  std::string status;        // optional: measure ground truth from this file
  int day = -1;
  std::string noise = "asymmetric";
  double fp = -1, fn = -1;   // <0: preset value
  long measure_seed = -1;    // <0: derive from seed
};

NoiseModel resolve_noise(const std::string& preset, double fp, double fn) {
  NoiseModel noise = preset_noise(preset);
  if (fp >= 0) noise.fp = fp;
  if (fn >= 0) noise.fn = fn;
  noise.validate();
  return noise;
}

int cmd_pool(const PoolArgs& a, const std::string& command) {
  RunManifest man;
  man.command = command;
  man.seeds = {static_cast<std::uint64_t>(a.seed)};
  fs::create_directories(a.out);

  Rng rng(static_cast<std::uint64_t>(a.seed));
  PoolingMatrix A = [&] {
    StageTimer t(man, "design");
    Rng drng = rng.child("design");
    return build_triple_design(a.n, a.m, drng);
  }();
  save_matrix(fs::path(a.out) / "matrix.txt", A);
  man.add_output("matrix.txt");

  if (!a.status.empty()) {
    if (a.day < 0) throw ConfigError("--status requires --day");
    StageTimer t(man, "measure");
    const auto states = read_status_csv(a.status);
    const PopulationState* state = nullptr;
    for (const auto& st : states)
      if (st.day == a.day) state = &st;
    if (!state) throw ConfigError("--day " + std::to_string(a.day) + " not present in " + a.status);
    const auto truth = ground_truth(*state);
    if (static_cast<int>(truth.size()) != a.n)
      throw DimensionError("status file population differs from --n");
    const NoiseModel noise = resolve_noise(a.noise, a.fp, a.fn);
    Rng mrng = a.measure_seed >= 0 ? Rng(static_cast<std::uint64_t>(a.measure_seed))
                                   : rng.child("measure");
    const auto y = measure(A, truth, noise, mrng);
    write_measurements_csv(fs::path(a.out) / "measurements.csv", y);
    man.add_output("measurements.csv");
  }
  man.write(fs::path(a.out) / "manifest.json");
  std::printf("pool: %dx%d design (nnz %ld) -> %s\n", a.m, a.n, A.nnz(), a.out.c_str());
  return 0;
}

struct DecodeArgs {
  std::string matrix, measurements, denoiser, out;
  std::string priors;    // ct
  std::string families;  // family
  double pi_vf = 0.05, pi_ind = 0.5;
  bool fit_family = false;
  double coma_threshold = 1.0;
  int dd_slack = 0;
  std::string noise = "asymmetric";
  double fp = -1, fn = -1;
  int t_max = 50;
  double damping = 0.7;
  double tol = 1e-6;
  bool serial = false;
};

int cmd_decode(const DecodeArgs& a, const std::string& command) {
  RunManifest man;
  man.command = command;
  fs::create_directories(a.out);

  const PoolingMatrix A = load_matrix(a.matrix);
  const auto y = read_measurements_csv(a.measurements);
  if (static_cast<int>(y.size()) != A.m())
    throw DimensionError("measurements rows (" + std::to_string(y.size()) +
                         ") != matrix pools (" + std::to_string(A.m()) + ")");

  if (a.denoiser == "coma" || a.denoiser == "dd") {
    StageTimer t(man, "decode");
    const auto xb = a.denoiser == "coma" ? noisy_coma(A, y, ComaConfig{a.coma_threshold})
                                         : noisy_dd(A, y, DdConfig{a.dd_slack});
    std::vector<double> xhat(xb.begin(), xb.end());
    write_estimate_csv(fs::path(a.out) / "estimate.csv", xhat);
    man.add_output("estimate.csv");
    man.write(fs::path(a.out) / "manifest.json");
    std::printf("decode(%s): %zu positives -> %s\n", a.denoiser.c_str(),
                static_cast<size_t>(std::count(xb.begin(), xb.end(), 1)), a.out.c_str());
    return 0;
  }

  const NoiseModel noise = resolve_noise(a.noise, a.fp, a.fn);
  GampConfig gc;
  gc.t_max = a.t_max;
  gc.damping = a.damping;
  gc.convergence_tol = a.tol;
  gc.exec = a.serial ? Exec::serial : Exec::parallel;
  gc.validate();

  GampResult res;
  StageTimer t(man, "decode");
  if (a.denoiser == "ct") {
    if (a.priors.empty()) throw ConfigError("denoiser 'ct' requires --priors");
    auto prior = read_prior_csv(a.priors);
    if (static_cast<int>(prior.size()) != A.n())
      throw DimensionError("priors rows != matrix columns");
    res = gamp_run(A, y, noise, CtDenoiser(std::move(prior)), gc);
  } else if (a.denoiser == "family") {
    if (a.families.empty()) throw ConfigError("denoiser 'family' requires --families");
    const FamilyStructure fams = read_families_csv(a.families);
    if (fams.n() != A.n()) throw DimensionError("families rows != matrix columns");
    FamilyParams params{a.pi_vf, a.pi_ind};
    params.validate();
    if (a.fit_family) {
      // pseudo data for the plug-in fit comes from a full burn-in run under
      // the initial parameters; a single step leaves the mixture unseparated
      // and the fit collapses to the grid edge
      const GampResult boot = gamp_run(A, y, noise, FamilyDenoiser(fams, params), gc);
      params = plugin_estimate_family_params(boot.v, boot.delta, fams, {}, 48).params;
    }
    res = gamp_run(A, y, noise, FamilyDenoiser(fams, params), gc);
  } else {
    throw ConfigError("unknown denoiser '" + a.denoiser + "' (known: ct, family, coma, dd)");
  }

  write_estimate_csv(fs::path(a.out) / "estimate.csv", res.xhat);
  write_trace_csv(fs::path(a.out) / "trace.csv", res.trace);
  man.add_output("estimate.csv");
  man.add_output("trace.csv");
  man.write(fs::path(a.out) / "manifest.json");
  std::printf("decode(%s): %s after %d iterations -> %s\n", a.denoiser.c_str(),
              res.converged ? "converged" : "stopped", res.iterations, a.out.c_str());
  return 0;
}

struct ExperimentArgs {
  std::string config, out, study;
  long seed = -1;
};

int cmd_experiment(const ExperimentArgs& a, const std::string& command) {
  RunManifest man;
  man.command = command;
  KeyValueConfig cfg = KeyValueConfig::parse_file(a.config);
  man.config_digest = config_digest(cfg);
  StudyConfig sc = parse_study_config(cfg);
  cfg.finish();
  if (!a.study.empty()) {
    sc.study = a.study;  // revalidate through the parser's whitelist
    KeyValueConfig probe = KeyValueConfig::parse_text("study = " + a.study, "--study");
    parse_study_config(probe);
  }
  if (a.seed >= 0) sc.seed0 = static_cast<std::uint64_t>(a.seed);
  man.seeds = {sc.seed0};

  {
    StageTimer t(man, "study");
    run_study(sc, a.out);
  }
  man.add_output("results.json");
  man.add_output("aggregate.csv");
  if (sc.study == "roc") man.add_output("roc.csv");
  man.write(fs::path(a.out) / "manifest.json");
  std::printf("experiment(%s): %d seed(s) -> %s\n", sc.study.c_str(), sc.seeds, a.out.c_str());
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"group testing with side information: simulate, pool, decode, experiment"};
  app.require_subcommand(1);
  const std::string command = join_argv(argc, argv);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "run the contact/epidemic simulator");
  sim->add_option("--config", sa.config, "key=value simulation config")->required();
  sim->add_option("--out", sa.out, "output directory")->required();
  sim->add_option("--seed", sa.seed, "override the config seed");

  PoolArgs pa;
  auto* pool = app.add_subcommand("pool", "build a pooling design, optionally measure");
  pool->add_option("--n", pa.n, "population size")->required();
  pool->add_option("--m", pa.m, "number of pools")->required();
  pool->add_option("--seed", pa.seed, "design seed");
  pool->add_option("--out", pa.out, "output directory")->required();
  pool->add_option("--status", pa.status, "status.csv to measure from");
  pool->add_option("--day", pa.day, "day to measure (with --status)");
  pool->add_option("--noise", pa.noise, "noise preset: asymmetric | symmetric");
  pool->add_option("--fp", pa.fp, "false positive rate override");
  pool->add_option("--fn", pa.fn, "false negative rate override");
  pool->add_option("--measure-seed", pa.measure_seed, "separate measurement seed");

  DecodeArgs da;
  auto* dec = app.add_subcommand("decode", "decode one set of measurements");
  dec->add_option("--matrix", da.matrix, "pooling matrix file")->required();
  dec->add_option("--measurements", da.measurements, "measurements csv")->required();
  dec->add_option("--denoiser", da.denoiser, "ct | family | coma | dd")->required();
  dec->add_option("--out", da.out, "output directory")->required();
  dec->add_option("--priors", da.priors, "priors csv (ct)");
  dec->add_option("--families", da.families, "families csv (family)");
  dec->add_option("--pi-vf", da.pi_vf, "family viral-family probability");
  dec->add_option("--pi-ind", da.pi_ind, "family within-family probability");
  dec->add_flag("--fit-family", da.fit_family, "plug-in fit of the family parameters");
  dec->add_option("--coma-threshold", da.coma_threshold, "positive-pool fraction threshold");
  dec->add_option("--dd-slack", da.dd_slack, "tolerated negative pools per item");
  dec->add_option("--noise", da.noise, "noise preset: asymmetric | symmetric");
  dec->add_option("--fp", da.fp, "false positive rate override");
  dec->add_option("--fn", da.fn, "false negative rate override");
  dec->add_option("--t-max", da.t_max, "max GAMP iterations");
  dec->add_option("--damping", da.damping, "GAMP damping");
  dec->add_option("--tol", da.tol, "GAMP convergence tolerance");
  dec->add_flag("--serial", da.serial, "disable the parallel kernels");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "run a study from a config file");
  exp->add_option("--config", ea.config, "key=value study config")->required();
  exp->add_option("--out", ea.out, "output directory")->required();
  exp->add_option("--study", ea.study, "override the config's study name");
  exp->add_option("--seed", ea.seed, "override the config's base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // fold CLI11's parse-error codes into the config category
  }

  try {
    if (sim->parsed()) return cmd_simulate(sa, command);
    if (pool->parsed()) return cmd_pool(pa, command);
    if (dec->parsed()) return cmd_decode(da, command);
    return cmd_experiment(ea, command);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace gtsi

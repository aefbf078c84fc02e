#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtsi/cli.hpp"
#include "gtsi/ct_prior.hpp"
#include "gtsi/experiments.hpp"
#include "gtsi/gamp.hpp"

using namespace gtsi;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"gtsi"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& leaf) {
  const auto d = fs::temp_directory_path() / "gtsi_test_cli" / leaf;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

// redirects fd 2 into a file for the duration, then returns what was written
class CaptureStderr {
 public:
  CaptureStderr() : path_(fs::temp_directory_path() / "gtsi_test_cli" / "stderr.txt") {
    fs::create_directories(path_.parent_path());
    std::fflush(stderr);
    saved_ = dup(2);
    const int fd = open(path_.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    dup2(fd, 2);
    close(fd);
  }
  std::string finish() {
    std::fflush(stderr);
    dup2(saved_, 2);
    close(saved_);
    return slurp(path_);
  }

 private:
  fs::path path_;
  int saved_;
};

}  // namespace

TEST_CASE("help exits cleanly, bad invocations map to the config category") {
  CaptureStderr cap;
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({"simulate"}) == 2);            // missing required flags
  CHECK(run_cli({"frobnicate"}) == 2);          // unknown subcommand
  CHECK(run_cli({}) == 2);                      // subcommand required
  cap.finish();
}

TEST_CASE("simulate writes the three datasets plus a manifest") {
  const auto dir = fresh_dir("sim_min");
  const auto cfg = dir / "sim.cfg";
  write_file(cfg, "n = 4\ndays = 1\nseed = 3\ninitial_infected = 1\n");
  CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}) == 0);
  CHECK(first_line(dir / "out" / "contacts.csv") == "day,i,j,tau,d");
  CHECK(first_line(dir / "out" / "status.csv") == "day,individual,status,viral_load");
  CHECK(first_line(dir / "out" / "families.csv") == "individual,family_id");
  const std::string man = slurp(dir / "out" / "manifest.json");
  CHECK(man.find("config_digest") != std::string::npos);
  CHECK(man.find("simulate") != std::string::npos);

  // typos in the config are fatal, not ignored
  write_file(cfg, "n = 4\ndays = 1\nseedz = 3\n");
  CaptureStderr cap;
  CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out2").string()}) == 2);
  CHECK(cap.finish().find("seedz") != std::string::npos);
}

TEST_CASE("simulate is reproducible byte for byte and meets its time budget") {
  const auto dir = fresh_dir("sim_repro");
  const auto cfg = dir / "sim.cfg";
  write_file(cfg, "preset = sparsity_2\nn = 1000\ndays = 30\nseed = 12\n");
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0);
  for (const char* f : {"contacts.csv", "status.csv", "families.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  // a different seed changes the data
  CHECK(run_cli({"simulate", "--config", cfg.string(), "--seed", "13", "--out",
                 (dir / "c").string()}) == 0);
  CHECK(slurp(dir / "a" / "status.csv") != slurp(dir / "c" / "status.csv"));
}

TEST_CASE("pool builds a design and measures a stored day") {
  const auto dir = fresh_dir("pool");
  const auto cfg = dir / "sim.cfg";
  write_file(cfg, "n = 60\ndays = 12\nseed = 4\np_cross = 0.03\ninitial_infected = 2\n");
  REQUIRE(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "sim").string()}) == 0);
  CHECK(run_cli({"pool", "--n", "60", "--m", "24", "--seed", "9", "--out",
                 (dir / "pool").string(), "--status", (dir / "sim" / "status.csv").string(),
                 "--day", "10", "--measure-seed", "123"}) == 0);
  const PoolingMatrix A = load_matrix(dir / "pool" / "matrix.txt");
  CHECK(A.n() == 60);
  CHECK(A.m() == 24);
  CHECK(read_measurements_csv(dir / "pool" / "measurements.csv").size() == 24);

  // measuring a day outside the stored range is a config error
  CaptureStderr cap;
  CHECK(run_cli({"pool", "--n", "60", "--m", "24", "--out", (dir / "pool2").string(),
                 "--status", (dir / "sim" / "status.csv").string(), "--day", "99"}) == 2);
  CHECK(cap.finish().find("99") != std::string::npos);
}

TEST_CASE("decode on identity pools reproduces clean measurements") {
  const auto dir = fresh_dir("decode_id");
  const int n = 20;
  std::vector<std::pair<int, int>> entries;
  for (int i = 0; i < n; ++i) entries.push_back({i, i});
  const PoolingMatrix eye = PoolingMatrix::from_entries(n, n, std::move(entries));
  save_matrix(dir / "eye.txt", eye);
  std::vector<std::uint8_t> truth(n, 0);
  Rng rng(5);
  for (auto& t : truth) t = rng.bernoulli(0.3) ? 1 : 0;
  Rng mrng(6);
  const auto y = measure(eye, truth, NoiseModel{0.0, 0.0}, mrng);
  write_measurements_csv(dir / "y.csv", y);
  write_prior_csv(dir / "priors.csv", std::vector<double>(n, 0.5));

  CHECK(run_cli({"decode", "--matrix", (dir / "eye.txt").string(), "--measurements",
                 (dir / "y.csv").string(), "--denoiser", "ct", "--priors",
                 (dir / "priors.csv").string(), "--fp", "0.001", "--fn", "0.001", "--out",
                 (dir / "out").string()}) == 0);
  const auto xhat = read_estimate_csv(dir / "out" / "estimate.csv");
  REQUIRE(xhat.size() == truth.size());
  for (int i = 0; i < n; ++i) CHECK((xhat[i] >= 0.5 ? 1 : 0) == y[i]);
  CHECK(fs::exists(dir / "out" / "trace.csv"));

  // hard decoders agree on single-item pools
  for (const char* den : {"coma", "dd"}) {
    CHECK(run_cli({"decode", "--matrix", (dir / "eye.txt").string(), "--measurements",
                   (dir / "y.csv").string(), "--denoiser", den, "--out",
                   (dir / "out2").string()}) == 0);
    const auto hard = read_estimate_csv(dir / "out2" / "estimate.csv");
    for (int i = 0; i < n; ++i) CHECK(hard[i] == static_cast<double>(y[i]));
  }
}

TEST_CASE("decode error paths carry category exit codes and name the flag") {
  const auto dir = fresh_dir("decode_err");
  const int n = 12;
  std::vector<std::pair<int, int>> entries;
  for (int i = 0; i < n; ++i) entries.push_back({i % 6, i});
  const PoolingMatrix A = PoolingMatrix::from_entries(6, n, std::move(entries));
  save_matrix(dir / "A.txt", A);
  write_measurements_csv(dir / "y6.csv", std::vector<std::uint8_t>(6, 0));
  write_measurements_csv(dir / "y5.csv", std::vector<std::uint8_t>(5, 0));

  CaptureStderr cap1;
  CHECK(run_cli({"decode", "--matrix", (dir / "A.txt").string(), "--measurements",
                 (dir / "y6.csv").string(), "--denoiser", "ct", "--out",
                 (dir / "o").string()}) == 2);
  CHECK(cap1.finish().find("--priors") != std::string::npos);

  CaptureStderr cap2;
  CHECK(run_cli({"decode", "--matrix", (dir / "A.txt").string(), "--measurements",
                 (dir / "y6.csv").string(), "--denoiser", "family", "--out",
                 (dir / "o").string()}) == 2);
  CHECK(cap2.finish().find("--families") != std::string::npos);

  CaptureStderr cap3;
  CHECK(run_cli({"decode", "--matrix", (dir / "A.txt").string(), "--measurements",
                 (dir / "y5.csv").string(), "--denoiser", "coma", "--out",
                 (dir / "o").string()}) == 3);  // dimension category
  cap3.finish();

  CaptureStderr cap4;
  CHECK(run_cli({"decode", "--matrix", (dir / "A.txt").string(), "--measurements",
                 (dir / "y6.csv").string(), "--denoiser", "magic", "--out",
                 (dir / "o").string()}) == 2);
  CHECK(cap4.finish().find("magic") != std::string::npos);
}

TEST_CASE("file-based decode reproduces the in-process pipeline exactly") {
  const auto dir = fresh_dir("roundtrip");
  const auto cfg = dir / "sim.cfg";
  write_file(cfg,
             "n = 80\ndays = 12\nseed = 21\np_cross = 0.03\ninitial_infected = 2\n");
  REQUIRE(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "sim").string()}) == 0);
  REQUIRE(run_cli({"pool", "--n", "80", "--m", "32", "--seed", "31", "--out",
                   (dir / "pool").string(), "--status", (dir / "sim" / "status.csv").string(),
                   "--day", "10", "--measure-seed", "77"}) == 0);

  // side information from the stored files, exactly as a user would build it
  const ContactLog contacts = read_contacts_csv(dir / "sim" / "contacts.csv");
  const auto states = read_status_csv(dir / "sim" / "status.csv");
  StatusEstimates est;
  est.first_day = 0;
  for (const auto& st : states) {
    std::vector<double> pz;
    for (const auto& ind : st.ind)
      pz.push_back(ind.status == Status::Infected || ind.status == Status::Infectious ? 0.0
                                                                                      : 1.0);
    est.pr_zero.push_back(std::move(pz));
  }
  const CtPriorInputs inputs =
      build_ct_prior_inputs(contacts, est, DayWindow{2, 9}, 80, 1.0, 1e-3);
  const auto priors = aggregate_priors(inputs, 1.0);
  write_prior_csv(dir / "priors.csv", priors);

  REQUIRE(run_cli({"decode", "--matrix", (dir / "pool" / "matrix.txt").string(),
                   "--measurements", (dir / "pool" / "measurements.csv").string(),
                   "--denoiser", "ct", "--priors", (dir / "priors.csv").string(), "--out",
                   (dir / "dec").string()}) == 0);

  // in-process pipeline on the same artifacts
  const PoolingMatrix A = load_matrix(dir / "pool" / "matrix.txt");
  const auto y = read_measurements_csv(dir / "pool" / "measurements.csv");
  const GampResult res = gamp_run(A, y, noise_asymmetric(), CtDenoiser(priors), GampConfig{});
  CHECK(read_estimate_csv(dir / "dec" / "estimate.csv") == res.xhat);
}

TEST_CASE("experiment runs a study config and reruns identically") {
  const auto dir = fresh_dir("exp");
  const auto cfg = dir / "study.cfg";
  write_file(cfg,
             "study = roc\n"
             "preset = sparsity_4\n"
             "n = 120\n"
             "days = 15\n"
             "p_cross = 0.025\n"
             "initial_infected = 2\n"
             "m_list = 48\n"
             "denoisers = ct\n"
             "seeds = 1\n"
             "seed = 3\n"
             "threshold_step = 0.05\n");
  CHECK(run_cli({"experiment", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  CHECK(fs::exists(dir / "a" / "results.json"));
  CHECK(fs::exists(dir / "a" / "aggregate.csv"));
  CHECK(fs::exists(dir / "a" / "roc.csv"));
  CHECK(fs::exists(dir / "a" / "manifest.json"));

  CHECK(run_cli({"experiment", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0);
  CHECK(slurp(dir / "a" / "results.json") == slurp(dir / "b" / "results.json"));
  CHECK(slurp(dir / "a" / "aggregate.csv") == slurp(dir / "b" / "aggregate.csv"));

  // unknown study names fail fast
  write_file(cfg, "study = sideways\n");
  CaptureStderr cap;
  CHECK(run_cli({"experiment", "--config", cfg.string(), "--out", (dir / "c").string()}) == 2);
  CHECK(cap.finish().find("sideways") != std::string::npos);
}

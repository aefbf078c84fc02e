#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "gtsi/baselines.hpp"
#include "gtsi/metrics.hpp"

using namespace gtsi;

namespace {

struct Instance {
  PoolingMatrix A;
  std::vector<std::uint8_t> truth, y;
};

Instance noiseless_instance(std::uint64_t seed, int n, int m, double pi) {
  Rng rng(seed);
  Rng drng = rng.child("design");
  Instance inst{build_triple_design(n, m, drng), {}, {}};
  inst.truth.resize(n);
  Rng trng = rng.child("truth");
  for (auto& t : inst.truth) t = trng.bernoulli(pi) ? 1 : 0;
  Rng mrng = rng.child("measure");
  inst.y = measure(inst.A, inst.truth, NoiseModel{0.0, 0.0}, mrng);
  return inst;
}

}  // namespace

TEST_CASE("classical coma on a hand example") {
  // pools: {0,1}, {1,2}, {2}; infected: 2
  const auto A = PoolingMatrix::from_entries(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}});
  const std::vector<std::uint8_t> y{0, 1, 1};
  const auto x = noisy_coma(A, y, ComaConfig{1.0});
  // 0 appears in a negative pool; 1 appears in a negative pool; 2 only in positives
  CHECK(x == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("noiseless coma never misses a true positive") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Instance inst = noiseless_instance(seed, 80, 40, 0.08);
    const auto x = noisy_coma(inst.A, inst.y, ComaConfig{1.0});
    for (size_t i = 0; i < inst.truth.size(); ++i)
      if (inst.truth[i]) CHECK(x[i] == 1);
  }
}

TEST_CASE("coma threshold loosens monotonically") {
  const Instance inst = noiseless_instance(6, 60, 30, 0.1);
  int prev = -1;
  for (double thr : {1.0, 0.67, 0.34, 0.0}) {
    const auto x = noisy_coma(inst.A, inst.y, ComaConfig{thr});
    const int pos = static_cast<int>(std::count(x.begin(), x.end(), 1));
    CHECK(pos >= prev);  // lower threshold declares at least as many positives
    prev = pos;
  }
  // threshold 0 declares everyone
  const auto all = noisy_coma(inst.A, inst.y, ComaConfig{0.0});
  CHECK(std::count(all.begin(), all.end(), 1) == 60);
}

TEST_CASE("classical dd on a hand example") {
  // pools: {0,1}, {0,2}, {1}, infected: 0 only
  const auto A = PoolingMatrix::from_entries(3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 2}, {2, 1}});
  const std::vector<std::uint8_t> y{1, 1, 0};
  const auto x = noisy_dd(A, y, DdConfig{0});
  // 1 is eliminated by its negative pool; 0 is then alone in both positives
  CHECK(x == std::vector<std::uint8_t>{1, 0, 0});
}

TEST_CASE("noiseless dd has zero false positives") {
  for (std::uint64_t seed = 10; seed < 40; ++seed) {
    const Instance inst = noiseless_instance(seed, 70, 35, 0.07);
    const auto x = noisy_dd(inst.A, inst.y, DdConfig{0});
    for (size_t i = 0; i < inst.truth.size(); ++i)
      if (!inst.truth[i]) CHECK(x[i] == 0);
  }
}

TEST_CASE("dd slack revives items eliminated by flipped pools") {
  // one infected item whose sole pools read 1,1,0 due to a false negative
  const auto A = PoolingMatrix::from_entries(
      4, 2, {{0, 0}, {1, 0}, {2, 0}, {3, 1}});
  const std::vector<std::uint8_t> y{1, 1, 0, 0};
  CHECK(noisy_dd(A, y, DdConfig{0}) == std::vector<std::uint8_t>{0, 0});
  CHECK(noisy_dd(A, y, DdConfig{1}) == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("baseline tuning minimizes summed error and prefers small parameters") {
  std::vector<Instance> insts;
  for (std::uint64_t seed = 50; seed < 58; ++seed)
    insts.push_back(noiseless_instance(seed, 60, 30, 0.08));
  std::vector<LabeledInstance> val;
  for (const auto& inst : insts) val.push_back({&inst.A, inst.y, inst.truth});

  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  const ComaConfig coma = tune_coma(val, grid);
  // on clean data the strict rule is optimal, and ties resolve downward only
  // when they genuinely tie; compute the objective directly to verify
  const auto objective_coma = [&](double thr) {
    double total = 0;
    for (const auto& li : val) {
      const auto xb = noisy_coma(*li.A, li.y, ComaConfig{thr});
      std::vector<double> xf(xb.begin(), xb.end());
      const Metrics m = confusion(xf, li.truth, 0.5);
      total += m.fpr + m.fnr.value_or(0.0);
    }
    return total;
  };
  for (double thr : grid) CHECK(objective_coma(coma.threshold) <= objective_coma(thr) + 1e-12);

  const DdConfig dd = tune_dd(val, 3);
  const auto objective_dd = [&](int slack) {
    double total = 0;
    for (const auto& li : val) {
      const auto xb = noisy_dd(*li.A, li.y, DdConfig{slack});
      std::vector<double> xf(xb.begin(), xb.end());
      const Metrics m = confusion(xf, li.truth, 0.5);
      total += m.fpr + m.fnr.value_or(0.0);
    }
    return total;
  };
  for (int s = 0; s <= 3; ++s) CHECK(objective_dd(dd.negative_slack) <= objective_dd(s) + 1e-12);
  // ties prefer the smaller parameter
  for (int s = 0; s < dd.negative_slack; ++s)
    CHECK(objective_dd(s) > objective_dd(dd.negative_slack));
}

TEST_CASE("baselines validate dimensions") {
  const auto A = PoolingMatrix::from_entries(2, 2, {{0, 0}, {1, 1}});
  const std::vector<std::uint8_t> bad(3, 0);
  CHECK_THROWS_AS(noisy_coma(A, bad, ComaConfig{1.0}), DimensionError);
  CHECK_THROWS_AS(noisy_dd(A, bad, DdConfig{0}), DimensionError);
}

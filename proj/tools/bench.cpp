// Timing harness: parallel vs serial GAMP kernels vs the dense reference
// implementation, plus the rate-fit grid search. All three decoders must
// agree bit for bit; the point here is only speed.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gtsi/ct_prior.hpp"
#include "gtsi/gamp.hpp"
#include "gtsi/reference.hpp"

using namespace gtsi;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main() {
  const int n = 4000, m = 1500;
  const double pi = 0.02;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  Rng rng(7);
  Rng drng = rng.child("design");
  const PoolingMatrix A = build_triple_design(n, m, drng);
  std::vector<std::uint8_t> truth(n);
  Rng trng = rng.child("truth");
  for (auto& t : truth) t = trng.bernoulli(pi) ? 1 : 0;
  const NoiseModel noise = noise_asymmetric();
  Rng mrng = rng.child("measure");
  const auto y = measure(A, truth, noise, mrng);

  const CtDenoiser den(std::vector<double>(n, pi));
  GampConfig gc;
  gc.convergence_tol = 0;  // fixed 50 iterations for comparable work

  GampResult par, ser, ref;
  gc.exec = Exec::parallel;
  const double t_par = time_best_of(3, [&] { par = gamp_run(A, y, noise, den, gc); });
  gc.exec = Exec::serial;
  const double t_ser = time_best_of(3, [&] { ser = gamp_run(A, y, noise, den, gc); });
  const double t_ref =
      time_best_of(1, [&] { ref = reference::gamp_run_dense(A, y, noise, den, gc); });

  std::printf("gamp %d iters, n=%d m=%d:\n", par.iterations, n, m);
  std::printf("  parallel   %8.3f s\n", t_par);
  std::printf("  serial     %8.3f s   (x%.2f vs parallel)\n", t_ser, t_ser / t_par);
  std::printf("  reference  %8.3f s   (x%.2f vs parallel)\n", t_ref, t_ref / t_par);
  std::printf("  max |par-ser| %.3g, max |par-ref| %.3g\n", max_abs_diff(par.xhat, ser.xhat),
              max_abs_diff(par.xhat, ref.xhat));

  // rate fit on synthetic contact weights
  {
    CtPriorInputs in;
    in.n = n;
    in.lambda = 1.0;
    in.epsilon = 1e-3;
    in.weights.resize(n);
    Rng wrng = rng.child("weights");
    for (int i = 0; i < n; ++i) {
      const int c = static_cast<int>(wrng.uniform_int(0, 12));
      for (int k = 0; k < c; ++k) in.weights[i].push_back(wrng.uniform(0.0, 4.0));
    }
    std::vector<double> v(n), delta(n, 0.2);
    Rng vrng = rng.child("v");
    for (int i = 0; i < n; ++i) v[i] = vrng.uniform(-0.2, 1.2);

    LambdaFit fp_, fs_;
    const double t_fit_par = time_best_of(3, [&] {
      fp_ = ml_estimate_lambda(v, delta, in, 1e-6, 100.0, 200, Exec::parallel);
    });
    const double t_fit_ser = time_best_of(3, [&] {
      fs_ = ml_estimate_lambda(v, delta, in, 1e-6, 100.0, 200, Exec::serial);
    });
    std::printf("lambda fit (grid 200, n=%d):\n", n);
    std::printf("  parallel   %8.3f s   lambda %.6g\n", t_fit_par, fp_.lambda);
    std::printf("  serial     %8.3f s   lambda %.6g   (x%.2f)\n", t_fit_ser, fs_.lambda,
                t_fit_ser / t_fit_par);
  }
  return 0;
}

#include "gtsi/ct_prior.hpp"

#include <algorithm>
#include <cmath>

#include "gtsi/mathutil.hpp"

namespace gtsi {

const std::vector<double>& StatusEstimates::on(int day) const {
  if (!covers(day))
    throw ConfigError("status estimates do not cover day " + std::to_string(day));
  return pr_zero[day - first_day];
}

double pairwise_infection_prob(double lambda, double tau, double d, double psi,
                               double epsilon) {
  return std::exp(-1.0 / (lambda * tau * d * psi + epsilon));
}

CtPriorInputs build_ct_prior_inputs(const ContactLog& contacts, const StatusEstimates& est,
                                    DayWindow window, int n, double lambda, double epsilon) {
  if (!(epsilon > 0)) throw ConfigError("ct prior: epsilon must be positive");
  std::string missing;
  for (int day = window.lo; day <= window.hi; ++day) {
    if (!contacts.covers(day) || !est.covers(day))
      missing += (missing.empty() ? "" : ", ") + std::to_string(day);
  }
  if (!missing.empty())
    throw ConfigError("ct prior: SI window missing day(s): " + missing);

  CtPriorInputs in;
  in.n = n;
  in.window = window;
  in.lambda = lambda;
  in.epsilon = epsilon;
  in.weights.resize(n);
  for (int day = window.lo; day <= window.hi; ++day) {
    const auto& pz = est.on(day);
    if (static_cast<int>(pz.size()) != n)
      throw DimensionError("ct prior: status estimate length mismatch on day " +
                           std::to_string(day));
    for (const ContactEvent& ev : contacts.on(day)) {
      if (ev.i >= n || ev.j >= n)
        throw DimensionError("ct prior: contact index out of range");
      const double psi = 1.0 - pz[ev.i] * pz[ev.j];
      const double g = ev.tau * ev.d * psi;
      in.weights[ev.i].push_back(g);
      in.weights[ev.j].push_back(g);
    }
  }
  return in;
}

double log_prior_zero(const CtPriorInputs& in, int i, double lambda) {
  double sum = 0.0;
  for (double g : in.weights[i]) {
    const double p = pairwise_infection_prob(lambda, 1.0, 1.0, g, in.epsilon);
    sum += std::log1p(-p);
  }
  return sum;
}

double aggregate_prior(const CtPriorInputs& in, int i) {
  return 0.0 - std::expm1(log_prior_zero(in, i, in.lambda));  // +0.0 kills negative zero
}

std::vector<double> aggregate_priors(const CtPriorInputs& in, double lambda) {
  std::vector<double> prior(in.n);
  for (int i = 0; i < in.n; ++i) prior[i] = 0.0 - std::expm1(log_prior_zero(in, i, lambda));
  return prior;
}

namespace {

// marginal log-likelihood of the pseudo data under priors generated by lambda
double lambda_loglik(std::span<const double> v, std::span<const double> delta,
                     const CtPriorInputs& in, double lambda) {
  double ll = 0.0;
  for (int i = 0; i < in.n; ++i) {
    const double lz = log_prior_zero(in, i, lambda);       // log Pr(X_i = 0)
    const double lp = std::log(-std::expm1(lz));           // log Pr(X_i = 1); -inf at 0
    const double n0 = log_normal_pdf(v[i], 0.0, delta[i]);
    const double n1 = log_normal_pdf(v[i], 1.0, delta[i]);
    ll += logsumexp2(n1 + lp, n0 + lz);
  }
  return ll;
}

}  // namespace

LambdaFit ml_estimate_lambda(std::span<const double> v, std::span<const double> delta,
                             const CtPriorInputs& in, double lo, double hi, int grid_points,
                             Exec exec) {
  if (!(lo > 0) || !(hi >= lo)) throw ConfigError("lambda search: need 0 < lo <= hi");
  if (static_cast<int>(v.size()) != in.n || static_cast<int>(delta.size()) != in.n)
    throw DimensionError("lambda search: pseudo data length mismatch");
  LambdaFit fit;
  if (lo == hi) {
    fit.lambda = lo;
    fit.log_likelihood = lambda_loglik(v, delta, in, lo);
    return fit;
  }
  const int G = std::max(grid_points, 2);
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<double> grid(G), ll(G);
  for (int g = 0; g < G; ++g) grid[g] = std::exp(llo + (lhi - llo) * g / (G - 1));
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (int g = 0; g < G; ++g) ll[g] = lambda_loglik(v, delta, in, grid[g]);

  int best = 0;
  for (int g = 1; g < G; ++g)
    if (ll[g] > ll[best]) best = g;
  const auto [mn, mx] = std::minmax_element(ll.begin(), ll.end());
  if (*mx - *mn < 1e-8) {
    fit.flat = true;
    fit.lambda = grid[best];
    fit.log_likelihood = ll[best];
    return fit;
  }

  // golden-section on log-lambda between the neighbors of the best grid point
  double a = std::log(grid[std::max(0, best - 1)]);
  double b = std::log(grid[std::min(G - 1, best + 1)]);
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = lambda_loglik(v, delta, in, std::exp(x1));
  double f2 = lambda_loglik(v, delta, in, std::exp(x2));
  for (int it = 0; it < 40 && b - a > 1e-10; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = lambda_loglik(v, delta, in, std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = lambda_loglik(v, delta, in, std::exp(x1));
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = lambda_loglik(v, delta, in, std::exp(xm));
  fit.lambda = std::exp(xm);
  fit.log_likelihood = fm;
  if (fm < ll[best]) {  // refinement never loses to the grid
    fit.lambda = grid[best];
    fit.log_likelihood = ll[best];
  }
  return fit;
}

FamilyParamsFit plugin_estimate_family_params(std::span<const double> v,
                                              std::span<const double> delta,
                                              const FamilyStructure& families,
                                              const FamilyParamsBounds& bounds,
                                              int grid_points) {
  const int n = families.n();
  if (static_cast<int>(v.size()) != n || static_cast<int>(delta.size()) != n)
    throw DimensionError("family plug-in: pseudo data length mismatch");
  if (!(0 < bounds.vf_lo && bounds.vf_lo <= bounds.vf_hi && bounds.vf_hi < 1) ||
      !(0 < bounds.ind_lo && bounds.ind_lo <= bounds.ind_hi && bounds.ind_hi < 1))
    throw ConfigError("family plug-in: bounds must satisfy 0 < lo <= hi < 1");

  const int F = families.num_families();
  std::vector<double> n0(n), n1(n), clean_sum(F, 0.0);
  for (int i = 0; i < n; ++i) {
    n0[i] = log_normal_pdf(v[i], 0.0, delta[i]);
    n1[i] = log_normal_pdf(v[i], 1.0, delta[i]);
  }
  for (int f = 0; f < F; ++f)
    for (int i : families.members[f]) clean_sum[f] += n0[i];

  const int G = std::max(grid_points, 2);
  // grid over pi_ind outer (viral sums reusable across the pi_vf sweep)
  const auto search = [&](double vf_lo, double vf_hi, double ind_lo, double ind_hi,
                          FamilyParams& best, double& best_ll, double& min_ll) {
    std::vector<double> viral_sum(F);
    for (int gi = 0; gi < G; ++gi) {
      const double pind = ind_lo + (ind_hi - ind_lo) * gi / (G - 1);
      const double li = std::log(pind), lic = std::log1p(-pind);
      std::fill(viral_sum.begin(), viral_sum.end(), 0.0);
      for (int f = 0; f < F; ++f)
        for (int i : families.members[f])
          viral_sum[f] += logsumexp2(li + n1[i], lic + n0[i]);
      for (int gv = 0; gv < G; ++gv) {
        const double pvf = vf_lo + (vf_hi - vf_lo) * gv / (G - 1);
        const double lv = std::log(pvf), lvc = std::log1p(-pvf);
        double ll = 0.0;
        for (int f = 0; f < F; ++f) ll += logsumexp2(lvc + clean_sum[f], lv + viral_sum[f]);
        if (ll > best_ll) {
          best_ll = ll;
          best = {pvf, pind};
        }
        min_ll = std::min(min_ll, ll);
      }
    }
  };

  FamilyParamsFit fit;
  double best_ll = -kInf, min_ll = kInf;
  FamilyParams best{bounds.vf_lo, bounds.ind_lo};
  search(bounds.vf_lo, bounds.vf_hi, bounds.ind_lo, bounds.ind_hi, best, best_ll, min_ll);
  if (best_ll - min_ll < 1e-8) fit.flat = true;

  // refine around the coarse optimum (one cell each way, clipped to bounds)
  const double dv = (bounds.vf_hi - bounds.vf_lo) / (G - 1);
  const double di = (bounds.ind_hi - bounds.ind_lo) / (G - 1);
  double refine_min = kInf;
  search(std::max(bounds.vf_lo, best.pi_vf - dv), std::min(bounds.vf_hi, best.pi_vf + dv),
         std::max(bounds.ind_lo, best.pi_ind - di), std::min(bounds.ind_hi, best.pi_ind + di),
         best, best_ll, refine_min);

  fit.params = best;
  fit.log_likelihood = best_ll;
  return fit;
}

}  // namespace gtsi

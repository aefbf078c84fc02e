#pragma once

#include <span>
#include <vector>

#include "gtsi/contact_sim.hpp"
#include "gtsi/denoisers.hpp"

namespace gtsi {

// Pr(X_i = 0) estimates per day over a contiguous range; the source is either
// collected startup status data or the latest group-test posterior.
struct StatusEstimates {
  int first_day = 0;
  std::vector<std::vector<double>> pr_zero;  // [day - first_day][individual]

  int size() const { return static_cast<int>(pr_zero.size()); }
  bool covers(int day) const { return day >= first_day && day < first_day + size(); }
  const std::vector<double>& on(int day) const;
};

// Pairwise infection probability for one contact event:
//   p = exp(-1 / (lambda * tau * d * psi + epsilon)),
// where psi = 1 - Pr(X_i=0) Pr(X_j=0) couples the pair's health estimates.
double pairwise_infection_prob(double lambda, double tau, double d, double psi,
                               double epsilon);

struct DayWindow {
  int lo = 0, hi = -1;  // inclusive; empty when hi < lo
};

// Side information for one test, reduced to what the prior needs: for each
// individual the list of contact weights g = tau * d * psi accumulated over
// the window. A day inside the window missing from either the contact log or
// the status estimates is a ConfigError naming the missing days.
struct CtPriorInputs {
  int n = 0;
  DayWindow window;
  double lambda = 1.0;
  double epsilon = 1e-3;
  std::vector<std::vector<double>> weights;
};

CtPriorInputs build_ct_prior_inputs(const ContactLog& contacts, const StatusEstimates& est,
                                    DayWindow window, int n, double lambda, double epsilon);

// log Pr(X_i = 0 | contacts) = sum_g log(1 - p(g)); prior = 1 - exp of that.
// No contacts in the window means prior exactly 0.
double log_prior_zero(const CtPriorInputs& in, int i, double lambda);
double aggregate_prior(const CtPriorInputs& in, int i);  // at in.lambda
std::vector<double> aggregate_priors(const CtPriorInputs& in, double lambda);

struct LambdaFit {
  double lambda = 0;
  double log_likelihood = 0;
  bool flat = false;  // likelihood indistinguishable across the grid
};

// Maximum-likelihood plug-in for the rate: maximizes
//   sum_i log[ N(v_i; 1, Delta_i) Pr(X_i=1|lambda) + N(v_i; 0, Delta_i) Pr(X_i=0|lambda) ]
// over a log-spaced grid on [lo, hi] followed by golden-section refinement
// around the best grid cell.
LambdaFit ml_estimate_lambda(std::span<const double> v, std::span<const double> delta,
                             const CtPriorInputs& in, double lo, double hi,
                             int grid_points = 200, Exec exec = Exec::serial);

struct FamilyParamsBounds {
  double vf_lo = 0.01, vf_hi = 0.99;
  double ind_lo = 0.01, ind_hi = 0.99;
};

struct FamilyParamsFit {
  FamilyParams params;
  double log_likelihood = 0;
  bool flat = false;
};

// 2-D grid maximization of the family-marginal likelihood
//   f(v_F) = (1-pi_vf) prod_i N(v_i;0,D_i) + pi_vf prod_i [pi_ind N(v_i;1,D_i) + (1-pi_ind) N(v_i;0,D_i)]
// with one refinement pass around the best coarse cell.
FamilyParamsFit plugin_estimate_family_params(std::span<const double> v,
                                              std::span<const double> delta,
                                              const FamilyStructure& families,
                                              const FamilyParamsBounds& bounds,
                                              int grid_points = 48);

}  // namespace gtsi

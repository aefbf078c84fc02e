#pragma once

#include <span>
#include <vector>

#include "gtsi/contact_sim.hpp"
#include "gtsi/gamp.hpp"

namespace gtsi {

// Bayes posterior mean of a 0/1 signal from v ~ N(x, delta) under prior
// Pr(x=1) = prior: sigmoid(logit(prior) + (v - 1/2)/delta). Degenerate priors
// return exactly 0 or 1 regardless of v.
double ct_denoise_mean(double v, double delta, double prior);

// Per-individual prior vector (typically aggregated from contact tracing).
class CtDenoiser : public Denoiser {
 public:
  explicit CtDenoiser(std::vector<double> prior);

  int n() const override { return static_cast<int>(prior_.size()); }
  std::vector<double> initial_mean() const override { return prior_; }
  void estimate(std::span<const double> v, std::span<const double> delta,
                std::span<double> xhat, std::span<double> s, Exec exec) const override;

  const std::vector<double>& prior() const { return prior_; }

 private:
  std::vector<double> prior_;
};

struct FamilyParams {
  double pi_vf = 0.05;   // Pr(family carries the virus)
  double pi_ind = 0.5;   // Pr(member infected | family carries)

  void validate() const;  // open interval (0,1) for both
};

// Joint family posterior under the two-layer model: a family is viral with
// probability pi_vf; members of a viral family are infected independently
// with probability pi_ind; members of a non-viral family are all healthy.
// The viral-family evidence factorizes over members, so the per-family cost is
// linear in |M_F| rather than 2^|M_F|. Outputs per member:
//   xhat_i = Pr(F viral | v_F) * Pr(x_i = 1 | v_i, F viral),  s_i = xhat_i(1-xhat_i).
// Returns Pr(F viral | v_F).
double family_denoise_one(std::span<const double> v, std::span<const double> delta,
                          const FamilyParams& params, std::span<double> xhat,
                          std::span<double> s);

class FamilyDenoiser : public Denoiser {
 public:
  FamilyDenoiser(FamilyStructure families, FamilyParams params);

  int n() const override { return families_.n(); }
  std::vector<double> initial_mean() const override;
  void estimate(std::span<const double> v, std::span<const double> delta,
                std::span<double> xhat, std::span<double> s, Exec exec) const override;

  const FamilyParams& params() const { return params_; }

 private:
  FamilyStructure families_;
  FamilyParams params_;
};

}  // namespace gtsi

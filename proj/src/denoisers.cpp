#include "gtsi/denoisers.hpp"

#include <cmath>

#include "gtsi/mathutil.hpp"

namespace gtsi {

double ct_denoise_mean(double v, double delta, double prior) {
  if (prior <= 0.0) return 0.0;
  if (prior >= 1.0) return 1.0;
  return sigmoid(logit(prior) + (v - kWSplit) / delta);
}

CtDenoiser::CtDenoiser(std::vector<double> prior) : prior_(std::move(prior)) {
  if (prior_.empty()) throw ConfigError("ct denoiser: empty prior");
  for (double p : prior_)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("ct denoiser: prior outside [0,1]");
}

void CtDenoiser::estimate(std::span<const double> v, std::span<const double> delta,
                          std::span<double> xhat, std::span<double> s, Exec exec) const {
  const int n = this->n();
  if (static_cast<int>(v.size()) != n || static_cast<int>(delta.size()) != n)
    throw DimensionError("ct denoiser: input length mismatch");
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (int i = 0; i < n; ++i) {
    const double m = ct_denoise_mean(v[i], delta[i], prior_[i]);
    xhat[i] = m;
    s[i] = m * (1.0 - m);
  }
}

void FamilyParams::validate() const {
  if (!(pi_vf > 0.0 && pi_vf < 1.0) || !(pi_ind > 0.0 && pi_ind < 1.0))
    throw ConfigError("family params: pi_vf and pi_ind must lie in (0,1)");
}

double family_denoise_one(std::span<const double> v, std::span<const double> delta,
                          const FamilyParams& params, std::span<double> xhat,
                          std::span<double> s) {
  const size_t sz = v.size();
  const double l_ind = std::log(params.pi_ind);
  const double l_ind_c = std::log1p(-params.pi_ind);
  // log f(v_F, not viral) and log f(v_F, viral); both factor over members
  double log_clean = std::log1p(-params.pi_vf);
  double log_viral = std::log(params.pi_vf);
  for (size_t a = 0; a < sz; ++a) {
    const double n0 = log_normal_pdf(v[a], 0.0, delta[a]);
    const double n1 = log_normal_pdf(v[a], 1.0, delta[a]);
    log_clean += n0;
    log_viral += logsumexp2(l_ind + n1, l_ind_c + n0);
  }
  const double p_viral = sigmoid(log_viral - log_clean);
  for (size_t a = 0; a < sz; ++a) {
    const double q = sigmoid(logit(params.pi_ind) + (v[a] - kWSplit) / delta[a]);
    const double m = p_viral * q;
    xhat[a] = m;
    s[a] = m * (1.0 - m);
  }
  return p_viral;
}

FamilyDenoiser::FamilyDenoiser(FamilyStructure families, FamilyParams params)
    : families_(std::move(families)), params_(params) {
  params_.validate();
}

std::vector<double> FamilyDenoiser::initial_mean() const {
  return std::vector<double>(families_.n(), params_.pi_vf * params_.pi_ind);
}

void FamilyDenoiser::estimate(std::span<const double> v, std::span<const double> delta,
                              std::span<double> xhat, std::span<double> s, Exec exec) const {
  const int n = this->n();
  if (static_cast<int>(v.size()) != n || static_cast<int>(delta.size()) != n)
    throw DimensionError("family denoiser: input length mismatch");
  const int F = families_.num_families();
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (int f = 0; f < F; ++f) {
    const auto& mem = families_.members[f];
    const size_t sz = mem.size();
    std::vector<double> vf(sz), df(sz), xf(sz), sf(sz);
    for (size_t a = 0; a < sz; ++a) {
      vf[a] = v[mem[a]];
      df[a] = delta[mem[a]];
    }
    family_denoise_one(vf, df, params_, xf, sf);
    for (size_t a = 0; a < sz; ++a) {
      xhat[mem[a]] = xf[a];
      s[mem[a]] = sf[a];
    }
  }
}

}  // namespace gtsi

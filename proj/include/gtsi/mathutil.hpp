#pragma once

#include <cmath>
#include <limits>

namespace gtsi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Scaled complementary error function exp(x^2) erfc(x).
// x in [0, 20]: the direct product is safe (exp(400) ~ 5e173, erfc(20) ~ 5e-176,
// both representable) and accurate to ~1e-13 relative. Beyond 20 the
// asymptotic series 1/(x sqrt(pi)) * sum_k (-1)^k (2k-1)!!/(2x^2)^k is used.
// Negative x uses the reflection erfcx(x) = 2 exp(x^2) - erfcx(-x); past the
// exp overflow point the true value exceeds DBL_MAX and +inf is returned,
// which downstream ratio code treats as "tail mass is zero".
double erfcx(double x);

// log of the standard normal CDF, stable over the whole real line
double log_ndtr(double a);

// inverse Mills ratio phi(a)/Phi(a); tends to 0 as a -> +inf, to -a as a -> -inf
double mills_lower(double a);

// phi(a)/Q(a) where Q = 1 - Phi; mirror of mills_lower
inline double mills_upper(double a) { return mills_lower(-a); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double logsumexp2(double a, double b) {
  const double m = a > b ? a : b;
  if (m == -kInf) return -kInf;
  const double d = (a > b ? b : a) - m;
  return m + std::log1p(std::exp(d));
}

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(6.283185307179586476925286766559 * var) + d * d / var);
}

}  // namespace gtsi

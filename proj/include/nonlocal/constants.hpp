#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/math/special_functions/digamma.hpp>

namespace nonlocal {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Regime triple (N, p, gamma). The quotient exponent b = gamma / p is derived
// on construction and cannot be set on its own.
class Params {
 public:
  Params(int dim, double p, double gamma) : dim_(dim), p_(p), gamma_(gamma), b_(gamma / p) {
    if (dim < 1) throw DomainError("Params: dim must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("Params: p must be >= 1");
    if (!std::isfinite(gamma)) throw DomainError("Params: gamma must be finite");
  }

  int dim() const { return dim_; }
  double p() const { return p_; }
  double gamma() const { return gamma_; }
  double b() const { return b_; }
  // exponent of |x-y| on the level-set threshold: |u(x)-u(y)| > lambda |x-y|^(1+b)
  double e() const { return 1.0 + b_; }

 private:
  int dim_;
  double p_;
  double gamma_;
  double b_;
};

enum class Regime {
  gamma_positive,       // gamma > 0
  gamma_zero,           // gamma = 0
  negative_p_gt_1,      // gamma < 0, p > 1
  below_minus_one_p1,   // gamma < -1, p = 1
  band_p1,              // -1 <= gamma < 0, p = 1
};

inline Regime classify(const Params& prm) {
  if (prm.gamma() > 0) return Regime::gamma_positive;
  if (prm.gamma() == 0) return Regime::gamma_zero;
  if (prm.p() > 1) return Regime::negative_p_gt_1;
  if (prm.gamma() < -1) return Regime::below_minus_one_p1;
  return Regime::band_p1;
}

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::gamma_positive: return "gamma_positive";
    case Regime::gamma_zero: return "gamma_zero";
    case Regime::negative_p_gt_1: return "negative_p_gt_1";
    case Regime::below_minus_one_p1: return "below_minus_one_p1";
    case Regime::band_p1: return "band_p1";
  }
  return "unknown";
}

// Whether lambda^p nu converges to kappa/|gamma| ||grad u||_p^p for every
// u in the homogeneous Sobolev space (C^1_c functions converge in all regimes
// with gamma != 0).
inline bool sobolev_limit_holds(const Params& prm) {
  const Regime r = classify(prm);
  return r == Regime::gamma_positive || r == Regime::negative_p_gt_1 ||
         r == Regime::below_minus_one_p1;
}

// +1: lambda -> infinity, -1: lambda -> 0, 0: no limit (gamma = 0).
inline int limit_direction(const Params& prm) {
  if (prm.gamma() > 0) return 1;
  if (prm.gamma() < 0) return -1;
  return 0;
}

inline double kappa(double p, int dim) {
  if (!(p >= 1.0)) throw DomainError("kappa: p must be >= 1");
  if (dim < 1) throw DomainError("kappa: dim must be >= 1");
  if (dim == 1) return 2.0;
  const double n = dim;
  const double lg = std::lgamma(0.5 * (p + 1.0)) + 0.5 * (n - 1.0) * std::log(std::numbers::pi) -
                    std::lgamma(0.5 * (n + p));
  return 2.0 * std::exp(lg);
}

// d/dp log kappa(p, N)
inline double kappa_log_derivative(double p, int dim) {
  if (!(p >= 1.0)) throw DomainError("kappa_log_derivative: p must be >= 1");
  if (dim < 1) throw DomainError("kappa_log_derivative: dim must be >= 1");
  return 0.5 * (boost::math::digamma(0.5 * (p + 1.0)) - boost::math::digamma(0.5 * (dim + p)));
}

// Surface measure of S^{N-1}; S^0 carries counting measure.
inline double sphere_area(int dim) {
  if (dim < 1) throw DomainError("sphere_area: dim must be >= 1");
  if (dim == 1) return 2.0;
  if (dim == 2) return 2.0 * std::numbers::pi;
  const double n = dim;
  return 2.0 * std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n));
}

// nu_gamma of the superlevel set of the unit step 1_[0,inf) with p = 1.
inline double halfline_closed_form(double gamma, double lambda) {
  if (gamma == -1.0) throw DomainError("halfline_closed_form: gamma = -1 has no closed form");
  if (!(lambda > 0)) throw DomainError("halfline_closed_form: lambda must be > 0");
  return 2.0 / (std::abs(gamma + 1.0) * lambda);
}

}  // namespace nonlocal

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "nonlocal/catalog.hpp"
#include "nonlocal/engine1d.hpp"
#include "nonlocal/measure_types.hpp"
#include "nonlocal/montecarlo.hpp"
#include "nonlocal/rotation.hpp"

namespace nonlocal {

inline double quotient(const TestFunction& u, double b, std::span<const double> x, std::span<const double> y) {
  double d2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  if (d2 == 0) throw DomainError("quotient: coincident points");
  return (u(x) - u(y)) / std::pow(std::sqrt(d2), 1.0 + b);
}

inline double quotient(const TestFunction& u, double b, double x, double y) {
  return quotient(u, b, std::span<const double>(&x, 1), std::span<const double>(&y, 1));
}

inline MeasureEstimate grid1d(const LevelSetQuery& q, const MeasureOptions& opt) {
  if (q.u.dim != 1) throw DomainError("grid1d: dim must be 1");
  ShellIntegrator si(profile_of(q.u),
                     ShellIntegrand{ShellIntegrand::Kind::indicator, q.params.gamma(), q.lambda, q.params.e(), 1.0},
                     opt.shell());
  if (q.window) si.set_window(q.window->first, q.window->second);
  if (q.truncation) si.set_annulus(q.truncation->r_min, q.truncation->r_max);
  const auto r = si.run();
  MeasureEstimate est;
  est.method = Method::grid1d;
  est.value = r.value;
  est.error_bound = r.infinite ? 0.0 : r.error;
  est.evaluations = r.evaluations;
  est.tail_analytic = r.tail;
  est.infinite = r.infinite;
  est.diagnostics = r.diagnostics;
  return est;
}

inline Method resolve_method(const LevelSetQuery& q, const MeasureOptions& opt) {
  if (opt.method != Method::automatic) return opt.method;
  if (q.u.dim == 1) return Method::grid1d;
  if (q.u.dim == 2 && q.u.support_kind == SupportKind::compact) return Method::rotation2d;
  return Method::montecarlo;
}

// nu_gamma of the superlevel set {|Q_b u| > lambda}, b = gamma / p.
inline MeasureEstimate nu_measure(const LevelSetQuery& q, const MeasureOptions& opt = {}) {
  q.validate();
  if (q.u.oscillation == 0) {
    MeasureEstimate est;
    est.method = resolve_method(q, opt);
    return est;
  }
  switch (resolve_method(q, opt)) {
    case Method::grid1d: return grid1d(q, opt);
    case Method::rotation2d: return rotation2d(q, opt);
    case Method::montecarlo: return montecarlo(q, opt);
    case Method::automatic: break;
  }
  throw DomainError("nu_measure: no method");
}

// Same as nu_measure restricted to delta <= |x - y| <= R.
inline MeasureEstimate nu_measure_truncated(LevelSetQuery q, double delta, double R, const MeasureOptions& opt = {}) {
  if (!(delta > 0) || !(R >= delta)) throw DomainError("nu_measure_truncated: need 0 < delta <= R");
  q.truncation = Annulus{delta, R};
  return nu_measure(q, opt);
}

// ---------------------------------------------------------------------------
// Stopping-time intervals

struct StoppingDecomposition {
  double gamma = -2;
  std::vector<double> endpoints;
  int K = 0;
  std::vector<double> residuals;
};

struct StoppingInput {
  std::function<double(double)> f;
  double lo = 0, hi = 0;       // inf and sup of supp f
  std::vector<double> breaks;  // points where f is not smooth
};

inline StoppingDecomposition stopping_intervals(const StoppingInput& in, double gamma) {
  if (!(gamma < -1)) throw DomainError("stopping_intervals: gamma must be < -1");
  if (!(in.hi > in.lo)) throw DomainError("stopping_intervals: empty support");
  std::vector<double> pts{in.lo, in.hi};
  for (double t : in.breaks)
    if (t > in.lo && t < in.hi) pts.push_back(t);
  pts = detail::sorted_unique(std::move(pts));

  // F(a, x) = int_a^x f
  auto F = [&](double a, double x) {
    if (x <= a) return 0.0;
    std::vector<double> seg{a};
    for (double t : pts)
      if (t > a && t < x) seg.push_back(t);
    seg.push_back(x);
    return quad::adaptive_gauss_pieces(in.f, seg, 1e-15, 40).value;
  };
  const double total = F(in.lo, in.hi);
  if (!(total > 0)) throw DomainError("stopping_intervals: f is identically zero");

  const double q = -(gamma + 1.0);  // > 0
  StoppingDecomposition out;
  out.gamma = gamma;
  double a = in.lo;
  out.endpoints.push_back(a);
  while (a < in.hi) {
    const double rest = F(a, in.hi);
    if (!(rest > 0)) break;
    auto phi = [&](double x) { return std::pow(x - a, q) * F(a, x) - 0.5; };
    double lo = a, hi = std::max(in.hi, a + std::pow(0.5 / rest, 1.0 / q));
    while (phi(hi) < 0) hi = a + 2 * (hi - a);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < 0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
      const double r = phi(x);
      if (std::abs(r) < 1e-14) break;
      const double d = x - a;
      const double slope = q * std::pow(d, q - 1) * F(a, x) + std::pow(d, q) * in.f(x);
      if (!(slope > 0)) break;
      const double nx = x - r / slope;
      if (!(nx > a)) break;
      if (std::abs(phi(nx)) >= std::abs(r)) break;
      x = nx;
    }
    out.residuals.push_back(phi(x));
    out.endpoints.push_back(x);
    a = x;
  }
  out.K = static_cast<int>(out.endpoints.size()) - 1;
  return out;
}

}  // namespace nonlocal

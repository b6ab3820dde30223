#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "nonlocal/engine1d.hpp"
#include "nonlocal/measure_types.hpp"

namespace nonlocal {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct StratumResult {
  double mean = 0;
  double var_of_mean = 0;
  std::size_t evaluations = 0;
};

inline void random_direction(std::mt19937_64& rng, std::vector<double>& w) {
  const std::size_t n = w.size();
  if (n == 1) {
    w[0] = (rng() & 1ULL) ? 1.0 : -1.0;
    return;
  }
  if (n == 2) {
    const double a = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
    w[0] = std::cos(a);
    w[1] = std::sin(a);
    return;
  }
  std::normal_distribution<double> g;
  double s = 0;
  do {
    s = 0;
    for (auto& v : w) {
      v = g(rng);
      s += v * v;
    }
  } while (s == 0);
  s = std::sqrt(s);
  for (auto& v : w) v /= s;
}

}  // namespace detail

// Stratified estimator of
//   nu = 2 int_K dx int_S dw int_0^inf r^(gamma-1) 1_E(x, x + r w) / c(x, x + r w) dr,
// c = number of the two points inside the support box K. Radii beyond diam K
// are integrated in closed form per sampled x.
inline MeasureEstimate montecarlo(const LevelSetQuery& q, const MeasureOptions& opt) {
  const auto& u = q.u;
  if (u.support_kind != SupportKind::compact) throw DomainError("montecarlo: compact support required");
  if (q.window) throw DomainError("montecarlo: windows are not supported");
  MeasureEstimate est;
  est.method = Method::montecarlo;
  est.seed = opt.seed;
  if (u.oscillation == 0) return est;

  const int N = u.dim;
  const auto& lo = u.support.lo;
  const auto& hi = u.support.hi;
  double vol = 1, diam2 = 0;
  for (int i = 0; i < N; ++i) {
    vol *= hi[i] - lo[i];
    diam2 += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  }
  const double diam = std::sqrt(diam2);
  const double g = q.params.gamma(), e = q.params.e(), b = q.params.b(), lam = q.lambda;
  const double sigma = sphere_area(N);
  const double osc = std::max(u.oscillation, u.sup_norm);

  // radii where the superlevel set can live
  double r_lo = 0, r_hi = diam;
  bool exact_lo = false;
  if (e < 0) r_lo = std::pow(osc / lam, 1.0 / e), exact_lo = true;
  if (e > 0) r_hi = std::min(r_hi, std::pow(osc / lam, 1.0 / e));
  if (auto L = u.lipschitz_bound(); L && opt.use_lipschitz_hint) {
    const double Lb = *L * (1 + 1e-9);
    if (b < 0 && Lb > 0) r_lo = std::max(r_lo, std::pow(Lb / lam, 1.0 / b)), exact_lo = true;
    if (b > 0) r_hi = std::min(r_hi, std::pow(Lb / lam, 1.0 / b));
    if (b == 0 && lam >= Lb) r_hi = 0;
  }
  double remainder_bound = 0;
  if (!exact_lo) {
    r_lo = diam * opt.h_floor_rel;
    if (g > 0) remainder_bound = 2 * vol * sigma * std::pow(r_lo, g) / g;
  }
  if (q.truncation) {
    r_lo = std::max(r_lo, q.truncation->r_min);
    r_hi = std::min(r_hi, q.truncation->r_max);
    remainder_bound = 0;
  }

  std::vector<double> edges;
  if (r_hi > r_lo) {
    edges.push_back(r_lo);
    while (edges.back() * 10 < r_hi) edges.push_back(edges.back() * 10);
    edges.push_back(r_hi);
  }
  const std::size_t n_strata = edges.empty() ? 0 : edges.size() - 1;
  std::vector<double> W(n_strata);
  double W_total = 0;
  for (std::size_t k = 0; k < n_strata; ++k) {
    W[k] = quad::power_weight(g, edges[k], edges[k + 1]);
    W_total += W[k];
  }
  const bool far = !q.truncation && diam < std::numeric_limits<double>::infinity();
  const std::size_t n_far = std::max<std::size_t>(opt.min_per_stratum, opt.samples / 10);

  auto uniform_point = [&](std::mt19937_64& rng, std::vector<double>& x) {
    for (int i = 0; i < N; ++i) x[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
  };
  auto inside = [&](const std::vector<double>& y) {
    for (int i = 0; i < N; ++i)
      if (y[i] < lo[i] || y[i] > hi[i]) return false;
    return true;
  };

  std::vector<detail::StratumResult> res(n_strata + 1);
  parallel_for(n_strata + 1, opt.threads, [&](std::size_t k) {
    std::mt19937_64 rng(detail::splitmix64(opt.seed ^ detail::splitmix64(k + 1)));
    std::vector<double> x(N), y(N), w(N);
    double s1 = 0, s2 = 0;
    std::size_t n;
    if (k == n_strata) {
      if (!far) return;
      n = n_far;
      for (std::size_t i = 0; i < n; ++i) {
        uniform_point(rng, x);
        const double v = std::abs(u(std::span<const double>(x)));
        const double z = detail::tail_weight(v, g, lam, e, diam);
        s1 += z;
        s2 += z * z;
      }
    } else {
      const double a = edges[k], c = edges[k + 1];
      n = std::max<std::size_t>(opt.min_per_stratum,
                                static_cast<std::size_t>(static_cast<double>(opt.samples) * W[k] / W_total));
      const double ag = g != 0 ? std::pow(a, g) : 0, cg = g != 0 ? std::pow(c, g) : 0;
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        uniform_point(rng, x);
        detail::random_direction(rng, w);
        const double t = unif(rng);
        const double r = g != 0 ? std::pow(ag + t * (cg - ag), 1.0 / g) : a * std::pow(c / a, t);
        for (int d = 0; d < N; ++d) y[d] = x[d] + r * w[d];
        const double du = std::abs(u(std::span<const double>(x)) - u(std::span<const double>(y)));
        double z = 0;
        if (du > lam * std::pow(r, e) + 16 * std::numeric_limits<double>::epsilon() * osc) z = inside(y) ? 0.5 : 1.0;
        s1 += z;
        s2 += z * z;
      }
    }
    const double mean = s1 / static_cast<double>(n);
    const double var = std::max(0.0, s2 / static_cast<double>(n) - mean * mean);
    res[k] = {mean, var / static_cast<double>(n - 1 > 0 ? n - 1 : 1), 2 * n};
  });

  const double scale = 2 * vol * sigma;
  double value = 0, var = 0;
  for (std::size_t k = 0; k < n_strata; ++k) {
    value += scale * W[k] * res[k].mean;
    var += scale * scale * W[k] * W[k] * res[k].var_of_mean;
    est.evaluations += res[k].evaluations;
  }
  if (far) {
    est.tail_analytic = scale * res[n_strata].mean;
    value += est.tail_analytic;
    var += scale * scale * res[n_strata].var_of_mean;
    est.evaluations += res[n_strata].evaluations / 2;
  }
  if (!std::isfinite(value)) {
    est.infinite = true;
    est.value = std::numeric_limits<double>::infinity();
    est.diagnostics = "far field diverges";
    return est;
  }
  est.value = value;
  est.error_bound = 3 * std::sqrt(var) + remainder_bound;
  est.tail_analytic = std::min(est.tail_analytic, est.value);
  return est;
}

}  // namespace nonlocal

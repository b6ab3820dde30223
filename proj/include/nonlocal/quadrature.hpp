#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <utility>

namespace nonlocal::quad {

// int_{h0}^{h1} h^(g-1) dh for 0 < h0 <= h1 (h1 may be +inf when g < 0).
inline double power_weight(double g, double h0, double h1) {
  if (h1 <= h0) return 0.0;
  if (std::isinf(h1)) {
    if (g >= 0) return std::numeric_limits<double>::infinity();
    return std::pow(h0, g) / -g;
  }
  const double lr = std::log(h1 / h0);
  if (g == 0) return lr;
  return std::pow(h0, g) * std::expm1(g * lr) / g;
}

// Weights (w0, w1) with int_{h0}^{h1} h^(g-1) S(h) dh = w0 S(h0) + w1 S(h1)
// for S linear on [h0, h1].
inline std::pair<double, double> linear_weights(double g, double h0, double h1) {
  const double dh = h1 - h0;
  if (dh <= 0) return {0.0, 0.0};
  const double t = dh / h0;
  double w1;
  if (t < 1e-4) {
    // series in t of int_0^dh (h0+v)^(g-1) v dv / dh
    const double c1 = g - 1.0, c2 = (g - 1.0) * (g - 2.0);
    w1 = std::pow(h0, g - 1.0) * dh * (0.5 + c1 * t / 3.0 + c2 * t * t / 8.0);
  } else {
    w1 = (power_weight(g + 1.0, h0, h1) - h0 * power_weight(g, h0, h1)) / dh;
  }
  const double w = power_weight(g, h0, h1);
  return {w - w1, w1};
}

template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> x;
  std::array<double, N> w;
};

inline constexpr GaussLegendre<4> gl4{
    {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
    {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538}};

inline constexpr GaussLegendre<8> gl8{
    {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
     0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363},
    {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
     0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763}};

template <std::size_t N, class F>
double gauss(const GaussLegendre<N>& rule, F&& f, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0;
  for (std::size_t i = 0; i < N; ++i) s += rule.w[i] * f(c + r * rule.x[i]);
  return s * r;
}

struct Integral {
  double value = 0;
  double error = 0;
  std::size_t evaluations = 0;
};

namespace detail {
// Panels stop at rounding level: their own, or their share by length of the
// whole integral's (`floor` per unit length).
template <class F>
void adaptive_gauss_rec(F& f, double a, double b, double coarse, double tol, double floor, int depth,
                        Integral& out) {
  const double m = 0.5 * (a + b);
  const double l = gauss(gl8, f, a, m), r = gauss(gl8, f, m, b);
  out.evaluations += 16;
  const double fine = l + r;
  const double diff = std::abs(fine - coarse);
  const double noise = std::max(floor * (b - a), 64 * std::numeric_limits<double>::epsilon() * (std::abs(l) + std::abs(r)));
  if (diff <= std::max(tol, noise) || depth <= 0 || !(b - a > 1e-15 * (std::abs(a) + std::abs(b)))) {
    out.value += fine;
    out.error += diff;
    return;
  }
  adaptive_gauss_rec(f, a, m, l, 0.5 * tol, floor, depth - 1, out);
  adaptive_gauss_rec(f, m, b, r, 0.5 * tol, floor, depth - 1, out);
}
}  // namespace detail

// Adaptive 8-point Gauss-Legendre with panel halving; error is the sum of
// coarse/fine differences on accepted panels.
template <class F>
Integral adaptive_gauss(F&& f, double a, double b, double tol, int max_depth = 30) {
  Integral out;
  if (!(b > a)) return out;
  const double coarse = gauss(gl8, f, a, b);
  out.evaluations += 8;
  const double floor = 64 * std::numeric_limits<double>::epsilon() * std::abs(coarse) / (b - a);
  detail::adaptive_gauss_rec(f, a, b, coarse, tol, floor, max_depth, out);
  return out;
}

// Piecewise version over sorted breakpoints; tolerance split by panel width.
template <class F, class Range>
Integral adaptive_gauss_pieces(F&& f, const Range& pts, double tol, int max_depth = 30) {
  Integral out;
  if (std::size(pts) < 2) return out;
  const double total = *std::prev(std::end(pts)) - *std::begin(pts);
  auto it = std::begin(pts);
  double a = *it;
  for (++it; it != std::end(pts); ++it) {
    const double b = *it;
    if (b > a) {
      const auto r = adaptive_gauss(f, a, b, tol * (b - a) / total, max_depth);
      out.value += r.value;
      out.error += r.error;
      out.evaluations += r.evaluations;
    }
    a = b;
  }
  return out;
}

}  // namespace nonlocal::quad

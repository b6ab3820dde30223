#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/catalog.hpp"
#include "nonlocal/parallel.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double partial_value, double partial_error, std::size_t evaluations)
      : std::runtime_error(what), partial_value(partial_value), partial_error(partial_error), evaluations(evaluations) {}
  double partial_value;
  double partial_error;
  std::size_t evaluations;
};

// A one-dimensional function that is constant outside [a, c].
struct Profile1d {
  std::function<double(double)> f;
  double a = 0, c = 0;
  double left = 0, right = 0;
  std::vector<double> breaks;  // sorted, inside [a, c], including a and c
  double resolution = 1.0 / 256;
  double oscillation = 0;
  std::optional<double> lip_bound;
};

inline Profile1d profile_of(const TestFunction& u) {
  if (u.dim != 1) throw DomainError("profile_of: function is not one-dimensional");
  Profile1d p;
  p.f = u.f1;
  std::tie(p.a, p.c) = u.span1();
  if (u.support_kind == SupportKind::gradient_compact) {
    p.left = u.left_value;
    p.right = u.right_value;
  }
  p.breaks = u.breaks;
  p.breaks.push_back(p.a);
  p.breaks.push_back(p.c);
  p.breaks = detail::sorted_unique(std::move(p.breaks));
  p.breaks.erase(std::remove_if(p.breaks.begin(), p.breaks.end(), [&](double t) { return t < p.a || t > p.c; }),
                 p.breaks.end());
  p.resolution = u.resolution;
  p.oscillation = u.oscillation;
  if (auto l = u.lipschitz_bound()) p.lip_bound = *l * (1.0 + 1e-9);
  return p;
}

struct ShellOptions {
  double rel_tol = 1e-4;
  double abs_tol = 1e-300;
  int max_cell_depth = 24;
  int max_h_depth = 40;
  double h_floor_rel = 1e-12;
  double margin = 2.0;
  double divergence_ratio = 0.97;
  std::size_t max_evaluations = 20'000'000'000ULL;
  unsigned threads = 1;
  bool use_lipschitz_hint = true;
};

struct ShellResult {
  double value = 0;  // full measure (both orientations)
  double error = 0;
  double tail = 0;
  bool infinite = false;
  std::size_t evaluations = 0;
  int octaves = 0;
  double h_min = 0;
  std::string diagnostics;
};

namespace detail {

struct SliceValue {
  double value = 0;
  double error = 0;
  std::size_t evaluations = 0;
};

// Sorted cell boundaries for the x-scan at shift h on [xlo, xhi].
inline std::vector<double> slice_points(const Profile1d& P, double h, double xlo, double xhi) {
  std::vector<double> pts;
  pts.reserve(2 * P.breaks.size() + 2);
  pts.push_back(xlo);
  auto a = P.breaks.begin(), ae = P.breaks.end();
  auto b = P.breaks.begin(), be = P.breaks.end();
  while (a != ae || b != be) {
    double v;
    if (b == be || (a != ae && *a <= *b - h)) {
      v = *a++;
    } else {
      v = *b++ - h;
    }
    if (v > xlo && v < xhi) pts.push_back(v);
  }
  pts.push_back(xhi);
  std::vector<double> out;
  out.reserve(pts.size());
  for (double v : pts) {
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

class Slicer {
 public:
  Slicer(const Profile1d& P, int max_depth) : P_(P), max_depth_(max_depth) {}

  // Measure of {x in [xlo, xhi] : |f(x+h) - f(x)| > t}.
  SliceValue indicator(double h, double t, double xlo, double xhi) const {
    SliceValue out;
    if (!(xhi > xlo)) return out;
    const auto pts = slice_points(P_, h, xlo, xhi);
    // per-slice evaluation budget; cells past it are left unresolved
    const std::size_t budget = kSliceBudget + 64 * static_cast<std::size_t>(std::ceil((xhi - xlo) / P_.resolution));
    // differences within a few ulps of t count as ties
    const double tie = t + 16 * std::numeric_limits<double>::epsilon() * P_.oscillation;
    auto in = [&](double x) {
      out.evaluations += 2;
      return std::abs(P_.f(x + h) - P_.f(x)) > tie;
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double p0 = pts[i], p1 = pts[i + 1];
      const auto n = static_cast<std::size_t>(std::ceil((p1 - p0) / P_.resolution));
      const std::size_t cells = std::max<std::size_t>(1, n);
      const double w = (p1 - p0) / static_cast<double>(cells);
      bool left = in(p0);
      for (std::size_t k = 0; k < cells; ++k) {
        const double x0 = p0 + w * static_cast<double>(k);
        const double x1 = (k + 1 == cells) ? p1 : p0 + w * static_cast<double>(k + 1);
        const bool right = in(x1);
        cell(x0, x1, left, right, 0, budget, out, in);
        left = right;
      }
    }
    return out;
  }

  // int_{xlo}^{xhi} |f(x+h) - f(x)|^p dx with an 8/4-point Gauss error estimate per cell.
  SliceValue power(double h, double p, double xlo, double xhi) const {
    SliceValue out;
    if (!(xhi > xlo)) return out;
    const auto pts = slice_points(P_, h, xlo, xhi);
    auto g = [&](double x) { return std::pow(std::abs(P_.f(x + h) - P_.f(x)), p); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double p0 = pts[i], p1 = pts[i + 1];
      const auto n = static_cast<std::size_t>(std::ceil((p1 - p0) / P_.resolution));
      const std::size_t cells = std::max<std::size_t>(1, n);
      const double w = (p1 - p0) / static_cast<double>(cells);
      for (std::size_t k = 0; k < cells; ++k) {
        const double x0 = p0 + w * static_cast<double>(k);
        const double x1 = (k + 1 == cells) ? p1 : x0 + w;
        const double fine = quad::gauss(quad::gl8, g, x0, x1);
        const double coarse = quad::gauss(quad::gl4, g, x0, x1);
        out.value += fine;
        out.error += std::abs(fine - coarse);
        out.evaluations += 24;
      }
    }
    return out;
  }

 private:
  template <class In>
  void cell(double x0, double x1, bool l, bool r, int depth, std::size_t budget, SliceValue& out, In& in) const {
    const double xm = 0.5 * (x0 + x1);
    const bool m = in(xm);
    if (l == r && r == m) {
      if (m) out.value += x1 - x0;
      return;
    }
    if (depth >= max_depth_ || !(xm > x0 && xm < x1) || out.evaluations > budget) {
      const double frac = (static_cast<int>(l) + 2 * static_cast<int>(m) + static_cast<int>(r)) / 4.0;
      out.value += frac * (x1 - x0);
      out.error += 0.5 * (x1 - x0);
      return;
    }
    cell(x0, xm, l, m, depth + 1, budget, out, in);
    cell(xm, x1, m, r, depth + 1, budget, out, in);
  }

  static constexpr std::size_t kSliceBudget = 400'000;
  const Profile1d& P_;
  int max_depth_;
};

// w(v) = int_{H}^{inf} h^(g-1) 1[v > lambda h^e] dh
inline double tail_weight(double v, double g, double lambda, double e, double H) {
  if (!(v > 0)) return 0.0;
  if (e > 0) {
    const double hs = std::pow(v / lambda, 1.0 / e);
    return hs > H ? quad::power_weight(g, H, hs) : 0.0;
  }
  if (e < 0) {
    const double hs = std::pow(v / lambda, 1.0 / e);
    return quad::power_weight(g, std::max(H, hs), std::numeric_limits<double>::infinity());
  }
  return v > lambda ? quad::power_weight(g, H, std::numeric_limits<double>::infinity()) : 0.0;
}

}  // namespace detail

// Integrand selector for the shell integrator.
struct ShellIntegrand {
  // overlap: S(h) = |[x0,x1] ∩ [y0-h, y1-h]| (pairs of two fixed intervals)
  enum class Kind { indicator, power, overlap } kind = Kind::indicator;
  double gamma = 0;   // weight h^(gamma - 1)
  double lambda = 1;  // indicator threshold lambda h^e
  double e = 1;
  double p = 1;       // power integrand exponent; remainder model S ~ h^p
  std::array<double, 4> overlap{};  // x0, x1, y0, y1
};

// Evaluates 2 int_{h>0} h^(gamma-1) S(h) dh, where S(h) is the x-measure (or
// x-integral) of the slice at shift h.
class ShellIntegrator {
 public:
  ShellIntegrator(Profile1d profile, ShellIntegrand in, ShellOptions opt)
      : P_(std::move(profile)), in_(in), opt_(opt), slicer_(P_, opt.max_cell_depth) {}

  void set_window(double w0, double w1) { window_ = {w0, w1}; }
  void set_annulus(double r0, double r1) { annulus_ = {r0, r1}; }

  ShellResult run() {
    ShellResult res;
    const double D = P_.c - P_.a;
    if (P_.oscillation == 0.0) return res;
    if (annulus_ && !(annulus_->second > annulus_->first)) return res;

    double top, bottom;
    bool exact_bottom = false;
    if (annulus_) {
      top = annulus_->second;
      bottom = annulus_->first;
      exact_bottom = true;
    } else if (window_) {
      top = window_->second - window_->first;
      bottom = 0;
    } else {
      top = D + opt_.margin;
      bottom = 0;
      const auto t = tail(top);
      if (t.infinite) {
        res.infinite = true;
        res.value = std::numeric_limits<double>::infinity();
        res.diagnostics = "plateau jump makes the far field divergent";
        return res;
      }
      res.tail = 2 * t.value;
      res.error += 2 * t.error;
      res.evaluations += t.evaluations;
    }

    if (in_.kind == ShellIntegrand::Kind::indicator) {
      // |u(x+h) - u(x)| <= min(osc, lip h) restricts where the slice can be nonzero
      const double e = in_.e, b = e - 1.0, lam = in_.lambda;
      if (e > 0) top = std::min(top, std::pow(P_.oscillation / lam, 1.0 / e) * (1 + 1e-9));
      if (e < 0) {
        const double hz = std::pow(P_.oscillation / lam, 1.0 / e) * (1 - 1e-9);
        if (hz > bottom) bottom = hz, exact_bottom = true;
      }
      if (P_.lip_bound && opt_.use_lipschitz_hint) {
        const double L = *P_.lip_bound;
        if (b > 0) top = std::min(top, std::pow(L / lam, 1.0 / b) * (1 + 1e-9));
        if (b < 0 && L > 0) {
          const double hz = std::pow(L / lam, 1.0 / b) * (1 - 1e-9);
          if (hz > bottom) bottom = hz, exact_bottom = true;
        }
        if (b == 0 && lam >= L) top = 0;
      }
    }
    if (in_.kind == ShellIntegrand::Kind::overlap) {
      const auto& o = in_.overlap;
      top = std::min(top, o[3] - o[0]);
      if (o[2] - o[1] > bottom) bottom = o[2] - o[1], exact_bottom = true;
    }
    const double scale = std::max({1.0, std::abs(P_.a), std::abs(P_.c), D});
    const double floor = opt_.h_floor_rel * scale;
    if (!exact_bottom) bottom = std::max(bottom, floor);
    if (!(top > bottom)) {
      res.value = res.tail;
      return finish(res);
    }

    // phase 1: coarse octaves, descending
    std::vector<Octave> oct;
    double h_hi = top;
    bool stop = false;
    double remainder = 0, remainder_err = 0;
    const unsigned batch = std::max(1u, opt_.threads);
    while (!stop) {
      std::vector<Octave> fresh;
      for (unsigned k = 0; k < batch && h_hi > bottom; ++k) {
        const double h_lo = std::max(0.5 * h_hi, bottom);
        fresh.push_back(Octave{h_lo, h_hi});
        h_hi = h_lo;
      }
      if (fresh.empty()) break;
      std::vector<double> nodes;
      for (auto& o : fresh) {
        for (int j = 0; j <= 8; ++j) nodes.push_back(o.lo + (o.hi - o.lo) * j / 8.0);
      }
      std::vector<detail::SliceValue> sv(nodes.size());
      parallel_for(nodes.size(), opt_.threads, [&](std::size_t i) { sv[i] = slice(nodes[i]); });
      for (std::size_t k = 0; k < fresh.size(); ++k) {
        auto& o = fresh[k];
        for (int j = 0; j <= 8; ++j) {
          o.h[j] = nodes[9 * k + j];
          o.s[j] = sv[9 * k + j].value;
          o.e[j] = sv[9 * k + j].error;
          res.evaluations += sv[9 * k + j].evaluations;
        }
        o.coarse = 0;
        double coarser = 0;
        for (int j = 0; j < 8; ++j) o.coarse += trap(o.h[j], o.h[j + 1], o.s[j], o.s[j + 1]);
        for (int j = 0; j < 8; j += 2) coarser += trap(o.h[j], o.h[j + 2], o.s[j], o.s[j + 2]);
        o.coarse_err = std::abs(o.coarse - coarser);
        oct.push_back(o);
        check_budget(res, oct);
        if (!stop) stop = should_stop(oct, bottom, exact_bottom, res.tail, remainder, remainder_err, res);
        if (stop) break;
      }
      if (res.infinite) {
        res.value = std::numeric_limits<double>::infinity();
        res.error = 0;
        return res;
      }
    }
    if (!stop && !exact_bottom) {
      // reached the floor without a decision
      if (!floor_remainder(oct, remainder, remainder_err, res)) {
        res.value = std::numeric_limits<double>::infinity();
        res.error = 0;
        return res;
      }
    }

    // phase 2: refine each octave to its share of the tolerance
    double coarse_total = 0.5 * res.tail + remainder;
    for (const auto& o : oct) coarse_total += o.coarse;
    const double tol = std::max(opt_.rel_tol * std::abs(coarse_total), opt_.abs_tol) / (2.0 * std::max<std::size_t>(1, oct.size()));
    std::vector<Refined> ref(oct.size());
    parallel_for(oct.size(), opt_.threads, [&](std::size_t k) { ref[k] = refine(oct[k], tol); });
    double near = 0, near_err = 0;
    for (const auto& r : ref) {
      near += r.value;
      near_err += r.error;
      res.evaluations += r.evaluations;
    }
    res.octaves = static_cast<int>(oct.size());
    res.h_min = oct.empty() ? top : oct.back().lo;
    res.value = res.tail + 2.0 * (near + remainder);
    res.error += 2.0 * (near_err + remainder_err);
    if (res.evaluations > opt_.max_evaluations)
      throw BudgetExceeded("evaluation budget exceeded", res.value, res.error, res.evaluations);
    return finish(res);
  }

 private:
  struct Octave {
    double lo = 0, hi = 0;
    double h[9] = {}, s[9] = {}, e[9] = {};
    double coarse = 0, coarse_err = 0;
  };
  struct Refined {
    double value = 0, error = 0;
    std::size_t evaluations = 0;
  };
  struct Tail {
    double value = 0, error = 0;
    bool infinite = false;
    std::size_t evaluations = 0;
  };

  static ShellResult finish(ShellResult r) {
    if (r.value < 0) r.value = 0;
    if (r.tail > r.value) r.tail = r.value;
    return r;
  }

  void check_budget(const ShellResult& res, const std::vector<Octave>& oct) const {
    if (res.evaluations <= opt_.max_evaluations) return;
    double v = 0.5 * res.tail;
    for (const auto& o : oct) v += o.coarse;
    throw BudgetExceeded("evaluation budget exceeded", 2 * v, std::numeric_limits<double>::infinity(),
                         res.evaluations);
  }

  std::pair<double, double> xrange(double h) const {
    double xlo = P_.a - h, xhi = P_.c;
    if (window_) {
      xlo = std::max(xlo, window_->first);
      xhi = std::min(xhi, window_->second - h);
    }
    return {xlo, xhi};
  }

  detail::SliceValue slice(double h) const {
    const auto [xlo, xhi] = xrange(h);
    if (in_.kind == ShellIntegrand::Kind::indicator)
      return slicer_.indicator(h, in_.lambda * std::pow(h, in_.e), xlo, xhi);
    if (in_.kind == ShellIntegrand::Kind::overlap) {
      const auto& o = in_.overlap;
      return {std::max(0.0, std::min(o[1], o[3] - h) - std::max(o[0], o[2] - h)), 0.0, 0};
    }
    return slicer_.power(h, in_.p, xlo, xhi);
  }

  double trap(double h0, double h1, double s0, double s1) const {
    const auto [w0, w1] = quad::linear_weights(in_.gamma, h0, h1);
    return w0 * s0 + w1 * s1;
  }

  // Decides after each coarse octave whether the descent can stop.
  bool should_stop(const std::vector<Octave>& oct, double bottom, bool exact_bottom, double tail, double& rem,
                   double& rem_err, ShellResult& res) const {
    const auto& last = oct.back();
    if (last.lo <= bottom) {
      if (exact_bottom) {
        rem = 0;
        return true;
      }
      return false;  // floor: handled by floor_remainder
    }
    const std::size_t k = oct.size();
    if (k < 3) return false;
    const double c0 = oct[k - 1].coarse, c1 = oct[k - 2].coarse, c2 = oct[k - 3].coarse;
    double total = 0.5 * tail;
    for (const auto& o : oct) total += o.coarse;

    if (in_.kind == ShellIntegrand::Kind::power) {
      const double s = last.s[0], h = last.h[0];
      if (s <= 0) return c0 == 0 && c1 == 0;
      const double gp = in_.gamma + in_.p;
      rem = s * std::pow(h, in_.gamma) / gp;
      const double ratio_prev = last.s[8] / std::pow(last.h[8], in_.p);
      const double ratio_now = s / std::pow(h, in_.p);
      rem_err = rem * std::abs(ratio_now - ratio_prev) / std::max(ratio_now, 1e-300);
      return rem_err <= 0.1 * opt_.rel_tol * std::abs(total + rem);
    }

    if (c0 == 0 && c1 == 0 && c2 == 0 && last.s[0] == 0) {
      if (in_.e - 1.0 <= 0) {
        rem = 0;
        return true;
      }
      return false;
    }
    if (c1 > 0 && c2 > 0) {
      const double r1 = c0 / c1, r2 = c1 / c2;
      if (r1 < opt_.divergence_ratio && r2 < opt_.divergence_ratio &&
          std::abs(r1 - r2) <= 0.15 * std::max(r1, r2) + 1e-12) {
        const double r = std::max(r1, r2);
        rem = c0 * r / (1 - r);
        rem_err = rem;
        if (rem <= 0.05 * opt_.rel_tol * std::abs(total)) return true;
      }
      // sustained non-decay deep below every feature scale: divergent (a known
      // lower cutoff means growth is transient)
      if (!exact_bottom && k >= 4 && oct[k - 4].coarse > 0 && last.lo < 1e-6 * P_.resolution) {
        const double r3 = c2 / oct[k - 4].coarse;
        if (r1 >= opt_.divergence_ratio && r2 >= opt_.divergence_ratio && r3 >= opt_.divergence_ratio) {
          res.infinite = true;
          res.diagnostics = "octave contributions do not decay toward the diagonal";
          return true;
        }
      }
    }
    rem = 0;
    rem_err = 0;
    return false;
  }

  // Remainder below the floor; false when the contributions do not decay.
  bool floor_remainder(const std::vector<Octave>& oct, double& rem, double& rem_err, ShellResult& res) const {
    const std::size_t k = oct.size();
    if (k < 4) {
      rem = 0;
      rem_err = k ? oct.back().coarse : 0.0;
      return true;
    }
    const double c0 = oct[k - 1].coarse, c1 = oct[k - 2].coarse, c2 = oct[k - 3].coarse, c3 = oct[k - 4].coarse;
    if (c0 == 0) {
      rem = rem_err = 0;
      return true;
    }
    if (in_.kind == ShellIntegrand::Kind::power) {
      const double s = oct.back().s[0], h = oct.back().h[0];
      rem = s * std::pow(h, in_.gamma) / (in_.gamma + in_.p);
      rem_err = 0.01 * rem;
      return true;
    }
    const double r1 = c1 > 0 ? c0 / c1 : 1, r2 = c2 > 0 ? c1 / c2 : 1, r3 = c3 > 0 ? c2 / c3 : 1;
    if (r1 >= opt_.divergence_ratio && r2 >= opt_.divergence_ratio && r3 >= opt_.divergence_ratio) {
      res.infinite = true;
      res.diagnostics = "octave contributions do not decay toward the diagonal";
      return false;
    }
    const double r = std::min(std::max(r1, r2), opt_.divergence_ratio);
    rem = c0 * r / (1 - r);
    rem_err = rem;
    return true;
  }

  Refined refine(const Octave& o, double tol) const {
    Refined out;
    for (int j = 0; j < 8; ++j) {
      const double coarse = trap(o.h[j], o.h[j + 1], o.s[j], o.s[j + 1]);
      refine_rec(o.h[j], o.h[j + 1], o.s[j], o.s[j + 1], o.e[j], o.e[j + 1], coarse, tol / 8, 0, out);
    }
    return out;
  }

  void refine_rec(double h0, double h1, double s0, double s1, double e0, double e1, double coarse, double tol,
                  int depth, Refined& out) const {
    const double hm = 0.5 * (h0 + h1);
    const auto sm = slice(hm);
    out.evaluations += sm.evaluations;
    const double l = trap(h0, hm, s0, sm.value), r = trap(hm, h1, sm.value, s1);
    const double fine = l + r;
    const double diff = std::abs(fine - coarse);
    const auto [a0, am] = quad::linear_weights(in_.gamma, h0, hm);
    const auto [b0, b1] = quad::linear_weights(in_.gamma, hm, h1);
    const double slice_err = a0 * e0 + (am + b0) * sm.error + b1 * e1;
    // once the slices themselves are the limiting error, halving h cannot help
    if (diff <= tol || diff <= 2 * slice_err || depth >= opt_.max_h_depth || !(hm > h0 && hm < h1)) {
      out.value += fine;
      out.error += diff / 3.0 + slice_err;
      return;
    }
    refine_rec(h0, hm, s0, sm.value, e0, sm.error, l, 0.5 * tol, depth + 1, out);
    refine_rec(hm, h1, sm.value, s1, sm.error, e1, r, 0.5 * tol, depth + 1, out);
  }

  // int_H^inf h^(g-1) L(h) dh in closed form in h; quadrature in x.
  Tail tail(double H) const {
    Tail t;
    if (in_.kind != ShellIntegrand::Kind::indicator) return t;
    const double g = in_.gamma, lam = in_.lambda, e = in_.e, D = P_.c - P_.a;
    const double J = std::abs(P_.right - P_.left);
    if (J > 0) {
      // pairs straddling the whole support: length h - D, difference J
      double lo = H, hi = std::numeric_limits<double>::infinity();
      bool empty = false;
      if (e > 0) {
        hi = std::pow(J / lam, 1.0 / e);
        empty = hi <= H;
      } else if (e < 0) {
        lo = std::max(H, std::pow(J / lam, 1.0 / e));
      } else {
        empty = !(J > lam);
      }
      if (!empty) {
        if (std::isinf(hi) && g + 1.0 >= 0) {
          t.infinite = true;
          return t;
        }
        t.value += quad::power_weight(g + 1.0, lo, hi) - D * quad::power_weight(g, lo, hi);
      }
    }
    if (D > 0) {
      auto w = [&](double x) {
        const double v = P_.f(x);
        return detail::tail_weight(std::abs(P_.right - v), g, lam, e, H) +
               detail::tail_weight(std::abs(v - P_.left), g, lam, e, H);
      };
      std::vector<double> pts = P_.breaks;
      std::vector<double> fine;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((pts[i + 1] - pts[i]) / (8 * P_.resolution))));
        for (std::size_t k = 0; k < n; ++k) fine.push_back(pts[i] + (pts[i + 1] - pts[i]) * static_cast<double>(k) / static_cast<double>(n));
      }
      fine.push_back(pts.back());
      const double scale = quad::power_weight(g, H, 2 * H) * D + 1e-300;
      const auto r = quad::adaptive_gauss_pieces(w, fine, 1e-3 * opt_.rel_tol * scale, 30);
      t.value += r.value;
      t.error += r.error;
      t.evaluations += r.evaluations;
    }
    return t;
  }

  Profile1d P_;
  ShellIntegrand in_;
  ShellOptions opt_;
  detail::Slicer slicer_;
  std::optional<std::pair<double, double>> window_;
  std::optional<std::pair<double, double>> annulus_;
};

}  // namespace nonlocal

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nonlocal/catalog.hpp"
#include "nonlocal/constants.hpp"
#include "nonlocal/measure.hpp"

namespace nonlocal {

enum class Classification { converged, diverging, inconclusive };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::converged: return "converged";
    case Classification::diverging: return "diverging";
    case Classification::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct DivergenceConfig {
  double slope_tol = 0.05;
  double spread_tol = 0.03;
  double growth = 0.5;
  int trailing_k = 3;
};

// Geometric lambda grid from `from` to `to` (either direction).
struct GridSpec {
  double from = 1;
  double to = 1024;
  int count = 0;       // 0: derived from ratio
  double ratio = 2.0;  // spacing factor when count == 0
  bool enforce_direction = true;

  std::vector<double> lambdas() const {
    if (!(from > 0) || !(to > 0)) throw DomainError("GridSpec: lambdas must be > 0");
    int n = count;
    if (n <= 0) {
      if (!(ratio > 1)) throw DomainError("GridSpec: ratio must be > 1");
      n = 1 + static_cast<int>(std::lround(std::abs(std::log(to / from)) / std::log(ratio)));
    }
    if (n < 1) throw DomainError("GridSpec: empty grid");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? from : from * std::pow(to / from, static_cast<double>(i) / (n - 1));
    v.back() = to;
    return v;
  }
};

struct SweepPoint {
  double lambda = 0;
  double value = 0;  // lambda^p nu
  double error = 0;
  MeasureEstimate nu;
};

struct Sweep {
  Params params{1, 1.0, 1.0};
  std::vector<SweepPoint> points;
  Classification classification = Classification::inconclusive;
  std::optional<double> limit_estimate;
  double sup_estimate = 0;
  double slope = 0;
  double spread = 0;
  bool monotone_nu = true;  // nu nonincreasing in lambda
};

struct DivergenceVerdict {
  Classification classification = Classification::inconclusive;
  double slope = 0;
  double spread = 0;
};

inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// Classifies the trailing half of a sweep (grid order = direction of the limit).
inline DivergenceVerdict detect_divergence(const std::vector<double>& lambdas, const std::vector<double>& values,
                                           const DivergenceConfig& cfg = {}) {
  DivergenceVerdict v;
  const std::size_t n = values.size();
  if (n < 6 || lambdas.size() != n) return v;
  if (std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; })) {
    v.classification = Classification::converged;
    return v;
  }
  const std::size_t start = n - n / 2;
  std::vector<double> lx, ly, tail;
  for (std::size_t i = start; i < n; ++i) tail.push_back(values[i]);
  if (std::any_of(tail.begin(), tail.end(), [](double x) { return std::isinf(x); })) {
    v.classification = Classification::diverging;
    v.slope = std::numeric_limits<double>::infinity();
    return v;
  }
  const auto [mn, mx] = std::minmax_element(tail.begin(), tail.end());
  const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
  v.spread = mean > 0 ? (*mx - *mn) / mean : std::numeric_limits<double>::infinity();
  if (*mn > 0) {
    for (std::size_t i = start; i < n; ++i) {
      lx.push_back(std::log(lambdas[i]));
      ly.push_back(std::log(values[i]));
    }
    v.slope = fitted_slope(lx, ly);
    if (std::abs(v.slope) < cfg.slope_tol && v.spread < cfg.spread_tol) {
      v.classification = Classification::converged;
      return v;
    }
  }
  bool increasing = true;
  for (std::size_t i = 1; i < tail.size(); ++i) increasing = increasing && tail[i] > tail[i - 1];
  if (increasing && tail.front() > 0 && tail.back() > (1.0 + cfg.growth) * tail.front())
    v.classification = Classification::diverging;
  return v;
}

struct AnalysisOptions {
  MeasureOptions measure;
  DivergenceConfig divergence;
};

inline Sweep sweep(const TestFunction& u, const Params& prm, const GridSpec& grid, const AnalysisOptions& opt = {}) {
  const auto lambdas = grid.lambdas();
  if (lambdas.empty()) throw DomainError("sweep: empty grid");
  if (grid.enforce_direction && lambdas.size() > 1) {
    const int dir = limit_direction(prm);
    const bool up = lambdas.back() > lambdas.front();
    if (dir == 0) throw DomainError("sweep: gamma = 0 has no limit direction");
    if ((dir > 0) != up) throw DomainError("sweep: grid direction does not match the sign of gamma");
  }
  Sweep s;
  s.params = prm;
  for (double lam : lambdas) {
    LevelSetQuery q{u, prm, lam};
    SweepPoint pt;
    pt.lambda = lam;
    pt.nu = nu_measure(q, opt.measure);
    const double lp = std::pow(lam, prm.p());
    pt.value = pt.nu.infinite ? std::numeric_limits<double>::infinity() : lp * pt.nu.value;
    pt.error = pt.nu.infinite ? 0.0 : lp * pt.nu.error_bound;
    s.points.push_back(pt);
  }
  // nu must not increase with lambda
  std::vector<std::size_t> order(s.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.points[a].lambda < s.points[b].lambda; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& lo = s.points[order[i - 1]].nu;
    const auto& hi = s.points[order[i]].nu;
    if (hi.value > lo.value + lo.error_bound + hi.error_bound + 1e-12 * lo.value) s.monotone_nu = false;
  }

  std::vector<double> lam, val;
  for (const auto& p : s.points) {
    lam.push_back(p.lambda);
    val.push_back(p.value);
    s.sup_estimate = std::max(s.sup_estimate, p.value);
  }
  const auto verdict = detect_divergence(lam, val, opt.divergence);
  s.classification = verdict.classification;
  s.slope = verdict.slope;
  s.spread = verdict.spread;
  if (s.classification == Classification::converged) {
    const std::size_t k = std::min<std::size_t>(std::max(1, opt.divergence.trailing_k), s.points.size());
    double wsum = 0, vsum = 0, mn = std::numeric_limits<double>::infinity(), mx = 0;
    bool errors_ok = true;
    for (std::size_t i = s.points.size() - k; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      mn = std::min(mn, p.value);
      mx = std::max(mx, p.value);
      if (p.value > 0 && p.error > opt.divergence.spread_tol * p.value) errors_ok = false;
      const double w = p.error > 0 ? 1.0 / (p.error * p.error) : 1.0;
      wsum += w;
      vsum += w * p.value;
    }
    const bool all_zero = mx == 0;
    if (all_zero) {
      s.limit_estimate = 0.0;
    } else if (errors_ok && (mx - mn) <= opt.divergence.spread_tol * 0.5 * (mx + mn)) {
      // weights are either all 1/err^2 or all 1; mixing would bias toward exact zeros
      bool any_zero_err = false;
      for (std::size_t i = s.points.size() - k; i < s.points.size(); ++i) any_zero_err |= s.points[i].error == 0;
      if (any_zero_err) {
        vsum = 0;
        for (std::size_t i = s.points.size() - k; i < s.points.size(); ++i) vsum += s.points[i].value;
        s.limit_estimate = vsum / static_cast<double>(k);
      } else {
        s.limit_estimate = vsum / wsum;
      }
    } else {
      s.classification = Classification::inconclusive;
    }
  }
  return s;
}

// Predicted limit kappa(p,N)/|gamma| ||grad u||_p^p (Sobolev functions, gamma != 0).
inline std::optional<double> predicted_limit(const TestFunction& u, const Params& prm) {
  if (prm.gamma() == 0) return std::nullopt;
  const auto g = u.grad_lp_pow(prm.p());
  if (!g) return std::nullopt;
  return kappa(prm.p(), prm.dim()) / std::abs(prm.gamma()) * *g;
}

struct WeakNorm {
  double value = 0;
  double lambda_at_sup = 0;
  Sweep sweep;
};

// sup over a two-sided grid (8 decades around `center` unless a grid is given) of lambda^p nu.
inline WeakNorm weak_norm(const TestFunction& u, const Params& prm, std::optional<GridSpec> grid = std::nullopt,
                          const AnalysisOptions& opt = {}, std::vector<double> extra_lambdas = {},
                          double center = 1.0) {
  GridSpec g = grid.value_or(GridSpec{center * 1e-4, center * 1e4, 0, 2.0, false});
  g.enforce_direction = false;
  auto lams = g.lambdas();
  lams.insert(lams.end(), extra_lambdas.begin(), extra_lambdas.end());
  std::sort(lams.begin(), lams.end());
  lams.erase(std::unique(lams.begin(), lams.end()), lams.end());
  WeakNorm w;
  w.sweep.params = prm;
  for (double lam : lams) {
    SweepPoint pt;
    pt.lambda = lam;
    pt.nu = nu_measure(LevelSetQuery{u, prm, lam}, opt.measure);
    const double lp = std::pow(lam, prm.p());
    pt.value = pt.nu.infinite ? std::numeric_limits<double>::infinity() : lp * pt.nu.value;
    pt.error = pt.nu.infinite ? 0.0 : lp * pt.nu.error_bound;
    if (pt.value > w.value) {
      w.value = pt.value;
      w.lambda_at_sup = lam;
    }
    w.sweep.points.push_back(pt);
  }
  w.sweep.sup_estimate = w.value;
  return w;
}

// ---------------------------------------------------------------------------
// Lipschitz recovery through the gamma = 0 dichotomy

struct GrowthProbe {
  double lambda = 0;
  std::vector<int> ks;
  std::vector<double> values;  // truncated nu_0 on [2^-k, R]
  double slope = 0;            // per unit k
  enum class Verdict { finite, infinite, inconclusive } verdict = Verdict::inconclusive;
};

struct LipschitzOptions {
  int k_min = 4;
  int k_max = 14;
  int k_max_wide = 20;
  int iterations = 10;
  double zero_tol = 1e-3;
  double growth_tol = 0.1;
  std::optional<double> R;  // outer radius of the annulus; default: gradient-support diameter
  AnalysisOptions analysis;
};

inline GrowthProbe truncated_growth(const TestFunction& u, double lambda, int k_min, int k_max,
                                    const LipschitzOptions& opt) {
  GrowthProbe g;
  g.lambda = lambda;
  double R = opt.R.value_or(0.0);
  if (!opt.R) {
    const auto [a, c] = u.span1();
    R = std::max(c - a, 1.0);
  }
  auto mo = opt.analysis.measure;
  mo.use_lipschitz_hint = false;
  std::vector<double> kx;
  for (int k = k_min; k <= k_max; ++k) {
    const double delta = std::ldexp(1.0, -k);
    const auto est = nu_measure_truncated(LevelSetQuery{u, Params(u.dim, 1.0, 0.0), lambda}, delta, R, mo);
    g.ks.push_back(k);
    kx.push_back(k);
    g.values.push_back(est.value);
  }
  g.slope = fitted_slope(kx, g.values);
  const double end = std::abs(g.values.back());
  const double span = static_cast<double>(k_max - k_min);
  if (end < opt.zero_tol) {
    g.verdict = GrowthProbe::Verdict::finite;
  } else if (g.slope > 0 && g.slope * span > opt.growth_tol * end) {
    g.verdict = GrowthProbe::Verdict::infinite;
  }
  return g;
}

struct LipschitzEstimate {
  double value = 0;
  double lambda_lo = 0;
  double lambda_hi = 0;
  std::vector<GrowthProbe> probes;
};

class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline LipschitzEstimate estimate_lipschitz(const TestFunction& u, const LipschitzOptions& opt = {}) {
  if (u.dim != 1) throw DomainError("estimate_lipschitz: one-dimensional functions only");
  LipschitzEstimate out;
  auto finite = [&](double lam) {
    auto g = truncated_growth(u, lam, opt.k_min, opt.k_max, opt);
    if (g.verdict == GrowthProbe::Verdict::inconclusive) g = truncated_growth(u, lam, opt.k_min, opt.k_max_wide, opt);
    out.probes.push_back(g);
    if (g.verdict == GrowthProbe::Verdict::inconclusive)
      throw InconclusiveError("estimate_lipschitz: growth in delta is inconclusive at lambda = " + std::to_string(lam));
    return g.verdict == GrowthProbe::Verdict::finite;
  };
  if (finite(1e-9)) return out;
  double hi = 1.0, lo = 0.0;
  int guard = 0;
  while (!finite(hi)) {
    lo = hi;
    hi *= 2;
    if (++guard > 60) throw InconclusiveError("estimate_lipschitz: no finite level found");
  }
  if (lo == 0.0) {
    lo = hi / 2;
    while (finite(lo)) {
      hi = lo;
      lo /= 2;
      if (++guard > 120) throw InconclusiveError("estimate_lipschitz: no infinite level found");
    }
  }
  for (int i = 0; i < opt.iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (finite(mid) ? hi : lo) = mid;
  }
  out.lambda_lo = lo;
  out.lambda_hi = hi;
  out.value = 0.5 * (lo + hi);
  return out;
}

// ---------------------------------------------------------------------------
// Interval indicator

struct BvLimit {
  Sweep sweep;
  std::optional<double> limit;
  double bv_prediction = 0;      // 2/|gamma+1| ||u'||_M
  double sobolev_prediction = 0; // kappa(1,1)/|gamma| ||u'||_M (does not hold for BV)
};

inline GridSpec default_bv_grid(double gamma) {
  if (gamma > -1) return GridSpec{4.0, 4096.0};
  return GridSpec{0.25, std::ldexp(1.0, -12)};
}

inline BvLimit bv_indicator_limit(double L, double gamma, std::optional<GridSpec> grid = std::nullopt,
                                  const AnalysisOptions& opt = {}) {
  if (gamma == -1) throw DomainError("bv_indicator_limit: gamma = -1 excluded");
  auto g = grid.value_or(default_bv_grid(gamma));
  const auto lams = g.lambdas();
  const bool up = lams.back() > lams.front();
  if (lams.size() > 1 && up != (gamma > -1)) throw DomainError("bv_indicator_limit: wrong grid direction");
  g.enforce_direction = false;
  BvLimit out;
  const auto u = make_interval_indicator(L);
  out.sweep = sweep(u, Params(1, 1.0, gamma), g, opt);
  out.limit = out.sweep.limit_estimate;
  out.bv_prediction = 2.0 / std::abs(gamma + 1) * *u.grad_bv;
  out.sobolev_prediction = kappa(1.0, 1) / std::abs(gamma) * *u.grad_bv;
  return out;
}

// ---------------------------------------------------------------------------
// Cantor functions

// nu_gamma([0,a] x [c,1]) for one orientation, computed by the shell integrator.
inline double rectangle_pair_measure(double gamma, double a, double c, const MeasureOptions& opt = {}) {
  if (!(0 < a && a <= c && c < 1)) throw DomainError("rectangle_pair_measure: need 0 < a <= c < 1");
  Profile1d P;
  P.f = [](double) { return 0.0; };
  P.a = 0;
  P.c = 1;
  P.breaks = {0.0, a, c, 1.0};
  P.oscillation = 1;
  ShellIntegrand in{ShellIntegrand::Kind::overlap, gamma, 1.0, 1.0, 1.0};
  in.overlap = {0.0, a, c, 1.0};
  ShellIntegrator si(P, in, opt.shell());
  si.set_window(0.0, 1.0);
  return 0.5 * si.run().value;
}

struct CantorGrowth {
  double gamma = 0;
  double p = 1;
  double lambda = 0.25;
  std::vector<int> ms;
  std::vector<double> values;
  std::vector<double> errors;
  double slope = 0;
  double floor_unit = 0;         // nu_gamma([0,rho^2] x [1-rho^2,1]) from the engine
  double floor_unit_exact = 0;   // closed form
};

inline double rectangle_pair_exact(double gamma, double a, double c) {
  const double g1 = gamma + 1;
  return (std::pow(c - a, g1) - std::pow(1 - a, g1) - std::pow(c, g1) + 1.0) / (gamma * g1);
}

inline CantorGrowth cantor_growth(double gamma, double p, const std::vector<int>& ms, int m_cap = 14,
                                  const AnalysisOptions& opt = {}, double lambda = 0.25) {
  CantorGrowth out;
  out.gamma = gamma;
  out.p = p;
  out.lambda = lambda;
  const double rho = CantorSpec{gamma, 0}.rho();
  for (int m : ms) {
    if (m > m_cap) throw DomainError("cantor_growth: m above cap");
    if (p > 1 && m - 1 > (gamma + 1) / std::abs(gamma) * (p / (p - 1)))
      throw DomainError("cantor_growth: m violates the generation bound for p > 1");
    LevelSetQuery q{make_cantor_function(CantorSpec{gamma, m}), Params(1, p, gamma), lambda};
    q.window = std::make_pair(0.0, 1.0);
    const auto est = nu_measure(q, opt.measure);
    out.ms.push_back(m);
    out.values.push_back(est.value);
    out.errors.push_back(est.error_bound);
  }
  std::vector<double> mx(out.ms.begin(), out.ms.end());
  out.slope = out.ms.size() > 1 ? fitted_slope(mx, out.values) : 0.0;
  out.floor_unit = rectangle_pair_measure(gamma, rho * rho, 1 - rho * rho, opt.measure);
  out.floor_unit_exact = rectangle_pair_exact(gamma, rho * rho, 1 - rho * rho);
  return out;
}

// ---------------------------------------------------------------------------
// Mollified indicator at gamma = -1

struct MollifiedGrowth {
  double p = 1;
  std::vector<int> ms;
  std::vector<double> values;
  std::vector<double> errors;
  double slope = 0;
  int witness_checked = 0;
  int witness_inside = 0;
};

inline MollifiedGrowth mollified_indicator_growth(double p, const std::vector<int>& ms, int m_cap = 30,
                                                  const AnalysisOptions& opt = {}, std::uint64_t seed = 7) {
  MollifiedGrowth out;
  out.p = p;
  std::mt19937_64 rng(seed);
  for (int m : ms) {
    if (m > m_cap) throw DomainError("mollified_indicator_growth: m above cap");
    if (p > 1 && m > p / (p - 1)) throw DomainError("mollified_indicator_growth: m > p' for p > 1");
    const auto v = mollified_indicator(m, 1);
    const Params prm(1, p, -1.0);
    const auto est = nu_measure(LevelSetQuery{v, prm, 1.0}, opt.measure);
    out.ms.push_back(m);
    out.values.push_back(est.value);
    out.errors.push_back(est.error_bound);
    // witness pairs {|x| <= 1 - 2^-m} x {1 + 2^-m <= |y| <= 2}
    const double eps = std::ldexp(1.0, -m);
    std::uniform_real_distribution<double> ux(-1 + eps, 1 - eps), uy(1 + eps, 2.0);
    for (int i = 0; i < 100; ++i) {
      const double x = ux(rng);
      const double y = (rng() & 1ULL) ? uy(rng) : -uy(rng);
      ++out.witness_checked;
      if (std::abs(quotient(v, prm.b(), x, y)) > 1.0) ++out.witness_inside;
    }
  }
  std::vector<double> mx(out.ms.begin(), out.ms.end());
  out.slope = out.ms.size() > 1 ? fitted_slope(mx, out.values) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Counterexample series: per-bin infima of lambda nu

struct SeriesBin {
  int n = 0;
  double lambda_lo = 0;  // open end
  double lambda_hi = 0;  // closed end
  std::vector<double> lambdas;
  std::vector<double> values;  // lambda^p nu
  double infimum = 0;
};

struct SeriesDivergence {
  std::vector<SeriesBin> bins;
  Classification classification = Classification::inconclusive;
  bool bins_increasing = false;
};

// Bin n is the lambda interval ((n+1)^-2 lambda_{n+1}, n^-2 lambda_n]. The
// infimum is taken over the closure (lambda nu is continuous in lambda), so
// neighbouring bins share an endpoint evaluation.
inline SeriesDivergence series_bins(const Series& s, int first_bin, int last_bin, int points_per_bin = 4,
                                    const AnalysisOptions& opt = {}, double p = 1.0) {
  if (points_per_bin < 1) throw DomainError("series_bins: points_per_bin must be >= 1");
  if (last_bin < first_bin) throw DomainError("series_bins: empty bin range");
  auto lam_n = [&](int n) -> double {
    for (const auto& b : s.blocks)
      if (b.n == n) return b.lambda;
    const double R = std::ldexp(1.0, 2 * n);
    return s.gamma == -1 ? 1.0 : std::pow(R, -(1.0 + s.gamma));
  };
  SeriesDivergence out;
  const Params prm(1, p, s.gamma);
  std::map<double, double> memo;
  auto value = [&](double lam) {
    if (auto it = memo.find(lam); it != memo.end()) return it->second;
    const auto est = nu_measure(LevelSetQuery{s.function, prm, lam}, opt.measure);
    const double v = est.infinite ? std::numeric_limits<double>::infinity() : std::pow(lam, p) * est.value;
    memo.emplace(lam, v);
    return v;
  };
  std::vector<double> all_l, all_v;
  for (int n = first_bin; n <= last_bin; ++n) {
    SeriesBin bin;
    bin.n = n;
    bin.lambda_hi = lam_n(n) / (double(n) * n);
    bin.lambda_lo = lam_n(n + 1) / (double(n + 1) * (n + 1));
    bin.infimum = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= points_per_bin; ++i) {
      const double t = static_cast<double>(i) / points_per_bin;
      const double lam = i == points_per_bin ? bin.lambda_lo : bin.lambda_hi * std::pow(bin.lambda_lo / bin.lambda_hi, t);
      const double v = value(lam);
      bin.lambdas.push_back(lam);
      bin.values.push_back(v);
      bin.infimum = std::min(bin.infimum, v);
      if (i < points_per_bin || n == last_bin) {
        all_l.push_back(lam);
        all_v.push_back(v);
      }
    }
    out.bins.push_back(bin);
  }
  out.bins_increasing = out.bins.size() >= 2;
  for (std::size_t i = 1; i < out.bins.size(); ++i)
    out.bins_increasing = out.bins_increasing && out.bins[i].infimum > out.bins[i - 1].infimum;
  out.classification = detect_divergence(all_l, all_v, opt.divergence).classification;
  return out;
}

// ---------------------------------------------------------------------------
// BBM functional

struct BBMQuery {
  TestFunction u;
  double p = 1;
  double R = 1;
  std::vector<double> s_grid;
};

struct BBMResult {
  std::vector<double> s;
  std::vector<double> values;
  std::vector<double> errors;
  double trend = 0;  // linear extrapolation of the last two values to s = 0
};

inline BBMResult bbm_functional(const BBMQuery& q, const MeasureOptions& opt = {}) {
  if (q.u.dim != 1) throw DomainError("bbm_functional: one-dimensional functions only");
  if (!(q.p >= 1)) throw DomainError("bbm_functional: p must be >= 1");
  if (!(q.R > 0)) throw DomainError("bbm_functional: R must be > 0");
  if (q.s_grid.empty()) throw DomainError("bbm_functional: empty s grid");
  BBMResult out;
  for (double s : q.s_grid) {
    if (!(s > 0 && s < 1)) throw DomainError("bbm_functional: s must lie in (0, 1)");
    double v = 0, e = 0;
    if (q.u.oscillation > 0) {
      ShellIntegrand in{ShellIntegrand::Kind::power, s * q.p - q.p, 1.0, 1.0, q.p};
      ShellIntegrator si(profile_of(q.u), in, opt.shell());
      si.set_window(-q.R, q.R);
      const auto r = si.run();
      v = s * r.value;
      e = s * r.error;
    }
    out.s.push_back(s);
    out.values.push_back(v);
    out.errors.push_back(e);
  }
  const std::size_t n = out.s.size();
  if (n >= 2) {
    const double s1 = out.s[n - 2], s2 = out.s[n - 1], v1 = out.values[n - 2], v2 = out.values[n - 1];
    out.trend = v2 + (v2 - v1) * (0.0 - s2) / (s2 - s1);
  } else {
    out.trend = out.values.back();
  }
  return out;
}

}  // namespace nonlocal

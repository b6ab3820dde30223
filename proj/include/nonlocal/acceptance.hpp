#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nonlocal/analysis.hpp"
#include "nonlocal/catalog.hpp"
#include "nonlocal/constants.hpp"
#include "nonlocal/experiment.hpp"
#include "nonlocal/measure.hpp"

namespace nonlocal {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  nlohmann::json measured = nlohmann::json::object();
  nlohmann::json predicted = nlohmann::json::object();
  nlohmann::json tolerance = nlohmann::json::object();
  double seconds = 0;
  double time_limit = 0;  // 0: none
  std::string note;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  std::set<int> known_failures;

  std::set<int> failed() const {
    std::set<int> f;
    for (const auto& c : criteria)
      if (!c.pass) f.insert(c.id);
    return f;
  }
  bool all_pass() const { return failed().empty(); }
  // every failure is listed as known and every known failure did fail
  bool as_expected() const { return failed() == known_failures; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = kVersion;
    j["all_pass"] = all_pass();
    j["known_failures"] = known_failures;
    j["criteria"] = nlohmann::json::array();
    for (const auto& c : criteria) {
      j["criteria"].push_back({{"id", c.id},
                               {"name", c.name},
                               {"pass", c.pass},
                               {"measured", c.measured},
                               {"predicted", c.predicted},
                               {"tolerance", c.tolerance},
                               {"seconds", c.seconds},
                               {"time_limit", c.time_limit > 0 ? nlohmann::json(c.time_limit) : nlohmann::json()},
                               {"note", c.note}});
    }
    return j;
  }
};

namespace acceptance {

inline bool within_rel(double x, double ref, double tol) { return std::isfinite(x) && std::abs(x - ref) <= tol * std::abs(ref); }

inline MeasureOptions measure_defaults() {
  MeasureOptions o;
  o.rel_tol = 1e-4;
  return o;
}

inline AnalysisOptions analysis_defaults() {
  AnalysisOptions a;
  a.measure = measure_defaults();
  return a;
}

inline void kappa_table(CriterionResult& r) {
  struct Case {
    double p;
    int n;
    double v;
  };
  const Case cases[] = {{1, 1, 2.0}, {1, 2, 4.0}, {2, 2, std::numbers::pi}, {2, 1, 2.0}, {1, 3, 2 * std::numbers::pi}};
  r.pass = true;
  for (const auto& c : cases) {
    const double k = kappa(c.p, c.n);
    const std::string key = fmt::format("kappa({},{})", c.p, c.n);
    r.measured[key] = k;
    r.predicted[key] = c.v;
    r.pass = r.pass && within_rel(k, c.v, 1e-12);
  }
  r.tolerance = {{"relative", 1e-12}};
}

inline void halfline(CriterionResult& r) {
  r.pass = true;
  const auto u = make_halfline_step();
  for (double g : {1.0, 2.0, -2.0, -3.0}) {
    for (double lam : {0.25, 1.0, 4.0}) {
      const auto est = nu_measure(LevelSetQuery{u, Params(1, 1.0, g), lam}, measure_defaults());
      const double ref = halfline_closed_form(g, lam);
      const std::string key = fmt::format("gamma={},lambda={}", g, lam);
      r.measured[key] = json_number(est.value);
      r.predicted[key] = ref;
      r.pass = r.pass && !est.infinite && within_rel(est.value, ref, 0.01);
    }
  }
  r.tolerance = {{"relative", 0.01}};
}

inline void limit_case(CriterionResult& r, const std::string& key, const TestFunction& u, const Params& prm,
                       const GridSpec& grid) {
  const auto s = sweep(u, prm, grid, analysis_defaults());
  const double pred = *predicted_limit(u, prm);
  r.predicted[key] = pred;
  r.measured[key] = s.limit_estimate ? json_number(*s.limit_estimate) : nlohmann::json(to_string(s.classification));
  const bool ok = s.limit_estimate && within_rel(*s.limit_estimate, pred, 0.05);
  r.pass = r.pass && ok;
}

inline void limit_positive(CriterionResult& r) {
  r.tolerance = {{"relative", 0.05}};
  r.pass = true;
  limit_case(r, "tent gamma=1 p=1", make_tent(), Params(1, 1.0, 1.0), GridSpec{4.0, 4096.0});
  limit_case(r, "smooth_bump gamma=1 p=2", make_smooth_bump(1), Params(1, 2.0, 1.0), GridSpec{4.0, 4096.0});
}

inline void limit_negative(CriterionResult& r) {
  r.tolerance = {{"relative", 0.05}};
  r.pass = true;
  limit_case(r, "tent gamma=-2 p=2", make_tent(), Params(1, 2.0, -2.0), GridSpec{1.0, std::ldexp(1.0, -12)});
  limit_case(r, "smooth_bump gamma=-3 p=1", make_smooth_bump(1), Params(1, 1.0, -3.0),
             GridSpec{1.0, std::ldexp(1.0, -30)});
  r.note = "bump grid runs to 2^-30; at 2^-12 the trailing points have not levelled off";
}

inline void bv_mismatch(CriterionResult& r) {
  r.tolerance = {{"relative", 0.05}};
  const auto a = bv_indicator_limit(1.0, 1.0, std::nullopt, analysis_defaults());
  const auto b = bv_indicator_limit(1.0, -3.0, std::nullopt, analysis_defaults());
  auto val = [](const BvLimit& x) { return x.limit ? json_number(*x.limit) : nlohmann::json("none"); };
  r.measured = {{"limit gamma=1", val(a)}, {"limit gamma=-3", val(b)}};
  r.predicted = {{"limit gamma=1", 2.0}, {"limit gamma=-3", 2.0}, {"ratio to Sobolev formula", 0.5}};
  bool ok = a.limit && b.limit;
  if (a.limit) {
    const double ratio = *a.limit / a.sobolev_prediction;
    r.measured["Sobolev formula gamma=1"] = a.sobolev_prediction;
    r.measured["ratio to Sobolev formula"] = ratio;
    ok = ok && within_rel(*a.limit, 2.0, 0.05) && within_rel(ratio, 0.5, 0.05);
  }
  if (b.limit) ok = ok && within_rel(*b.limit, 2.0, 0.05);
  r.pass = ok;
}

inline void gamma_zero(CriterionResult& r) {
  const auto u = make_tent();
  LipschitzOptions lo;
  lo.analysis = analysis_defaults();
  const auto est = estimate_lipschitz(u, lo);
  const auto low = truncated_growth(u, 0.5, lo.k_min, lo.k_max, lo);
  const auto high = truncated_growth(u, 1.5, lo.k_min, lo.k_max, lo);
  const double span = lo.k_max - lo.k_min;
  const double scale = std::abs(low.values.back());
  r.measured = {{"lipschitz", est.value},
                {"slope at 0.5", low.slope},
                {"growth over k range at 0.5", low.slope * span},
                {"terminal value at 0.5", scale},
                {"terminal value at 1.5", high.values.back()}};
  r.predicted = {{"lipschitz", 1.0}};
  r.tolerance = {{"lipschitz relative", 0.1}, {"growth fraction", 0.1}, {"terminal at 1.5", 1e-3}};
  r.pass = within_rel(est.value, 1.0, 0.1) && low.slope > 0 && low.slope * span > 0.1 * scale &&
           std::abs(high.values.back()) < 1e-3;
}

inline void indicator_gamma_zero(CriterionResult& r) {
  const auto u = make_interval_indicator(1.0);
  const Params prm(1, 1.0, 0.0);
  std::vector<double> low_ratio, high_ratio;
  double sup = 0, C = 0;
  for (int k = -6; k <= 6; ++k) {
    const double lam = std::ldexp(1.0, k);
    const auto est = nu_measure(LevelSetQuery{u, prm, lam}, measure_defaults());
    if (est.infinite) {
      r.pass = false;
      r.note = "infinite measure at lambda = " + format_double(lam);
      return;
    }
    sup = std::max(sup, lam * est.value);
    if (k <= 0) low_ratio.push_back(est.value / std::log(2.0 / lam));
    if (k >= 0) high_ratio.push_back(est.value * lam);
  }
  for (double x : low_ratio) C = std::max(C, x);
  for (double x : high_ratio) C = std::max(C, x);
  // ratios may not grow toward either end of the range
  const bool flat_low = low_ratio.front() <= low_ratio.back() * (1 + 1e-6);
  const bool flat_high = high_ratio.back() <= high_ratio.front() * (1 + 1e-6);
  r.measured = {{"fitted C", C},
                {"ratio at 2^-6", low_ratio.front()},
                {"ratio at 1 (log form)", low_ratio.back()},
                {"ratio at 1 (1/lambda form)", high_ratio.front()},
                {"ratio at 2^6", high_ratio.back()},
                {"sup lambda nu_0", sup}};
  r.predicted = {{"sup lambda nu_0 bound", 20.0}};
  r.tolerance = {{"sup bound", "10 ||u'||_M"}};
  r.pass = std::isfinite(C) && flat_low && flat_high && sup < 20.0;
}

inline void cantor(CriterionResult& r) {
  const auto g = cantor_growth(-0.5, 1.0, {1, 2, 3, 4, 5, 6}, 14, analysis_defaults());
  bool mono = true, floor_ok = true;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (i > 0) mono = mono && g.values[i] >= g.values[i - 1];
    floor_ok = floor_ok && g.values[i] >= g.ms[i] * g.floor_unit;
  }
  r.measured = {{"A_m", g.values}, {"floor unit (engine)", g.floor_unit}, {"slope", g.slope}};
  r.predicted = {{"floor unit (closed form)", g.floor_unit_exact}};
  r.tolerance = {{"floor relative", 0.02}};
  r.pass = mono && floor_ok && within_rel(g.floor_unit, g.floor_unit_exact, 0.02);
}

inline void mollified(CriterionResult& r) {
  const auto g = mollified_indicator_growth(1.0, {2, 3, 4, 5, 6, 7, 8}, 30, analysis_defaults());
  bool strict = true;
  for (std::size_t i = 1; i < g.values.size(); ++i) strict = strict && g.values[i] > g.values[i - 1];
  r.measured = {{"values", g.values}, {"slope", g.slope}, {"witness", fmt::format("{}/{}", g.witness_inside, g.witness_checked)}};
  r.predicted = {{"strictly increasing", true}, {"slope", "> 0"}};
  r.pass = strict && g.slope > 0;
}

inline void series(CriterionResult& r) {
  SeriesOptions so;
  so.m_cap = 8;
  so.policy = OverflowPolicy::proportional;
  const auto s = counterexample_series(-0.5, 3, so);
  const auto d = series_bins(s, 1, 3, 4, analysis_defaults());
  std::vector<double> inf;
  for (const auto& b : d.bins) inf.push_back(b.infimum);
  std::vector<int> ms, need;
  for (const auto& b : s.blocks) {
    ms.push_back(b.m);
    need.push_back(static_cast<int>(b.m_required));
  }
  r.measured = {{"bin infima", inf}, {"block m", ms}};
  r.predicted = {{"bin infima", "strictly increasing"}, {"block m required", need}};
  r.pass = d.bins_increasing;
  r.note = "Cantor depths are scaled down to a cap of 8; the required depths cannot be represented in double precision";
}

inline void stopping(CriterionResult& r) {
  const auto d = stopping_intervals(StoppingInput{[](double x) { return (x >= 0 && x <= 1) ? 1.0 : 0.0; }, 0.0, 1.0, {}}, -2.0);
  const std::vector<double> ref{0.0, std::sqrt(0.5), 1.0 + std::sqrt(2.0)};
  r.measured = {{"K", d.K}, {"endpoints", d.endpoints}, {"residuals", d.residuals}};
  r.predicted = {{"K", 2}, {"endpoints", ref}};
  r.tolerance = {{"endpoint absolute", 1e-7}, {"residual absolute", 1e-10}};
  bool ok = d.K == 2 && d.endpoints.size() == ref.size();
  for (std::size_t i = 0; ok && i < ref.size(); ++i) ok = std::abs(d.endpoints[i] - ref[i]) <= 1e-7;
  for (double x : d.residuals) ok = ok && std::abs(x) < 1e-10;
  r.pass = ok;
}

inline void bbm(CriterionResult& r) {
  const auto u = make_tent();
  r.pass = true;
  r.tolerance = {{"factor", 0.95}};
  for (double p : {1.0, 2.0}) {
    const auto b = bbm_functional(BBMQuery{u, p, 2.0, {0.2, 0.1, 0.05, 0.025}}, measure_defaults());
    const double lhs = kappa(p, 1) / p * b.trend;
    const double rhs = *u.grad_lp_pow(p);
    r.measured[fmt::format("kappa/p V, p={}", p)] = lhs;
    r.measured[fmt::format("values, p={}", p)] = b.values;
    r.predicted[fmt::format("||u'||_p^p, p={}", p)] = rhs;
    r.pass = r.pass && lhs >= 0.95 * rhs;
  }
}

inline void weak_norms(CriterionResult& r) {
  r.pass = true;
  r.tolerance = {{"lower", "0.95 x limit"}, {"upper", "100 x ||grad u||_p^p"}};
  for (const auto& u : {make_tent(), make_smooth_bump(1)}) {
    for (double g : {1.0, -2.0}) {
      for (double p : {1.0, 2.0}) {
        const Params prm(1, p, g);
        const auto w = weak_norm(u, prm, std::nullopt, analysis_defaults());
        const double lim = *predicted_limit(u, prm);
        const double norm = *u.grad_lp_pow(p);
        const std::string key = fmt::format("{} gamma={} p={}", u.id, g, p);
        r.measured[key] = json_number(w.value);
        r.predicted[key] = {{"limit", lim}, {"upper", 100 * norm}};
        r.pass = r.pass && std::isfinite(w.value) && w.value >= 0.95 * lim && w.value <= 100 * norm;
      }
    }
  }
  r.note = "grid supremum is a lower bound of the weak norm and approaches the limit from below";
}

inline void finiteness(CriterionResult& r) {
  const auto u = make_tent();
  r.pass = true;
  for (double lam : {0.1, 1.0}) {
    const auto est = nu_measure(LevelSetQuery{u, Params(1, 1.0, -1.0), lam}, measure_defaults());
    r.measured[fmt::format("lambda={}", lam)] = json_number(est.value);
    r.pass = r.pass && !est.infinite && std::isfinite(est.value);
  }
  r.predicted = {{"all", "finite"}};
}

}  // namespace acceptance

// Runs every criterion; `log` gets one PASS/FAIL line per criterion.
inline AcceptanceReport run_acceptance(std::ostream& log, std::set<int> known_failures = {},
                                       const std::set<int>& only = {}) {
  struct Entry {
    int id;
    const char* name;
    double limit;
    std::function<void(CriterionResult&)> fn;
  };
  namespace a = acceptance;
  const std::vector<Entry> entries{
      {1, "kappa table", 1, a::kappa_table},
      {2, "half-line closed form", 30, a::halfline},
      {3, "limit, gamma > 0", 120, a::limit_positive},
      {4, "limit, gamma < 0", 120, a::limit_negative},
      {5, "BV mismatch", 0, a::bv_mismatch},
      {6, "gamma = 0 dichotomy", 0, a::gamma_zero},
      {7, "indicator nu_0 bounds", 0, a::indicator_gamma_zero},
      {8, "Cantor growth", 180, a::cantor},
      {9, "mollified indicator growth", 0, a::mollified},
      {10, "counterexample bins", 0, a::series},
      {11, "stopping decomposition", 0, a::stopping},
      {12, "BBM direction", 0, a::bbm},
      {13, "weak-norm sanity", 0, a::weak_norms},
      {14, "finiteness at gamma = -1", 0, a::finiteness},
  };
  AcceptanceReport rep;
  rep.known_failures = std::move(known_failures);
  for (const auto& e : entries) {
    if (!only.empty() && !only.count(e.id)) continue;
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.time_limit = e.limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(r);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.note = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.time_limit > 0 && r.seconds > r.time_limit) {
      r.pass = false;
      r.note += (r.note.empty() ? "" : "; ") + fmt::format("runtime {:.1f} s above limit {:.0f} s", r.seconds, r.time_limit);
    }
    log << fmt::format("criterion {:2d} {:<28} {} ({:.2f} s)", r.id, r.name, r.pass ? "PASS" : "FAIL", r.seconds)
        << (r.pass || !rep.known_failures.count(r.id) ? "" : " [known failure]") << "\n"
        << std::flush;
    rep.criteria.push_back(std::move(r));
  }
  if (!only.empty()) {
    std::set<int> kept;
    for (int id : rep.known_failures)
      if (only.count(id)) kept.insert(id);
    rep.known_failures = kept;
  }
  return rep;
}

}  // namespace nonlocal

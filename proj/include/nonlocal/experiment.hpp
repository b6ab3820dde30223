#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/version.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nonlocal/analysis.hpp"
#include "nonlocal/catalog.hpp"
#include "nonlocal/constants.hpp"
#include "nonlocal/measure.hpp"

namespace nonlocal {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { kappa, measure, sweep, weaknorm, lipschitz, cantor, mollified, series, bbm, stopping, bv_limit };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::kappa: return "kappa";
    case Command::measure: return "measure";
    case Command::sweep: return "sweep";
    case Command::weaknorm: return "weaknorm";
    case Command::lipschitz: return "lipschitz";
    case Command::cantor: return "cantor";
    case Command::mollified: return "mollified";
    case Command::series: return "series";
    case Command::bbm: return "bbm";
    case Command::stopping: return "stopping";
    case Command::bv_limit: return "bv-limit";
  }
  return "unknown";
}

inline Command command_from_string(std::string_view s) {
  for (auto c : {Command::kappa, Command::measure, Command::sweep, Command::weaknorm, Command::lipschitz,
                 Command::cantor, Command::mollified, Command::series, Command::bbm, Command::stopping,
                 Command::bv_limit})
    if (to_string(c) == s) return c;
  throw DomainError("unknown command '" + std::string(s) + "'");
}

inline std::string_view to_string(OverflowPolicy p) {
  switch (p) {
    case OverflowPolicy::reject: return "reject";
    case OverflowPolicy::clamp: return "clamp";
    case OverflowPolicy::proportional: return "proportional";
  }
  return "unknown";
}

inline OverflowPolicy policy_from_string(std::string_view s) {
  if (s == "reject") return OverflowPolicy::reject;
  if (s == "clamp") return OverflowPolicy::clamp;
  if (s == "proportional") return OverflowPolicy::proportional;
  throw DomainError("unknown overflow policy '" + std::string(s) + "'");
}

// Catalog ids plus the parametrised families: cantor(m), cantor_block(m),
// mollified_indicator(m). The Cantor families take gamma from the regime.
inline TestFunction resolve_function(std::string_view id, int dim, double gamma) {
  std::string name(id);
  int m = 0;
  if (const auto open = name.find('('); open != std::string::npos) {
    const std::string base = name.substr(0, open);
    if (base == "cantor" || base == "cantor_block" || base == "mollified_indicator") {
      const auto close = name.find(')', open);
      if (close == std::string::npos) throw DomainError("malformed function id '" + name + "'");
      try {
        m = std::stoi(name.substr(open + 1, close - open - 1));
      } catch (const std::exception&) {
        throw DomainError("bad argument in '" + name + "'");
      }
      name = base;
    }
  }
  if (name == "cantor") {
    if (dim != 1) throw DomainError("cantor is one-dimensional");
    return make_cantor_function(CantorSpec{gamma, m});
  }
  if (name == "cantor_block") return make_cantor_block(CantorSpec{gamma, m}, dim);
  if (name == "mollified_indicator") return mollified_indicator(m, dim);
  return make_standard(id, dim);
}

struct ExperimentConfig {
  Command command = Command::measure;
  std::string fn = "tent";
  int dim = 1;
  double p = 1;
  double gamma = 1;

  double lambda = 1;
  double lambda_from = 4;
  double lambda_to = 4096;
  int lambda_count = 0;
  double lambda_ratio = 2;

  double rel_tol = 1e-4;
  std::string method = "auto";
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0x5eed;
  int angles = 16;
  std::uint64_t max_evaluations = 20'000'000'000ULL;
  std::optional<double> r_min;
  std::optional<double> r_max;

  std::vector<int> ms;
  int m_cap = 14;
  int n_max = 3;
  int first_bin = 1;
  int last_bin = 3;
  int points_per_bin = 4;
  std::string policy = "reject";

  double R = 2;
  std::vector<double> s_grid{0.2, 0.1, 0.05, 0.025};
  double L = 1;

  std::string output;  // CSV path; stdout when empty
  std::string format = "csv";
  bool require_finite = false;

  bool operator==(const ExperimentConfig&) const = default;

  GridSpec grid() const { return GridSpec{lambda_from, lambda_to, lambda_count, lambda_ratio, true}; }

  MeasureOptions measure_options() const {
    MeasureOptions o;
    o.method = method_from_string(method);
    o.rel_tol = rel_tol;
    o.samples = samples;
    o.seed = seed;
    o.angles = angles;
    o.max_evaluations = max_evaluations;
    return o;
  }

  void validate() const {
    if (dim < 1) throw DomainError("dim must be >= 1");
    if (!(p >= 1) || !std::isfinite(p)) throw DomainError("p must be >= 1");
    if (!std::isfinite(gamma)) throw DomainError("gamma must be finite");
    if (!(rel_tol > 0)) throw DomainError("rel_tol must be > 0");
    if (format != "csv" && format != "json") throw DomainError("format must be csv or json");
    method_from_string(method);
    policy_from_string(policy);
    if (r_min.has_value() != r_max.has_value()) throw DomainError("r_min and r_max go together");
    switch (command) {
      case Command::measure:
        if (!(lambda > 0)) throw DomainError("lambda must be > 0");
        break;
      case Command::lipschitz:
        if (dim != 1) throw DomainError("lipschitz needs dim = 1");
        break;
      case Command::cantor:
        if (!(gamma > -1 && gamma < 0)) throw DomainError("cantor needs gamma in (-1, 0)");
        break;
      case Command::mollified:
        if (gamma != -1) throw DomainError("mollified needs gamma = -1");
        break;
      case Command::series:
        if (!(gamma >= -1 && gamma < 0)) throw DomainError("series needs gamma in [-1, 0)");
        if (dim != 1) throw DomainError("series needs dim = 1");
        break;
      case Command::stopping:
        if (!(gamma < -1)) throw DomainError("stopping needs gamma < -1");
        if (dim != 1) throw DomainError("stopping needs dim = 1");
        break;
      case Command::bv_limit:
        if (gamma == -1) throw DomainError("bv-limit excludes gamma = -1");
        break;
      case Command::bbm:
        if (dim != 1) throw DomainError("bbm needs dim = 1");
        break;
      default: break;
    }
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"command", to_string(c.command)},
                     {"fn", c.fn},
                     {"dim", c.dim},
                     {"p", c.p},
                     {"gamma", c.gamma},
                     {"lambda", c.lambda},
                     {"lambda_from", c.lambda_from},
                     {"lambda_to", c.lambda_to},
                     {"lambda_count", c.lambda_count},
                     {"lambda_ratio", c.lambda_ratio},
                     {"rel_tol", c.rel_tol},
                     {"method", c.method},
                     {"samples", c.samples},
                     {"seed", c.seed},
                     {"angles", c.angles},
                     {"max_evaluations", c.max_evaluations},
                     {"r_min", c.r_min ? nlohmann::json(*c.r_min) : nlohmann::json()},
                     {"r_max", c.r_max ? nlohmann::json(*c.r_max) : nlohmann::json()},
                     {"ms", c.ms},
                     {"m_cap", c.m_cap},
                     {"n_max", c.n_max},
                     {"first_bin", c.first_bin},
                     {"last_bin", c.last_bin},
                     {"points_per_bin", c.points_per_bin},
                     {"policy", c.policy},
                     {"R", c.R},
                     {"s_grid", c.s_grid},
                     {"L", c.L},
                     {"output", c.output},
                     {"format", c.format},
                     {"require_finite", c.require_finite}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(field);
  };
  if (j.contains("command")) c.command = command_from_string(j.at("command").get<std::string>());
  get("fn", c.fn);
  get("dim", c.dim);
  get("p", c.p);
  get("gamma", c.gamma);
  get("lambda", c.lambda);
  get("lambda_from", c.lambda_from);
  get("lambda_to", c.lambda_to);
  get("lambda_count", c.lambda_count);
  get("lambda_ratio", c.lambda_ratio);
  get("rel_tol", c.rel_tol);
  get("method", c.method);
  get("samples", c.samples);
  get("seed", c.seed);
  get("angles", c.angles);
  get("max_evaluations", c.max_evaluations);
  if (j.contains("r_min") && !j.at("r_min").is_null()) c.r_min = j.at("r_min").get<double>();
  if (j.contains("r_max") && !j.at("r_max").is_null()) c.r_max = j.at("r_max").get<double>();
  get("ms", c.ms);
  get("m_cap", c.m_cap);
  get("n_max", c.n_max);
  get("first_bin", c.first_bin);
  get("last_bin", c.last_bin);
  get("points_per_bin", c.points_per_bin);
  get("policy", c.policy);
  get("R", c.R);
  get("s_grid", c.s_grid);
  get("L", c.L);
  get("output", c.output);
  get("format", c.format);
  get("require_finite", c.require_finite);
}

// Accepts a bare config or a sidecar holding one under "config".
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    return (j.contains("config") ? j.at("config") : j).get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double v) {
  if (std::isnan(v)) throw std::runtime_error("NaN reached the output table");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += '\n';
  }
  return out;
}

inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) throw std::runtime_error("NaN reached the output table");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline nlohmann::json table_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>)
              r[t.columns[i]] = json_number(v);
            else
              r[t.columns[i]] = v;
          },
          row[i]);
    }
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Execution

struct RunResult {
  int exit_code = 0;
  std::string error_class;
  std::string message;
  bool partial = false;
  bool infinite = false;
  Table table;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json references = nlohmann::json::array();
  double seconds = 0;
};

namespace detail {

inline nlohmann::json reference(std::string name, double value, std::string source) {
  return {{"name", std::move(name)}, {"value", json_number(value)}, {"source", std::move(source)}};
}

inline void sweep_rows(RunResult& r, const Sweep& s) {
  r.table.columns = {"lambda", "value", "error"};
  for (const auto& pt : s.points) {
    r.table.rows.push_back({pt.lambda, pt.value, pt.error});
    r.infinite = r.infinite || pt.nu.infinite;
  }
  r.results["classification"] = to_string(s.classification);
  r.results["limit_estimate"] = s.limit_estimate ? json_number(*s.limit_estimate) : nlohmann::json();
  r.results["sup_estimate"] = json_number(s.sup_estimate);
  r.results["slope"] = s.slope;
  r.results["spread"] = s.spread;
  r.results["monotone_nu"] = s.monotone_nu;
}

inline void execute_into(const ExperimentConfig& c, RunResult& r) {
  const auto mo = c.measure_options();
  AnalysisOptions ao;
  ao.measure = mo;
  switch (c.command) {
    case Command::kappa: {
      r.table.columns = {"p", "dim", "kappa", "sphere_area"};
      r.table.rows.push_back({c.p, static_cast<long long>(c.dim), kappa(c.p, c.dim), sphere_area(c.dim)});
      return;
    }
    case Command::measure: {
      const auto u = resolve_function(c.fn, c.dim, c.gamma);
      LevelSetQuery q{u, Params(c.dim, c.p, c.gamma), c.lambda};
      if (c.r_min) q.truncation = Annulus{*c.r_min, *c.r_max};
      r.table.columns = {"lambda", "value", "error", "evaluations", "tail_analytic", "method"};
      try {
        const auto est = nu_measure(q, mo);
        r.infinite = est.infinite;
        r.table.rows.push_back({c.lambda, est.value, est.error_bound, static_cast<long long>(est.evaluations),
                                est.tail_analytic, std::string(to_string(est.method))});
        r.results["diagnostics"] = est.diagnostics;
        if (est.seed) r.results["seed"] = *est.seed;
      } catch (const BudgetExceeded& e) {
        r.partial = true;
        r.table.rows.push_back({c.lambda, e.partial_value, e.partial_error, static_cast<long long>(e.evaluations), 0.0,
                                std::string("partial")});
        throw;
      }
      if (u.id == "halfline_step" && c.p == 1 && c.gamma != -1 && !c.r_min)
        r.references.push_back(reference("halfline closed form", halfline_closed_form(c.gamma, c.lambda), "closed form"));
      return;
    }
    case Command::sweep: {
      const auto u = resolve_function(c.fn, c.dim, c.gamma);
      const Params prm(c.dim, c.p, c.gamma);
      sweep_rows(r, sweep(u, prm, c.grid(), ao));
      if (auto lim = predicted_limit(u, prm))
        r.references.push_back(reference("predicted limit", *lim, "kappa(p,N)/|gamma| ||grad u||_p^p"));
      return;
    }
    case Command::weaknorm: {
      const auto u = resolve_function(c.fn, c.dim, c.gamma);
      const Params prm(c.dim, c.p, c.gamma);
      auto g = c.grid();
      const auto w = weak_norm(u, prm, g, ao);
      sweep_rows(r, w.sweep);
      r.results["weak_norm"] = json_number(w.value);
      r.results["lambda_at_sup"] = w.lambda_at_sup;
      if (auto lim = predicted_limit(u, prm))
        r.references.push_back(reference("predicted limit", *lim, "kappa(p,N)/|gamma| ||grad u||_p^p"));
      if (auto gp = u.grad_lp_pow(c.p)) r.references.push_back(reference("grad norm p-th power", *gp, "catalog"));
      return;
    }
    case Command::lipschitz: {
      const auto u = resolve_function(c.fn, c.dim, c.gamma);
      LipschitzOptions lo;
      lo.analysis = ao;
      r.table.columns = {"lambda", "k", "value", "verdict"};
      const auto est = estimate_lipschitz(u, lo);
      for (const auto& pr : est.probes) {
        const char* v = pr.verdict == GrowthProbe::Verdict::finite     ? "finite"
                        : pr.verdict == GrowthProbe::Verdict::infinite ? "infinite"
                                                                       : "inconclusive";
        for (std::size_t i = 0; i < pr.ks.size(); ++i)
          r.table.rows.push_back({pr.lambda, static_cast<long long>(pr.ks[i]), pr.values[i], std::string(v)});
      }
      r.results["lipschitz"] = est.value;
      r.results["lambda_lo"] = est.lambda_lo;
      r.results["lambda_hi"] = est.lambda_hi;
      if (u.lip) r.references.push_back(reference("Lipschitz constant", *u.lip, "catalog"));
      return;
    }
    case Command::cantor: {
      std::vector<int> ms = c.ms;
      if (ms.empty()) ms = {1, 2, 3, 4, 5, 6};
      const auto g = cantor_growth(c.gamma, c.p, ms, c.m_cap, ao);
      r.table.columns = {"m", "value", "error", "floor"};
      for (std::size_t i = 0; i < g.ms.size(); ++i)
        r.table.rows.push_back({static_cast<long long>(g.ms[i]), g.values[i], g.errors[i], g.ms[i] * g.floor_unit});
      r.results["slope"] = g.slope;
      r.results["floor_unit"] = g.floor_unit;
      r.results["rho"] = CantorSpec{c.gamma, 0}.rho();
      r.references.push_back(reference("floor unit", g.floor_unit_exact, "rectangle-pair closed form"));
      return;
    }
    case Command::mollified: {
      std::vector<int> ms = c.ms;
      if (ms.empty()) ms = {2, 3, 4, 5, 6, 7, 8};
      const auto g = mollified_indicator_growth(c.p, ms, 30, ao, c.seed);
      r.table.columns = {"m", "value", "error"};
      for (std::size_t i = 0; i < g.ms.size(); ++i)
        r.table.rows.push_back({static_cast<long long>(g.ms[i]), g.values[i], g.errors[i]});
      r.results["slope"] = g.slope;
      r.results["witness_checked"] = g.witness_checked;
      r.results["witness_inside"] = g.witness_inside;
      return;
    }
    case Command::series: {
      SeriesOptions so;
      so.m_cap = c.m_cap;
      so.policy = policy_from_string(c.policy);
      const auto s = counterexample_series(c.gamma, c.n_max, so);
      const auto d = series_bins(s, c.first_bin, c.last_bin, c.points_per_bin, ao, c.p);
      r.table.columns = {"bin", "lambda", "value"};
      nlohmann::json bins = nlohmann::json::array();
      for (const auto& b : d.bins) {
        for (std::size_t i = 0; i < b.lambdas.size(); ++i)
          r.table.rows.push_back({static_cast<long long>(b.n), b.lambdas[i], b.values[i]});
        bins.push_back({{"n", b.n}, {"lambda_lo", b.lambda_lo}, {"lambda_hi", b.lambda_hi},
                        {"infimum", json_number(b.infimum)}});
      }
      nlohmann::json blocks = nlohmann::json::array();
      for (const auto& b : s.blocks)
        blocks.push_back({{"n", b.n}, {"R", b.R}, {"lambda", b.lambda}, {"m", b.m}, {"m_required", b.m_required},
                          {"schedule_met", b.schedule_met}});
      r.results["bins"] = bins;
      r.results["blocks"] = blocks;
      r.results["bins_increasing"] = d.bins_increasing;
      r.results["classification"] = to_string(d.classification);
      r.results["diagnostics"] = s.diagnostics;
      return;
    }
    case Command::bbm: {
      const auto u = resolve_function(c.fn, c.dim, c.gamma);
      const auto b = bbm_functional(BBMQuery{u, c.p, c.R, c.s_grid}, mo);
      r.table.columns = {"s", "value", "error"};
      for (std::size_t i = 0; i < b.s.size(); ++i) r.table.rows.push_back({b.s[i], b.values[i], b.errors[i]});
      r.results["trend"] = b.trend;
      r.results["scaled_trend"] = kappa(c.p, 1) / c.p * b.trend;
      if (auto gp = u.grad_lp_pow(c.p)) r.references.push_back(reference("grad norm p-th power", *gp, "catalog"));
      return;
    }
    case Command::stopping: {
      const auto u = resolve_function(c.fn, 1, c.gamma);
      const auto [lo, hi] = u.span1();
      auto f = u.f1;
      StoppingInput in{[f](double x) { return std::abs(f(x)); }, lo, hi, u.breaks};
      const auto d = stopping_intervals(in, c.gamma);
      r.table.columns = {"i", "a_i", "residual"};
      for (std::size_t i = 0; i < d.endpoints.size(); ++i)
        r.table.rows.push_back({static_cast<long long>(i), d.endpoints[i], i == 0 ? 0.0 : d.residuals[i - 1]});
      r.results["K"] = d.K;
      return;
    }
    case Command::bv_limit: {
      std::optional<GridSpec> g;
      if (c.lambda_count > 0 || c.lambda_from != ExperimentConfig{}.lambda_from ||
          c.lambda_to != ExperimentConfig{}.lambda_to)
        g = c.grid();
      const auto b = bv_indicator_limit(c.L, c.gamma, g, ao);
      sweep_rows(r, b.sweep);
      r.references.push_back(reference("BV limit", b.bv_prediction, "2/|gamma+1| ||u'||_M"));
      r.references.push_back(reference("Sobolev formula", b.sobolev_prediction, "kappa(1,1)/|gamma| ||u'||_M"));
      return;
    }
  }
}

}  // namespace detail

inline RunResult execute(const ExperimentConfig& c) {
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.validate();
    detail::execute_into(c, r);
    if (c.require_finite && r.infinite) {
      r.exit_code = 4;
      r.error_class = "InfiniteMeasure";
      r.message = "infinite-measure sentinel where a finite value was required";
    }
  } catch (const DomainError& e) {
    r.exit_code = 2, r.error_class = "DomainError", r.message = e.what();
  } catch (const ScheduleOverflow& e) {
    r.exit_code = 2, r.error_class = "ScheduleOverflow", r.message = e.what();
  } catch (const BudgetExceeded& e) {
    r.exit_code = 3, r.error_class = "BudgetExceeded", r.message = e.what(), r.partial = true;
  } catch (const InconclusiveError& e) {
    r.exit_code = 1, r.error_class = "Inconclusive", r.message = e.what();
  } catch (const std::exception& e) {
    r.exit_code = 1, r.error_class = "Error", r.message = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline nlohmann::json versions() {
  return {{"nonlocal", kVersion},
          {"compiler", __VERSION__},
          {"fmt", FMT_VERSION},
          {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                        NLOHMANN_JSON_VERSION_PATCH)},
          {"boost", BOOST_LIB_VERSION}};
}

inline nlohmann::json sidecar(const ExperimentConfig& c, const RunResult& r) {
  nlohmann::json j;
  j["config"] = c;
  j["versions"] = versions();
  j["timings"] = {{"seconds", r.seconds}};
  j["results"] = r.results;
  j["references"] = r.references;
  j["partial"] = r.partial;
  j["exit_code"] = r.exit_code;
  if (!r.error_class.empty()) j["error"] = {{"error_class", r.error_class}, {"message", r.message}};
  return j;
}

// Writes the primary table (CSV, or JSON rows with format = json) to c.output
// or `out`, and the sidecar to c.output + ".json" when an output path is set.
inline int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  auto r = execute(c);
  try {
    std::string body;
    if (c.format == "json") {
      body = table_json(r.table).dump(2) + "\n";
    } else {
      body = to_csv(r.table);
    }
    if (c.output.empty()) {
      if (!r.table.columns.empty()) out << body;
    } else {
      std::ofstream f(c.output);
      if (!f) throw std::runtime_error("cannot open " + c.output);
      f << body;
      std::ofstream s(c.output + ".json");
      if (!s) throw std::runtime_error("cannot open " + c.output + ".json");
      s << sidecar(c, r).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    if (r.exit_code == 0) r.exit_code = 1, r.error_class = "OutputError", r.message = e.what();
  }
  if (r.exit_code != 0) err << nlohmann::json{{"error_class", r.error_class}, {"message", r.message}}.dump() << "\n";
  return r.exit_code;
}

}  // namespace nonlocal

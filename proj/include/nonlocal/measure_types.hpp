#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nonlocal/catalog.hpp"
#include "nonlocal/constants.hpp"
#include "nonlocal/engine1d.hpp"
#include "nonlocal/parallel.hpp"

namespace nonlocal {

enum class Method { automatic, grid1d, rotation2d, montecarlo };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::grid1d: return "grid1d";
    case Method::rotation2d: return "rotation2d";
    case Method::montecarlo: return "montecarlo";
  }
  return "unknown";
}

inline Method method_from_string(std::string_view s) {
  if (s == "auto") return Method::automatic;
  if (s == "grid1d") return Method::grid1d;
  if (s == "rotation2d") return Method::rotation2d;
  if (s == "montecarlo") return Method::montecarlo;
  throw DomainError("unknown method '" + std::string(s) + "'");
}

struct Annulus {
  double r_min = 0;
  double r_max = 0;
};

struct LevelSetQuery {
  TestFunction u;
  Params params{1, 1.0, 1.0};
  double lambda = 1.0;
  std::optional<Annulus> truncation;
  // both points restricted to [lo, hi] (1D only)
  std::optional<std::pair<double, double>> window;

  void validate() const {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw DomainError("LevelSetQuery: lambda must be > 0");
    if (u.dim != params.dim()) throw DomainError("LevelSetQuery: function and params disagree on dim");
    if (truncation) {
      if (!(truncation->r_min > 0)) throw DomainError("LevelSetQuery: truncation needs r_min > 0");
      if (truncation->r_max < truncation->r_min) throw DomainError("LevelSetQuery: truncation needs r_min <= r_max");
    }
    if (window && !(window->second > window->first)) throw DomainError("LevelSetQuery: empty window");
  }
};

struct MeasureOptions {
  Method method = Method::automatic;
  double rel_tol = 1e-4;
  int max_cell_depth = 24;
  double h_floor_rel = 1e-12;
  std::size_t max_evaluations = 20'000'000'000ULL;
  unsigned threads = default_threads();
  // skip shifts where |u(x+h) - u(x)| <= Lip h rules membership out
  bool use_lipschitz_hint = true;
  // rotation method
  int angles = 16;
  bool assume_radial = true;
  // Monte Carlo
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0x5eed;
  std::size_t min_per_stratum = 64;

  ShellOptions shell() const {
    ShellOptions s;
    s.rel_tol = rel_tol;
    s.max_cell_depth = max_cell_depth;
    s.h_floor_rel = h_floor_rel;
    s.max_evaluations = max_evaluations;
    s.threads = threads;
    s.use_lipschitz_hint = use_lipschitz_hint;
    return s;
  }
};

struct MeasureEstimate {
  double value = 0;
  double error_bound = 0;
  Method method = Method::grid1d;
  std::size_t evaluations = 0;
  double tail_analytic = 0;
  bool infinite = false;
  std::optional<std::uint64_t> seed;
  std::string diagnostics;
};

}  // namespace nonlocal

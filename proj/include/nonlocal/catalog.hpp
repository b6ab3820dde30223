#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>
#include <nlohmann/json.hpp>

#include "nonlocal/constants.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

enum class SupportKind {
  compact,           // u = 0 outside the box
  gradient_compact,  // only grad u is supported in the box (1D plateaus outside)
};

struct TestFunction {
  std::string id;
  int dim = 1;

  std::function<double(double)> f1;   // dim == 1
  std::function<double(double)> df1;  // dim == 1; empty where u is not C^1
  std::function<double(std::span<const double>)> fn;  // dim >= 2
  std::function<void(std::span<const double>, std::span<double>)> dfn;

  SupportKind support_kind = SupportKind::compact;
  Box support;
  double left_value = 0;   // 1D plateau left of the support
  double right_value = 0;  // 1D plateau right of the support

  std::vector<double> breaks;  // 1D: sorted points where the formula changes
  std::vector<double> kinks;   // 1D: jumps of u or of u'
  bool radial = false;
  std::vector<double> center;
  std::vector<double> radial_breaks;
  double resolution = 1.0 / 256;  // maximum cell width for level-set scans

  double sup_norm = 0;
  double oscillation = 0;             // sup u - inf u
  std::optional<double> grad_l1;      // ||grad u||_1
  std::optional<double> grad_bv;      // ||Du||_M
  std::optional<double> lip;          // ||grad u||_inf
  std::optional<double> lip_bound;    // any upper bound for ||grad u||_inf
  std::function<double(double)> grad_lp;  // p -> ||grad u||_p
  nlohmann::json parameters = nlohmann::json::object();

  double operator()(double x) const { return f1(x); }
  double operator()(std::span<const double> x) const { return dim == 1 ? f1(x[0]) : fn(x); }

  bool has_grad() const { return dim == 1 ? static_cast<bool>(df1) : static_cast<bool>(dfn); }
  std::optional<double> grad_lp_pow(double p) const {
    if (!grad_lp) return std::nullopt;
    return std::pow(grad_lp(p), p);
  }
  std::optional<double> lipschitz_bound() const { return lip_bound ? lip_bound : lip; }

  // Gradient support in 1D, i.e. the interval [a, c] outside of which u is constant.
  std::pair<double, double> span1() const { return {support.lo.at(0), support.hi.at(0)}; }

  nlohmann::json descriptor() const {
    nlohmann::json j;
    j["id"] = id;
    j["dim"] = dim;
    j["parameters"] = parameters;
    j["support"] = {{"lo", support.lo},
                    {"hi", support.hi},
                    {"kind", support_kind == SupportKind::compact ? "compact" : "gradient_compact"}};
    j["sup_norm"] = sup_norm;
    j["grad_l1"] = grad_l1 ? nlohmann::json(*grad_l1) : nlohmann::json();
    j["grad_bv"] = grad_bv ? nlohmann::json(*grad_bv) : nlohmann::json();
    j["lip"] = lip ? nlohmann::json(*lip) : nlohmann::json();
    if (grad_lp) j["grad_l2"] = grad_lp(2.0);
    return j;
  }
};

namespace detail {

// C-infinity transition from 0 (t <= 0) to 1 (t >= 1); its derivative is a
// normalized bump on (0, 1), symmetric about 1/2.
inline double smooth_step(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
}

inline double smooth_step_deriv(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  const double s = smooth_step(t);
  return s * (1.0 - s) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
}

inline double smooth_step_deriv_max() {
  static const double v = [] {
    auto r = boost::math::tools::brent_find_minima([](double t) { return -smooth_step_deriv(t); }, 0.05,
                                                   0.95, 52);
    return -r.second;
  }();
  return v;
}

// 1D cutoff: 1 on [-1/2, 3/2], 0 outside (-1, 2).
inline double cutoff(double s) {
  if (s <= -1 || s >= 2) return 0.0;
  if (s < -0.5) return smooth_step(2 * (s + 1));
  if (s <= 1.5) return 1.0;
  return 1.0 - smooth_step(2 * (s - 1.5));
}

inline double cutoff_deriv(double s) {
  if (s <= -1 || s >= 2) return 0.0;
  if (s < -0.5) return 2 * smooth_step_deriv(2 * (s + 1));
  if (s <= 1.5) return 0.0;
  return -2 * smooth_step_deriv(2 * (s - 1.5));
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// ||u'||_p by adaptive quadrature over the breakpoints of a 1D entry.
inline double quadrature_grad_norm_1d(const std::function<double(double)>& df, const std::vector<double>& pts,
                                      double p) {
  auto g = [&](double x) { return std::pow(std::abs(df(x)), p); };
  const auto r = quad::adaptive_gauss_pieces(g, pts, 1e-13, 40);
  return std::pow(r.value, 1.0 / p);
}


inline double norm2(std::span<const double> x, std::span<const double> c) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - (c.empty() ? 0.0 : c[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

inline Box cube(int dim, double lo, double hi) {
  return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standard entries

inline TestFunction make_tent(double scale = 1.0, std::string id = "tent") {
  TestFunction u;
  u.id = std::move(id);
  u.f1 = [scale](double x) { return scale * std::max(0.0, std::min(x, 1.0 - x)); };
  u.df1 = [scale](double x) {
    if (x <= 0 || x >= 1) return 0.0;
    return x < 0.5 ? scale : -scale;
  };
  u.support = Box{{0.0}, {1.0}};
  u.breaks = {0.0, 0.5, 1.0};
  u.kinks = u.breaks;
  const double c = std::abs(scale);
  u.sup_norm = 0.5 * c;
  u.oscillation = 0.5 * c;
  u.grad_l1 = c;
  u.grad_bv = c;
  u.lip = c;
  u.grad_lp = [c](double) { return c; };
  return u;
}

inline TestFunction make_smooth_bump(int dim) {
  if (dim < 1) throw DomainError("smooth_bump: dim must be >= 1");
  auto phi = [](double r) { return r >= 1 ? 0.0 : std::exp(-1.0 / (1.0 - r * r)); };
  auto dphi = [phi](double r) {
    if (r >= 1) return 0.0;
    const double q = 1.0 - r * r;
    return -2.0 * r * phi(r) / (q * q);
  };
  TestFunction u;
  u.id = "smooth_bump";
  u.dim = dim;
  u.support = detail::cube(dim, -1.0, 1.0);
  u.sup_norm = std::exp(-1.0);
  u.oscillation = u.sup_norm;
  u.radial = true;
  u.center = std::vector<double>(dim, 0.0);
  u.radial_breaks = {1.0};
  const double lip = -boost::math::tools::brent_find_minima([&](double r) { return dphi(r); }, 0.0, 1.0, 52).second;
  u.lip = lip;
  if (dim == 1) {
    u.f1 = [phi](double x) { return phi(std::abs(x)); };
    u.df1 = [dphi](double x) { return x < 0 ? -dphi(-x) : dphi(x); };
    u.breaks = {-1.0, 0.0, 1.0};
    u.grad_l1 = 2.0 * std::exp(-1.0);
    u.grad_bv = u.grad_l1;
    const auto df = u.df1;
    u.grad_lp = [df](double p) { return detail::quadrature_grad_norm_1d(df, {-1.0, 0.0, 1.0}, p); };
  } else {
    u.fn = [phi](std::span<const double> x) { return phi(detail::norm2(x, {})); };
    u.dfn = [dphi](std::span<const double> x, std::span<double> g) {
      const double r = detail::norm2(x, {});
      const double d = r > 0 ? dphi(r) / r : 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = d * x[i];
    };
    const double sig = sphere_area(dim);
    auto radial_norm = [dphi, sig, dim](double p) {
      auto g = [&](double r) { return std::pow(std::abs(dphi(r)), p) * std::pow(r, dim - 1); };
      return std::pow(sig * quad::adaptive_gauss(g, 0.0, 1.0, 1e-14, 40).value, 1.0 / p);
    };
    u.grad_l1 = radial_norm(1.0);
    u.grad_bv = u.grad_l1;
    u.grad_lp = radial_norm;
  }
  return u;
}

inline TestFunction make_halfline_step() {
  TestFunction u;
  u.id = "halfline_step";
  u.f1 = [](double x) { return x >= 0 ? 1.0 : 0.0; };
  u.support_kind = SupportKind::gradient_compact;
  u.support = Box{{0.0}, {0.0}};
  u.left_value = 0.0;
  u.right_value = 1.0;
  u.breaks = {0.0};
  u.kinks = {0.0};
  u.sup_norm = 1.0;
  u.oscillation = 1.0;
  u.grad_bv = 1.0;
  return u;
}

inline TestFunction make_interval_indicator(double length) {
  if (!(length > 0)) throw DomainError("interval_indicator: L must be > 0");
  TestFunction u;
  u.id = "interval_indicator";
  u.parameters = {{"L", length}};
  u.f1 = [length](double x) { return (x >= 0 && x <= length) ? 1.0 : 0.0; };
  u.support = Box{{0.0}, {length}};
  u.breaks = {0.0, length};
  u.kinks = u.breaks;
  u.resolution = length / 256;
  u.sup_norm = 1.0;
  u.oscillation = 1.0;
  u.grad_bv = 2.0;
  return u;
}

inline TestFunction make_linear_ramp(double c) {
  auto u = make_tent(c, "linear_ramp");
  u.parameters = {{"c", c}};
  return u;
}

inline TestFunction make_ball_indicator(double r, int dim) {
  if (!(r > 0)) throw DomainError("ball_indicator: r must be > 0");
  if (dim < 1) throw DomainError("ball_indicator: dim must be >= 1");
  TestFunction u;
  u.id = "ball_indicator";
  u.dim = dim;
  u.parameters = {{"r", r}};
  u.support = detail::cube(dim, -r, r);
  u.sup_norm = 1.0;
  u.oscillation = 1.0;
  u.grad_bv = sphere_area(dim) * std::pow(r, dim - 1);
  u.radial = true;
  u.center = std::vector<double>(dim, 0.0);
  u.radial_breaks = {r};
  u.resolution = r / 128;
  if (dim == 1) {
    u.f1 = [r](double x) { return std::abs(x) <= r ? 1.0 : 0.0; };
    u.breaks = {-r, r};
    u.kinks = u.breaks;
  } else {
    u.fn = [r](std::span<const double> x) { return detail::norm2(x, {}) <= r ? 1.0 : 0.0; };
  }
  return u;
}

inline TestFunction make_constant(double value, int dim = 1) {
  TestFunction u;
  u.id = "constant";
  u.dim = dim;
  u.parameters = {{"c", value}};
  u.support_kind = SupportKind::gradient_compact;
  u.support = detail::cube(dim, 0.0, 0.0);
  u.left_value = value;
  u.right_value = value;
  u.breaks = {0.0};
  u.sup_norm = std::abs(value);
  u.oscillation = 0.0;
  u.grad_l1 = 0.0;
  u.grad_bv = 0.0;
  u.lip = 0.0;
  u.grad_lp = [](double) { return 0.0; };
  if (dim == 1) {
    u.f1 = [value](double) { return value; };
    u.df1 = [](double) { return 0.0; };
  } else {
    u.fn = [value](std::span<const double>) { return value; };
    u.dfn = [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); };
  }
  return u;
}

// Parses "name" or "name(arg)"; the argument defaults to 1.
inline TestFunction make_standard(std::string_view spec, int dim = 1) {
  std::string name(spec);
  std::optional<double> arg;
  if (const auto open = name.find('('); open != std::string::npos) {
    const auto close = name.find(')', open);
    if (close == std::string::npos) throw DomainError("make_standard: malformed id '" + name + "'");
    try {
      arg = std::stod(name.substr(open + 1, close - open - 1));
    } catch (const std::exception&) {
      throw DomainError("make_standard: bad argument in '" + name + "'");
    }
    name = name.substr(0, open);
  }
  auto need_1d = [&] {
    if (dim != 1) throw DomainError("make_standard: '" + name + "' is one-dimensional");
  };
  if (name == "tent") return need_1d(), make_tent();
  if (name == "smooth_bump") return make_smooth_bump(dim);
  if (name == "halfline_step") return need_1d(), make_halfline_step();
  if (name == "interval_indicator") return need_1d(), make_interval_indicator(arg.value_or(1.0));
  if (name == "linear_ramp") return need_1d(), make_linear_ramp(arg.value_or(1.0));
  if (name == "ball_indicator") return make_ball_indicator(arg.value_or(1.0), dim);
  if (name == "constant") return make_constant(arg.value_or(1.0), dim);
  throw DomainError("make_standard: unknown id '" + name + "'");
}

// ---------------------------------------------------------------------------
// Cantor-type functions

struct CantorSpec {
  double gamma = -0.5;
  int m = 0;

  double rho() const { return std::exp2(-1.0 / (1.0 + gamma)); }
  void validate() const {
    if (!(gamma > -1.0 && gamma < 0.0)) throw DomainError("CantorSpec: gamma must lie in (-1, 0)");
    if (m < 0) throw DomainError("CantorSpec: m must be >= 0");
  }
};

inline double cantor_g0(double rho, double x) { return detail::smooth_step((x - rho) / (1.0 - 2.0 * rho)); }

inline double cantor_g(const CantorSpec& spec, double x) {
  const double rho = spec.rho();
  double value = 0, weight = 1;
  for (int level = spec.m; level > 0; --level) {
    if (x <= 0) return value;
    if (x >= 1) return value + weight;
    weight *= 0.5;
    if (x <= rho) {
      x /= rho;
    } else if (x >= 1 - rho) {
      value += weight;
      x = 1.0 - (1.0 - x) / rho;
    } else {
      return value + weight;
    }
  }
  return value + weight * cantor_g0(rho, x);
}

inline double cantor_g_deriv(const CantorSpec& spec, double x) {
  const double rho = spec.rho();
  double scale = 1;
  for (int level = spec.m; level > 0; --level) {
    if (x <= 0 || x >= 1) return 0.0;
    scale *= 0.5 / rho;
    if (x <= rho) {
      x /= rho;
    } else if (x >= 1 - rho) {
      x = 1.0 - (1.0 - x) / rho;
    } else {
      return 0.0;
    }
  }
  return scale * detail::smooth_step_deriv((x - rho) / (1.0 - 2.0 * rho)) / (1.0 - 2.0 * rho);
}

// Endpoints of the 2^m transition intervals of g_m, sorted.
inline std::vector<double> cantor_transition_points(const CantorSpec& spec) {
  const double rho = spec.rho();
  std::vector<std::pair<double, double>> iv{{rho, 1.0 - rho}};
  for (int k = 0; k < spec.m; ++k) {
    std::vector<std::pair<double, double>> next;
    next.reserve(2 * iv.size());
    for (auto [a, c] : iv) next.emplace_back(rho * a, rho * c);
    for (auto [a, c] : iv) next.emplace_back(1.0 - rho + rho * a, 1.0 - rho + rho * c);
    iv = std::move(next);
  }
  std::vector<double> pts;
  pts.reserve(2 * iv.size());
  for (auto [a, c] : iv) {
    pts.push_back(a);
    pts.push_back(c);
  }
  return detail::sorted_unique(std::move(pts));
}

inline double cantor_g_deriv_max(const CantorSpec& spec) {
  const double rho = spec.rho();
  return std::pow(2.0 * rho, -spec.m) * detail::smooth_step_deriv_max() / (1.0 - 2.0 * rho);
}

// g_m as a catalog entry (plateaus 0 and 1 outside [0, 1]).
// int |g_m'|^p = (2 rho)^((1-p) m) int |g_0'|^p by self-similarity.
inline double cantor_grad_lp_pow(const CantorSpec& spec, double p) {
  const double rho = spec.rho();
  auto g = [rho, p](double x) {
    return std::pow(detail::smooth_step_deriv((x - rho) / (1.0 - 2.0 * rho)) / (1.0 - 2.0 * rho), p);
  };
  const double base = quad::adaptive_gauss(g, rho, 1.0 - rho, 1e-14).value;
  return std::pow(2.0 * rho, (1.0 - p) * spec.m) * base;
}

inline TestFunction make_cantor_function(const CantorSpec& spec) {
  spec.validate();
  TestFunction u;
  u.id = "cantor_g";
  u.parameters = {{"gamma", spec.gamma}, {"m", spec.m}};
  u.f1 = [spec](double x) { return cantor_g(spec, x); };
  u.df1 = [spec](double x) { return cantor_g_deriv(spec, x); };
  u.support_kind = SupportKind::gradient_compact;
  u.support = Box{{0.0}, {1.0}};
  u.left_value = 0.0;
  u.right_value = 1.0;
  auto pts = cantor_transition_points(spec);
  pts.push_back(0.0);
  pts.push_back(1.0);
  u.breaks = detail::sorted_unique(std::move(pts));
  u.resolution = 1.0 / 512;
  u.sup_norm = 1.0;
  u.oscillation = 1.0;
  u.grad_l1 = 1.0;
  u.grad_bv = 1.0;
  u.lip = cantor_g_deriv_max(spec);
  u.grad_lp = [spec](double p) { return std::pow(cantor_grad_lp_pow(spec, p), 1.0 / p); };
  return u;
}

// u_m(x) = 16 g_m(x_1) eta(x); the shifted variant is f_m(x) = u_m(x_1 - 2, x').
inline double cantor_block(const CantorSpec& spec, std::span<const double> x, bool shifted = false) {
  const double x1 = shifted ? x[0] - 2.0 : x[0];
  double v = 16.0 * cantor_g(spec, x1) * detail::cutoff(x1);
  for (std::size_t i = 1; i < x.size() && v != 0.0; ++i) v *= detail::cutoff(x[i]);
  return v;
}

inline double cantor_block_deriv_1d(const CantorSpec& spec, double x1) {
  return 16.0 * (cantor_g_deriv(spec, x1) * detail::cutoff(x1) + cantor_g(spec, x1) * detail::cutoff_deriv(x1));
}

inline std::vector<double> cantor_block_breaks(const CantorSpec& spec) {
  auto pts = cantor_transition_points(spec);
  for (double t : {-1.0, -0.5, 0.0, 1.0, 1.5, 2.0}) pts.push_back(t);
  return detail::sorted_unique(std::move(pts));
}

inline TestFunction make_cantor_block(const CantorSpec& spec, int dim = 1, bool shifted = false) {
  spec.validate();
  if (dim < 1) throw DomainError("cantor_block: dim must be >= 1");
  TestFunction u;
  u.id = shifted ? "cantor_block_shifted" : "cantor_block";
  u.dim = dim;
  u.parameters = {{"gamma", spec.gamma}, {"m", spec.m}};
  const double off = shifted ? 2.0 : 0.0;
  u.support = detail::cube(dim, -1.0, 2.0);
  u.support.lo[0] += off;
  u.support.hi[0] += off;
  u.sup_norm = 16.0;
  u.oscillation = 16.0;
  u.resolution = 3.0 / 768;
  auto br = cantor_block_breaks(spec);
  const double df_bound = 16.0 * (cantor_g_deriv_max(spec) + 2.0 * detail::smooth_step_deriv_max());
  if (dim == 1) {
    u.f1 = [spec, off](double x) { return 16.0 * cantor_g(spec, x - off) * detail::cutoff(x - off); };
    u.df1 = [spec, off](double x) { return cantor_block_deriv_1d(spec, x - off); };
    for (double& t : br) t += off;
    u.breaks = br;
    u.kinks = {};
    // on [0, 1] the cutoff is 1; on [3/2, 2] g_m is 1
    u.grad_lp = [spec](double p) {
      auto cut = [p](double x) { return std::pow(std::abs(detail::cutoff_deriv(x)), p); };
      const double tail = quad::adaptive_gauss(cut, 1.5, 2.0, 1e-14).value;
      return 16.0 * std::pow(cantor_grad_lp_pow(spec, p) + tail, 1.0 / p);
    };
    u.grad_l1 = u.grad_lp(1.0);
    u.grad_bv = u.grad_l1;
    u.lip_bound = df_bound;
  } else {
    u.fn = [spec, shifted](std::span<const double> x) { return cantor_block(spec, x, shifted); };
    u.lip_bound = df_bound * std::sqrt(static_cast<double>(dim));
  }
  return u;
}

// ---------------------------------------------------------------------------
// Mollified indicator v_m = 1_{B_1} * eta_{2^-m}, mollifier mass 2.

namespace detail {

// Radial profile of the mollifier on |t| < 1 (1D mass is 2).
inline double mollifier_1d(double t) { return smooth_step_deriv(0.5 * (t + 1.0)); }
inline double mollifier_primitive_1d(double t) { return 2.0 * smooth_step(0.5 * (t + 1.0)); }

// Monotone piecewise cubic on a uniform grid.
struct Pchip {
  double x0 = 0, dx = 1;
  std::vector<double> y, d;

  Pchip() = default;
  Pchip(double x0_, double dx_, std::vector<double> y_) : x0(x0_), dx(dx_), y(std::move(y_)) {
    const std::size_t n = y.size();
    d.assign(n, 0.0);
    std::vector<double> s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) s[i] = (y[i + 1] - y[i]) / dx;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (s[i - 1] * s[i] > 0) d[i] = 2.0 / (1.0 / s[i - 1] + 1.0 / s[i]);
    }
    d[0] = s.front();
    d[n - 1] = s.back();
  }

  double operator()(double x, double* deriv = nullptr) const {
    const double t = (x - x0) / dx;
    const std::size_t n = y.size();
    std::size_t i = t <= 0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(t), n - 2);
    const double u = std::clamp(t - static_cast<double>(i), 0.0, 1.0);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    if (deriv) {
      const double g00 = 6 * u * u - 6 * u, g10 = 3 * u * u - 4 * u + 1, g01 = -g00, g11 = 3 * u * u - 2 * u;
      *deriv = (g00 * y[i] + g10 * dx * d[i] + g01 * y[i + 1] + g11 * dx * d[i + 1]) / dx;
    }
    return h00 * y[i] + h10 * dx * d[i] + h01 * y[i + 1] + h11 * dx * d[i + 1];
  }
};

// Radial profile of v_m in dimension N >= 2, tabulated across the collar.
inline Pchip mollified_radial_table(int m, int dim, std::size_t n = 4097) {
  const double eps = std::ldexp(1.0, -m);
  const double sig = sphere_area(dim);
  auto prof = [](double r) { return smooth_step_deriv(0.5 * (r + 1.0)); };
  const double mass =
      sig * quad::adaptive_gauss([&](double r) { return prof(r) * std::pow(r, dim - 1); }, 0.0, 1.0, 1e-15, 40).value;
  const double cn = 2.0 / mass;
  // fraction of S^{N-1} with omega_1 < c
  auto cap = [dim](double c) {
    if (c >= 1) return 1.0;
    if (c <= -1) return 0.0;
    const double a = 0.5 * (dim - 1);
    return boost::math::ibeta(a, a, 0.5 * (1.0 + c));
  };
  auto value = [&](double r) {
    auto integrand = [&](double s) {
      if (s <= 0) return 0.0;
      const double c0 = (1.0 - r * r - s * s) / (2.0 * r * s);
      return cn * prof(s / eps) / std::pow(eps, dim) * std::pow(s, dim - 1) * cap(c0);
    };
    std::vector<double> pts{0.0, eps};
    if (std::abs(1.0 - r) < eps && std::abs(1.0 - r) > 0) pts = {0.0, std::abs(1.0 - r), eps};
    return sig * quad::adaptive_gauss_pieces(integrand, pts, 1e-13, 30).value;
  };
  const double x0 = 1.0 - eps, dx = 2.0 * eps / static_cast<double>(n - 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = value(x0 + dx * static_cast<double>(i));
  y.front() = 2.0;
  y.back() = 0.0;
  return Pchip(x0, dx, std::move(y));
}

}  // namespace detail

inline TestFunction mollified_indicator(int m, int dim = 1) {
  if (m < 1) throw DomainError("mollified_indicator: m must be >= 1");
  if (dim < 1) throw DomainError("mollified_indicator: dim must be >= 1");
  const double eps = std::ldexp(1.0, -m);
  const double scale = std::ldexp(1.0, m);
  TestFunction u;
  u.id = "mollified_indicator";
  u.dim = dim;
  u.parameters = {{"m", m}};
  u.support = detail::cube(dim, -1.0 - eps, 1.0 + eps);
  u.sup_norm = 2.0;
  u.oscillation = 2.0;
  u.radial = true;
  u.center = std::vector<double>(dim, 0.0);
  u.radial_breaks = {1.0 - eps, 1.0 + eps};
  u.resolution = 1.0 / 128;
  if (dim == 1) {
    u.f1 = [scale](double x) {
      return detail::mollifier_primitive_1d(scale * (x + 1.0)) - detail::mollifier_primitive_1d(scale * (x - 1.0));
    };
    u.df1 = [scale](double x) {
      return scale * (detail::mollifier_1d(scale * (x + 1.0)) - detail::mollifier_1d(scale * (x - 1.0)));
    };
    u.breaks = {-1.0 - eps, -1.0 + eps, 1.0 - eps, 1.0 + eps};
    u.grad_l1 = 4.0;
    u.grad_bv = 4.0;
    u.lip = scale * detail::smooth_step_deriv_max();
    const auto df = u.df1;
    const auto br = u.breaks;
    u.grad_lp = [df, br](double p) { return detail::quadrature_grad_norm_1d(df, br, p); };
  } else {
    auto table = std::make_shared<detail::Pchip>(detail::mollified_radial_table(m, dim));
    auto radial = [table, eps](double r, double* d) {
      if (r <= 1.0 - eps) {
        if (d) *d = 0.0;
        return 2.0;
      }
      if (r >= 1.0 + eps) {
        if (d) *d = 0.0;
        return 0.0;
      }
      return (*table)(r, d);
    };
    u.fn = [radial](std::span<const double> x) { return radial(detail::norm2(x, {}), nullptr); };
    u.dfn = [radial](std::span<const double> x, std::span<double> g) {
      const double r = detail::norm2(x, {});
      double d = 0;
      radial(r, &d);
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = r > 0 ? d * x[i] / r : 0.0;
    };
    const double sig = sphere_area(dim);
    auto tv = [table, sig, dim](double r) {
      double d = 0;
      (*table)(r, &d);
      return sig * std::abs(d) * std::pow(r, dim - 1);
    };
    u.grad_l1 = quad::adaptive_gauss(tv, 1.0 - eps, 1.0 + eps, 1e-12, 30).value;
    u.grad_bv = u.grad_l1;
    u.lip_bound = 2.0 * scale * detail::smooth_step_deriv_max();
  }
  return u;
}

// ---------------------------------------------------------------------------
// Truncated counterexample series

struct SeriesBlock {
  int n = 0;
  double R = 0;
  double lambda = 0;
  double amplitude = 0;
  long long m_required = 0;
  int m = 0;
  bool schedule_met = true;
};

// reject: throw; clamp: cap every offending block; proportional: scale the whole
// schedule so the largest block sits at the cap (keeps m(n+1)/m(n)).
enum class OverflowPolicy { reject, clamp, proportional };

struct SeriesOptions {
  int dim = 1;
  int m_cap = 14;  // 2^14 Cantor intervals
  OverflowPolicy policy = OverflowPolicy::reject;
  std::function<double(double)> decay = [](double) { return 1.0; };
};

struct Series {
  TestFunction function;
  double gamma = 0;
  std::vector<SeriesBlock> blocks;
  double lambda_next = 0;  // lambda_{n_max + 1}
  std::vector<std::string> diagnostics;
};

class ScheduleOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Series counterexample_series(double gamma, int n_max, const SeriesOptions& opt = {}) {
  if (!(gamma >= -1.0 && gamma < 0.0)) throw DomainError("counterexample_series: gamma must lie in [-1, 0)");
  if (n_max < 2) throw DomainError("counterexample_series: n_max must be >= 2");
  if (opt.dim != 1) throw DomainError("counterexample_series: only dim = 1 is evaluated");
  const int N = opt.dim;
  const bool mollified = gamma == -1.0;
  auto R = [](int n) { return std::ldexp(1.0, 2 * n); };
  auto lam = [&](int n) {
    const double w = opt.decay(R(n + 1));
    return mollified ? std::pow(R(n), -(N - 1.0)) * w : std::pow(R(n), -(N + gamma)) * w;
  };

  Series s;
  s.gamma = gamma;
  double scale = 1.0;
  if (opt.policy == OverflowPolicy::proportional) {
    double need_max = 0;
    for (int n = 2; n <= n_max; ++n) need_max = std::max(need_max, 4.0 * (lam(n) / lam(n + 1)) / opt.decay(R(n + 1)) * n * n * n);
    if (need_max > opt.m_cap) scale = opt.m_cap / need_max;
  }
  for (int n = 2; n <= n_max; ++n) {
    SeriesBlock b;
    b.n = n;
    b.R = R(n);
    b.lambda = lam(n);
    const double w = opt.decay(R(n + 1));
    b.amplitude = w / (std::pow(b.R, N - 1.0) * n * n);
    const double need = 4.0 * (lam(n) / lam(n + 1)) / w * n * n * n;
    b.m_required = static_cast<long long>(std::ceil(need - 1e-9));
    if (b.m_required > opt.m_cap) {
      const std::string msg = "block n=" + std::to_string(n) + " needs m=" + std::to_string(b.m_required) +
                              " above cap " + std::to_string(opt.m_cap);
      if (opt.policy == OverflowPolicy::reject) throw ScheduleOverflow(msg);
      b.schedule_met = false;
      if (opt.policy == OverflowPolicy::clamp) {
        s.diagnostics.push_back(msg + "; clamped");
        b.m = opt.m_cap;
      } else {
        b.m = std::max(1, static_cast<int>(std::lround(need * scale)));
        s.diagnostics.push_back(msg + "; scaled to m=" + std::to_string(b.m));
      }
    } else {
      b.m = static_cast<int>(b.m_required);
    }
    s.blocks.push_back(b);
  }
  s.lambda_next = lam(n_max + 1);

  // unit-scale profiles
  std::vector<TestFunction> unit;
  for (const auto& b : s.blocks) {
    unit.push_back(mollified ? mollified_indicator(b.m, 1) : make_cantor_block(CantorSpec{gamma, b.m}, 1, true));
  }

  TestFunction& u = s.function;
  u.id = "counterexample_series";
  u.parameters = {{"gamma", gamma}, {"n_max", n_max}};
  const auto blocks = s.blocks;
  std::vector<std::function<double(double)>> f, df;
  for (const auto& t : unit) {
    f.push_back(t.f1);
    df.push_back(t.df1);
  }
  if (mollified) {
    u.f1 = [blocks, f](double x) {
      double v = 0;
      for (std::size_t i = 0; i < blocks.size(); ++i) v += blocks[i].amplitude * f[i](x / blocks[i].R);
      return v;
    };
    u.df1 = [blocks, df](double x) {
      double v = 0;
      for (std::size_t i = 0; i < blocks.size(); ++i)
        v += blocks[i].amplitude / blocks[i].R * df[i](x / blocks[i].R);
      return v;
    };
  } else {
    // disjoint supports [R_n, 4 R_n]
    u.f1 = [blocks, f](double x) {
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (x > blocks[i].R && x < 4 * blocks[i].R) return blocks[i].amplitude * f[i](x / blocks[i].R);
      }
      return 0.0;
    };
    u.df1 = [blocks, df](double x) {
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (x > blocks[i].R && x < 4 * blocks[i].R)
          return blocks[i].amplitude / blocks[i].R * df[i](x / blocks[i].R);
      }
      return 0.0;
    };
  }
  std::vector<double> br;
  double lo = 1e300, hi = -1e300, sup = 0, lipb = 0, l1 = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    for (double t : unit[i].breaks) br.push_back(t * b.R);
    lo = std::min(lo, unit[i].support.lo[0] * b.R);
    hi = std::max(hi, unit[i].support.hi[0] * b.R);
    sup = mollified ? sup + b.amplitude * unit[i].sup_norm : std::max(sup, b.amplitude * unit[i].sup_norm);
    const double lb = *unit[i].lipschitz_bound() * b.amplitude / b.R;
    lipb = mollified ? lipb + lb : std::max(lipb, lb);
    l1 += b.amplitude * *unit[i].grad_l1;
  }
  u.breaks = detail::sorted_unique(std::move(br));
  u.support = Box{{lo}, {hi}};
  u.resolution = blocks.front().R / 256;
  u.sup_norm = sup;
  u.oscillation = sup;
  u.lip_bound = lipb * 1.01;
  if (!mollified) {
    u.grad_l1 = l1;
    u.grad_bv = l1;
  }
  return s;
}

}  // namespace nonlocal

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "nonlocal/engine1d.hpp"
#include "nonlocal/measure_types.hpp"

namespace nonlocal {

namespace detail {

struct Frame2d {
  std::array<double, 2> center{};
  double radius = 0;
  std::vector<double> radial_breaks;  // relative to center, empty if not radial
};

inline Frame2d frame_of(const TestFunction& u) {
  Frame2d fr;
  if (u.radial) {
    fr.center = {u.center.at(0), u.center.at(1)};
    fr.radial_breaks = u.radial_breaks;
    fr.radius = *std::max_element(u.radial_breaks.begin(), u.radial_breaks.end());
  } else {
    fr.center = {0.5 * (u.support.lo[0] + u.support.hi[0]), 0.5 * (u.support.lo[1] + u.support.hi[1])};
    fr.radius = 0.5 * std::hypot(u.support.hi[0] - u.support.lo[0], u.support.hi[1] - u.support.lo[1]);
  }
  return fr;
}

// The line {center + s n + t w}, w = (cos th, sin th), n = (-sin th, cos th).
inline Profile1d line_profile(const TestFunction& u, const Frame2d& fr, double theta, double s, bool lip_hint) {
  const double cw = std::cos(theta), sw = std::sin(theta);
  const double px = fr.center[0] - s * sw, py = fr.center[1] + s * cw;
  Profile1d P;
  auto fn = u.fn;
  P.f = [fn, px, py, cw, sw](double t) {
    const std::array<double, 2> x{px + t * cw, py + t * sw};
    return fn(std::span<const double>(x));
  };
  const double half = std::sqrt(std::max(0.0, fr.radius * fr.radius - s * s));
  P.a = -half;
  P.c = half;
  P.breaks = {-half, half};
  for (double r : fr.radial_breaks) {
    if (r > std::abs(s)) {
      const double t = std::sqrt(r * r - s * s);
      P.breaks.push_back(-t);
      P.breaks.push_back(t);
    }
  }
  P.breaks = sorted_unique(std::move(P.breaks));
  P.resolution = u.resolution;
  P.oscillation = u.oscillation;
  if (auto l = u.lipschitz_bound(); l && lip_hint) P.lip_bound = *l * (1.0 + 1e-9);
  return P;
}

}  // namespace detail

// 1D measure of one line slice (used by the rotation method and its tests).
inline ShellResult rotation_slice(const LevelSetQuery& q, const MeasureOptions& opt, double theta, double s) {
  const auto fr = detail::frame_of(q.u);
  auto so = opt.shell();
  so.threads = 1;
  ShellIntegrator si(detail::line_profile(q.u, fr, theta, s, opt.use_lipschitz_hint),
                     ShellIntegrand{ShellIntegrand::Kind::indicator, q.params.gamma(), q.lambda, q.params.e(), 1.0},
                     so);
  if (q.truncation) si.set_annulus(q.truncation->r_min, q.truncation->r_max);
  return si.run();
}

// nu = int_0^pi dtheta int ds nu_1(slice); offsets mapped by s = s0 + (s1-s0)(1-cos(pi tau))/2
// on each piece between radial breaks so the square-root endpoint behaviour is smoothed.
inline MeasureEstimate rotation2d(const LevelSetQuery& q, const MeasureOptions& opt) {
  if (q.u.dim != 2) throw DomainError("rotation2d: dim must be 2");
  if (q.u.support_kind != SupportKind::compact) throw DomainError("rotation2d: compact support required");
  if (q.window) throw DomainError("rotation2d: windows are one-dimensional");
  MeasureEstimate est;
  est.method = Method::rotation2d;
  if (q.u.oscillation == 0) return est;

  const auto fr = detail::frame_of(q.u);
  std::vector<double> cuts{-fr.radius, fr.radius, 0.0};
  for (double r : fr.radial_breaks) {
    if (r < fr.radius) {
      cuts.push_back(r);
      cuts.push_back(-r);
    }
  }
  cuts = detail::sorted_unique(std::move(cuts));

  const bool radial = q.u.radial && opt.assume_radial;
  const int n_theta = radial ? 1 : std::max(2, opt.angles);

  // nodes: (theta index, s, weight in s) for the 8-point rule on the whole piece
  // and the 8-point rule on both halves of the piece (error estimate)
  struct Node {
    int j;
    double s;
    double w_coarse;
    double w_fine;
  };
  std::vector<Node> nodes;
  for (int j = 0; j < n_theta; ++j) {
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double s0 = cuts[i], s1 = cuts[i + 1];
      auto map = [&](double tau, double& jac) {
        jac = 0.5 * (s1 - s0) * std::numbers::pi * std::sin(std::numbers::pi * tau) * 0.5;
        return s0 + (s1 - s0) * 0.5 * (1 - std::cos(std::numbers::pi * tau));
      };
      for (int k = 0; k < 8; ++k) {
        double jac;
        const double tau = 0.5 * (1 + quad::gl8.x[k]);
        const double s = map(tau, jac);
        nodes.push_back({j, s, quad::gl8.w[k] * jac, 0.0});
      }
      for (int half = 0; half < 2; ++half) {
        for (int k = 0; k < 8; ++k) {
          double jac;
          const double tau = 0.25 * (1 + quad::gl8.x[k]) + 0.5 * half;
          const double s = map(tau, jac);
          nodes.push_back({j, s, 0.0, 0.5 * quad::gl8.w[k] * jac});
        }
      }
    }
  }
  std::vector<ShellResult> sr(nodes.size());
  parallel_for(nodes.size(), opt.threads, [&](std::size_t i) {
    const double theta = std::numbers::pi * nodes[i].j / n_theta;
    sr[i] = rotation_slice(q, opt, theta, nodes[i].s);
  });

  std::vector<double> per_angle_fine(n_theta, 0.0), per_angle_coarse(n_theta, 0.0);
  double slice_err = 0, tail = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    est.evaluations += sr[i].evaluations;
    if (sr[i].infinite) {
      est.infinite = true;
      est.value = std::numeric_limits<double>::infinity();
      est.diagnostics = "slice measure is infinite: " + sr[i].diagnostics;
      return est;
    }
    per_angle_fine[nodes[i].j] += nodes[i].w_fine * sr[i].value;
    per_angle_coarse[nodes[i].j] += nodes[i].w_coarse * sr[i].value;
    slice_err += nodes[i].w_fine * sr[i].error;
    tail += nodes[i].w_fine * sr[i].tail;
  }
  const double dth = std::numbers::pi / n_theta;
  double fine = 0, coarse = 0, half_rule = 0;
  for (int j = 0; j < n_theta; ++j) {
    fine += dth * per_angle_fine[j];
    coarse += dth * per_angle_coarse[j];
    if (j % 2 == 0) half_rule += 2 * dth * per_angle_fine[j];
  }
  est.value = fine;
  est.tail_analytic = std::min(dth * tail, fine);
  est.error_bound = dth * slice_err + std::abs(fine - coarse) + (radial ? 0.0 : std::abs(fine - half_rule));
  return est;
}

}  // namespace nonlocal

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "nonlocal/catalog.hpp"

using namespace nonlocal;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

// int |f|^p over consecutive pieces of `pts`
template <class F>
double lp_pow(F f, const std::vector<double>& pts, double p) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    s += GK::integrate([&](double x) { return std::pow(std::abs(f(x)), p); }, pts[i], pts[i + 1], 12, 1e-13);
  return s;
}

}  // namespace

TEST(Standard, ParsesIds) {
  EXPECT_EQ(make_standard("tent").id, "tent");
  EXPECT_EQ(make_standard("smooth_bump", 3).dim, 3);
  EXPECT_DOUBLE_EQ(make_standard("interval_indicator(2.5)").support.hi[0], 2.5);
  EXPECT_DOUBLE_EQ(make_standard("constant(3)").sup_norm, 3.0);
  EXPECT_THROW(make_standard("nope"), DomainError);
  EXPECT_THROW(make_standard("tent", 2), DomainError);
  EXPECT_THROW(make_standard("interval_indicator(x)"), DomainError);
  EXPECT_THROW(make_standard("interval_indicator(1"), DomainError);
}

TEST(Tent, ValuesAndNorms) {
  const auto u = make_tent();
  EXPECT_DOUBLE_EQ(u(0.25), 0.25);
  EXPECT_DOUBLE_EQ(u(0.5), 0.5);
  EXPECT_DOUBLE_EQ(u(1.5), 0.0);
  EXPECT_DOUBLE_EQ(*u.grad_l1, 1.0);
  for (double p : {1.0, 2.0, 3.0}) EXPECT_NEAR(*u.grad_lp_pow(p), lp_pow(u.df1, {0, 0.5, 1}, p), 1e-12);
  EXPECT_DOUBLE_EQ(*u.lip, 1.0);
}

TEST(SmoothBump, OneDimensionalNorms) {
  const auto u = make_smooth_bump(1);
  EXPECT_NEAR(u(0.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(u(1.0), 0.0);
  EXPECT_NEAR(*u.grad_l1, lp_pow(u.df1, {-1, 0, 1}, 1.0), 1e-10);
  EXPECT_NEAR(*u.grad_lp_pow(2.0), lp_pow(u.df1, {-1, 0, 1}, 2.0), 1e-10);
  double mx = 0;
  for (int i = 0; i <= 200000; ++i) mx = std::max(mx, std::abs(u.df1(-1.0 + 2.0 * i / 200000)));
  EXPECT_NEAR(*u.lip, mx, 1e-8);
}

TEST(SmoothBump, RadialNormInTwoDimensions) {
  const auto u = make_smooth_bump(2);
  const auto u1 = make_smooth_bump(1);
  // ||grad u||_1 = 2 pi int_0^1 |phi'(r)| r dr
  const double ref =
      2 * std::numbers::pi * GK::integrate([&](double r) { return std::abs(u1.df1(r)) * r; }, 0.0, 1.0, 12, 1e-13);
  EXPECT_NEAR(*u.grad_l1, ref, 1e-9);
  const std::array<double, 2> x{0.3, -0.2};
  std::array<double, 2> g{};
  u.dfn(x, g);
  const double r = std::hypot(x[0], x[1]);
  EXPECT_NEAR(g[0], u1.df1(r) * x[0] / r, 1e-14);
}

TEST(Indicators, BasicProperties) {
  const auto h = make_halfline_step();
  EXPECT_EQ(h.support_kind, SupportKind::gradient_compact);
  EXPECT_EQ(h(-1e-300), 0.0);
  EXPECT_EQ(h(0.0), 1.0);
  const auto b = make_ball_indicator(1.0, 3);
  EXPECT_NEAR(*b.grad_bv, 4 * std::numbers::pi, 1e-13);
  const std::array<double, 3> in{0.5, 0.5, 0.5}, out{0.6, 0.6, 0.6};
  EXPECT_EQ(b(std::span<const double>(in)), 1.0);
  EXPECT_EQ(b(std::span<const double>(out)), 0.0);
  const auto c = make_constant(2.0);
  EXPECT_EQ(c.oscillation, 0.0);
  EXPECT_EQ(*c.grad_lp_pow(2.0), 0.0);
}

TEST(Descriptor, ExportsNorms) {
  const auto j = make_standard("interval_indicator(2)").descriptor();
  EXPECT_EQ(j["id"], "interval_indicator");
  EXPECT_EQ(j["grad_bv"], 2.0);
  EXPECT_TRUE(j["grad_l1"].is_null());
  EXPECT_EQ(j["support"]["hi"][0], 2.0);
}

TEST(Cantor, EndpointsMonotoneAndSymmetric) {
  for (int m : {0, 1, 3, 6}) {
    const CantorSpec s{-0.5, m};
    EXPECT_EQ(cantor_g(s, 0.0), 0.0);
    EXPECT_EQ(cantor_g(s, 1.0), 1.0);
    double prev = 0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = i / 4000.0;
      const double v = cantor_g(s, x);
      EXPECT_GE(v, prev - 1e-15);
      EXPECT_NEAR(v + cantor_g(s, 1.0 - x), 1.0, 1e-12);
      prev = v;
    }
  }
}

TEST(Cantor, SelfSimilarity) {
  for (double gamma : {-0.5, -0.25}) {
    for (int m = 1; m <= 5; ++m) {
      const CantorSpec s{gamma, m}, t{gamma, m - 1};
      const double rho = s.rho();
      for (double x : {0.1, 0.3, 0.5, 0.77, 0.95}) {
        EXPECT_NEAR(cantor_g(s, rho * x), 0.5 * cantor_g(t, x), 1e-13);
        EXPECT_NEAR(cantor_g(s, 1 - rho + rho * x), 0.5 + 0.5 * cantor_g(t, x), 1e-13);
      }
      // constant 1/2 on the middle gap
      EXPECT_DOUBLE_EQ(cantor_g(s, 0.5), 0.5);
    }
  }
}

TEST(Cantor, TransitionPoints) {
  for (int m = 0; m <= 5; ++m) EXPECT_EQ(cantor_transition_points(CantorSpec{-0.5, m}).size(), (std::size_t(2) << m));
  EXPECT_DOUBLE_EQ((CantorSpec{-0.5, 0}.rho()), 0.25);
}

TEST(Cantor, GradientNormsMatchQuadrature) {
  for (int m = 0; m <= 3; ++m) {
    const CantorSpec s{-0.5, m};
    auto pts = cantor_transition_points(s);
    auto df = [&](double x) { return cantor_g_deriv(s, x); };
    EXPECT_NEAR(lp_pow(df, pts, 1.0), 1.0, 1e-9);
    for (double p : {1.0, 1.5, 2.0}) {
      const double ref = lp_pow(df, pts, p);
      EXPECT_NEAR(cantor_grad_lp_pow(s, p), ref, 1e-8 * ref) << "m=" << m << " p=" << p;
    }
  }
}

TEST(Cantor, NormRatioPerGeneration) {
  const double rho = CantorSpec{-0.5, 0}.rho();
  for (double p : {1.0, 2.0, 3.0}) {
    for (int m = 1; m <= 8; ++m) {
      const auto a = make_cantor_function(CantorSpec{-0.5, m});
      const auto b = make_cantor_function(CantorSpec{-0.5, m - 1});
      EXPECT_NEAR(a.grad_lp(p) / b.grad_lp(p), std::pow(2 * rho, 1.0 / p - 1.0), 1e-12);
    }
  }
}

TEST(Cantor, DerivativeBound) {
  const CantorSpec s{-0.5, 3};
  double mx = 0;
  for (int i = 0; i <= 400000; ++i) mx = std::max(mx, std::abs(cantor_g_deriv(s, i / 400000.0)));
  EXPECT_LE(mx, cantor_g_deriv_max(s) * (1 + 1e-12));
  EXPECT_GE(mx, 0.99 * cantor_g_deriv_max(s));
}

TEST(CantorBlock, VariationIs32) {
  for (int m : {0, 2, 5}) {
    const auto u = make_cantor_block(CantorSpec{-0.5, m});
    EXPECT_NEAR(*u.grad_l1, 32.0, 1e-9);
    // variation from the values: up to 16 on [0, 1.5], back to 0 on [1.5, 2]
    EXPECT_NEAR(u(1.5), 16.0, 1e-12);
    EXPECT_EQ(u(-0.5), 0.0);
    EXPECT_EQ(u(2.0), 0.0);
  }
  const auto sh = make_cantor_block(CantorSpec{-0.5, 1}, 1, true);
  EXPECT_NEAR(sh(3.5), 16.0, 1e-12);
}

TEST(CantorBlock, LpNormMatchesQuadrature) {
  const CantorSpec s{-0.5, 2};
  const auto u = make_cantor_block(s);
  auto br = cantor_block_breaks(s);
  const double ref = lp_pow(u.df1, br, 2.0);
  EXPECT_NEAR(*u.grad_lp_pow(2.0), ref, 1e-7 * ref);
}

TEST(Mollified, OneDimensionalProfile) {
  for (int m : {1, 3, 6}) {
    const auto v = mollified_indicator(m);
    const double eps = std::ldexp(1.0, -m);
    EXPECT_NEAR(v(0.0), 2.0, 1e-14);
    EXPECT_NEAR(v(1.0 - eps), 2.0, 1e-14);
    EXPECT_NEAR(v(1.0), 1.0, 1e-14);
    EXPECT_NEAR(v(1.0 + eps), 0.0, 1e-14);
    EXPECT_NEAR(lp_pow(v.df1, v.breaks, 1.0), 4.0, 1e-9);
  }
}

TEST(Mollified, TwoDimensionalProfile) {
  const auto v = mollified_indicator(3, 2);
  const std::array<double, 2> o{0, 0}, far{1.2, 0}, edge{1.0, 0};
  EXPECT_DOUBLE_EQ(v(std::span<const double>(o)), 2.0);
  EXPECT_DOUBLE_EQ(v(std::span<const double>(far)), 0.0);
  // the mollifier is even, so the value on the unit circle is close to half the height
  EXPECT_NEAR(v(std::span<const double>(edge)), 1.0, 0.05);
  // total variation of 2 * 1_B is 2 * 2 pi
  EXPECT_NEAR(*v.grad_l1, 4 * std::numbers::pi, 0.05);
}

TEST(Series, ScheduleArithmetic) {
  SeriesOptions o;
  o.m_cap = 8;
  o.policy = OverflowPolicy::proportional;
  const auto s = counterexample_series(-0.5, 3, o);
  ASSERT_EQ(s.blocks.size(), 2u);
  EXPECT_DOUBLE_EQ(s.blocks[0].R, 16.0);
  EXPECT_DOUBLE_EQ(s.blocks[1].R, 64.0);
  EXPECT_DOUBLE_EQ(s.blocks[0].lambda, 0.25);
  EXPECT_EQ(s.blocks[0].m_required, 64);
  EXPECT_GE(s.blocks[1].m_required, 216);
}

TEST(Series, OverflowPolicies) {
  SeriesOptions o;
  o.m_cap = 8;
  EXPECT_THROW(counterexample_series(-0.5, 3, o), ScheduleOverflow);
  o.policy = OverflowPolicy::clamp;
  auto c = counterexample_series(-0.5, 3, o);
  EXPECT_EQ(c.blocks[0].m, 8);
  EXPECT_EQ(c.blocks[1].m, 8);
  EXPECT_FALSE(c.blocks[1].schedule_met);
  o.policy = OverflowPolicy::proportional;
  auto p = counterexample_series(-0.5, 3, o);
  EXPECT_EQ(p.blocks[1].m, 8);
  EXPECT_EQ(p.blocks[0].m, 2);
  EXPECT_EQ(p.diagnostics.size(), 2u);
}

TEST(Series, BlocksHaveDisjointSupports) {
  SeriesOptions o;
  o.m_cap = 2;
  o.policy = OverflowPolicy::clamp;
  const auto s = counterexample_series(-0.5, 3, o);
  const auto& u = s.function;
  EXPECT_EQ(u(10.0), 0.0);
  // plateau of the shifted block n=2 around 3.5 R
  const auto& b = s.blocks[0];
  EXPECT_NEAR(u(3.5 * b.R), 16.0 * b.amplitude, 1e-12);
  EXPECT_EQ(u(4.5 * s.blocks[1].R), 0.0);
  EXPECT_THROW(counterexample_series(-0.5, 1), DomainError);
  EXPECT_THROW(counterexample_series(0.5, 3), DomainError);
}

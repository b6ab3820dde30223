#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "nonlocal/analysis.hpp"

using namespace nonlocal;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

AnalysisOptions quick() {
  AnalysisOptions a;
  a.measure.threads = 1;
  return a;
}

}  // namespace

TEST(Grid, GeometricPoints) {
  const auto v = GridSpec{4.0, 4096.0}.lambdas();
  ASSERT_EQ(v.size(), 11u);
  EXPECT_DOUBLE_EQ(v.front(), 4.0);
  EXPECT_DOUBLE_EQ(v.back(), 4096.0);
  EXPECT_NEAR(v[1], 8.0, 1e-12);
  const auto d = GridSpec{1.0, 1.0 / 8, 4}.lambdas();
  EXPECT_NEAR(d[2], 0.25, 1e-15);
  EXPECT_THROW(GridSpec({0.0, 1.0}).lambdas(), DomainError);
}

TEST(Divergence, Classifies) {
  std::vector<double> l{1, 2, 4, 8, 16, 32, 64, 128};
  std::vector<double> flat{1.5, 1.8, 1.9, 1.95, 1.98, 1.99, 1.995, 1.998};
  std::vector<double> growing, zigzag{1, 3, 1, 3, 1, 3, 1, 3};
  for (double x : l) growing.push_back(std::pow(x, 0.3));
  EXPECT_EQ(detect_divergence(l, flat).classification, Classification::converged);
  EXPECT_EQ(detect_divergence(l, growing).classification, Classification::diverging);
  EXPECT_EQ(detect_divergence(l, zigzag).classification, Classification::inconclusive);
}

TEST(Sweep, TentLimitAboveZero) {
  const auto u = make_tent();
  const auto s = sweep(u, Params(1, 1, 1), GridSpec{4.0, 4096.0}, quick());
  EXPECT_EQ(s.classification, Classification::converged);
  ASSERT_TRUE(s.limit_estimate);
  EXPECT_NEAR(*s.limit_estimate, *predicted_limit(u, Params(1, 1, 1)), 0.05 * 2);
  EXPECT_TRUE(s.monotone_nu);
}

TEST(Sweep, RejectsWrongDirection) {
  EXPECT_THROW(sweep(make_tent(), Params(1, 1, -2), GridSpec{1.0, 8.0}), DomainError);
  EXPECT_THROW(sweep(make_tent(), Params(1, 1, 0), GridSpec{1.0, 8.0}), DomainError);
}

TEST(Sweep, HalflineStepStaysAtClosedForm) {
  // lambda nu = 2 / |gamma + 1| for every lambda
  const auto s = sweep(make_halfline_step(), Params(1, 1, 2), GridSpec{1.0, 64.0}, quick());
  for (const auto& pt : s.points) EXPECT_NEAR(pt.value, 2.0 / 3.0, 1e-3);
  ASSERT_TRUE(s.limit_estimate);
}

TEST(PredictedLimit, Formula) {
  const auto u = make_smooth_bump(1);
  EXPECT_NEAR(*predicted_limit(u, Params(1, 1, -3)), 2.0 / 3.0 * 2 * std::exp(-1.0), 1e-12);
  EXPECT_FALSE(predicted_limit(u, Params(1, 1, 0)));
  EXPECT_FALSE(predicted_limit(make_halfline_step(), Params(1, 1, 1)));
}

TEST(WeakNorm, DominatesSweepAndLimit) {
  const auto u = make_tent();
  const Params prm(1, 2, 1);
  const auto w = weak_norm(u, prm, GridSpec{1e-2, 1e3, 0, 2.0, false}, quick());
  for (const auto& pt : w.sweep.points) EXPECT_LE(pt.value, w.value);
  EXPECT_GE(w.value, 0.95 * *predicted_limit(u, prm));
  EXPECT_LE(w.value, 100 * *u.grad_lp_pow(2));
}

TEST(Lipschitz, GrowthVerdicts) {
  const auto u = make_tent();
  LipschitzOptions lo;
  lo.analysis = quick();
  const auto below = truncated_growth(u, 0.5, 4, 14, lo);
  const auto above = truncated_growth(u, 1.5, 4, 14, lo);
  EXPECT_EQ(below.verdict, GrowthProbe::Verdict::infinite);
  EXPECT_GT(below.slope, 0);
  EXPECT_EQ(above.verdict, GrowthProbe::Verdict::finite);
  for (std::size_t i = 1; i < below.values.size(); ++i) EXPECT_GE(below.values[i], below.values[i - 1]);
}

TEST(Lipschitz, RecoversSlope) {
  LipschitzOptions lo;
  lo.analysis = quick();
  for (double c : {1.0, 2.5}) {
    const auto est = estimate_lipschitz(make_linear_ramp(c), lo);
    EXPECT_NEAR(est.value, c, 0.1 * c);
    EXPECT_LE(est.lambda_lo, est.lambda_hi);
  }
  EXPECT_THROW(estimate_lipschitz(make_smooth_bump(2), lo), DomainError);
}

TEST(BvLimit, IndicatorAboveZero) {
  const auto b = bv_indicator_limit(1.0, 1.0, GridSpec{4.0, 1024.0}, quick());
  ASSERT_TRUE(b.limit);
  EXPECT_NEAR(*b.limit, b.bv_prediction, 0.05 * b.bv_prediction);
  EXPECT_NEAR(b.sobolev_prediction, 4.0, 1e-12);
  EXPECT_THROW(bv_indicator_limit(1.0, -1.0), DomainError);
}

TEST(BvLimit, LengthDoesNotMatter) {
  const auto a = bv_indicator_limit(0.5, 2.0, GridSpec{8.0, 2048.0}, quick());
  ASSERT_TRUE(a.limit);
  EXPECT_NEAR(*a.limit, 2.0 / 3.0 * 2.0, 0.05);
}

TEST(Cantor, RectangleFloorMatchesClosedForm) {
  for (double g : {-0.5, -0.75}) {
    const double rho = CantorSpec{g, 0}.rho();
    const double a = rho * rho, c = 1 - rho * rho;
    EXPECT_NEAR(rectangle_pair_measure(g, a, c), rectangle_pair_exact(g, a, c), 1e-8);
  }
}

TEST(Cantor, GrowthIsMonotone) {
  const auto g = cantor_growth(-0.5, 1.0, {0, 1, 2, 3}, 14, quick());
  for (std::size_t i = 1; i < g.values.size(); ++i) EXPECT_GE(g.values[i], g.values[i - 1]);
  EXPECT_NEAR(g.floor_unit, g.floor_unit_exact, 1e-3 * g.floor_unit_exact);
  for (std::size_t i = 0; i < g.values.size(); ++i) EXPECT_GE(g.values[i], g.ms[i] * g.floor_unit);
  EXPECT_THROW(cantor_growth(-0.5, 1.0, {20}, 14), DomainError);
  EXPECT_THROW(cantor_growth(-0.5, 2.0, {5}, 14), DomainError);
}

TEST(Mollified, GrowthIsStrict) {
  const auto g = mollified_indicator_growth(1.0, {2, 3, 4}, 30, quick());
  EXPECT_LT(g.values[0], g.values[1]);
  EXPECT_LT(g.values[1], g.values[2]);
  EXPECT_GT(g.slope, 0);
  EXPECT_EQ(g.witness_checked, 300);
  EXPECT_EQ(g.witness_inside, 300);
  EXPECT_THROW(mollified_indicator_growth(2.0, {3}), DomainError);
}

TEST(Series, BinLayout) {
  SeriesOptions so;
  so.m_cap = 1;
  so.policy = OverflowPolicy::clamp;
  const auto s = counterexample_series(-0.5, 3, so);
  const auto d = series_bins(s, 2, 3, 1, quick());
  ASSERT_EQ(d.bins.size(), 2u);
  // lambda_n = 2^-n, bin n = ((n+1)^-2 lambda_{n+1}, n^-2 lambda_n]
  EXPECT_DOUBLE_EQ(d.bins[0].lambda_hi, 0.25 / 4);
  EXPECT_DOUBLE_EQ(d.bins[0].lambda_lo, 0.125 / 9);
  EXPECT_DOUBLE_EQ(d.bins[1].lambda_hi, d.bins[0].lambda_lo);
  for (const auto& b : d.bins) {
    ASSERT_EQ(b.values.size(), 2u);
    EXPECT_DOUBLE_EQ(b.infimum, std::min(b.values[0], b.values[1]));
  }
  // the shared endpoint is evaluated once
  EXPECT_EQ(d.bins[0].values[1], d.bins[1].values[0]);
  EXPECT_EQ(d.bins_increasing, d.bins[1].infimum > d.bins[0].infimum);
  EXPECT_THROW(series_bins(s, 3, 2), DomainError);
}

TEST(BBM, MatchesNestedQuadrature) {
  // s = 1/2, p = 2: s int int_[-R,R]^2 |u(x) - u(y)|^2 |x - y|^-2 dx dy
  const auto u = make_tent();
  const double R = 2, s = 0.5;
  auto inner = [&](double x) {
    std::vector<double> pts{-R, 0.0, 0.5, 1.0, R, x};
    std::sort(pts.begin(), pts.end());
    double v = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i + 1] <= pts[i]) continue;
      v += GK::integrate(
          [&](double y) {
            const double h = std::abs(x - y);
            return h == 0 ? 0.0 : std::pow(u(x) - u(y), 2) / (h * h);
          },
          pts[i], pts[i + 1], 10, 1e-11);
    }
    return v;
  };
  double ref = 0;
  for (auto [a, b] : {std::pair{-R, 0.0}, std::pair{0.0, 0.5}, std::pair{0.5, 1.0}, std::pair{1.0, R}})
    ref += GK::integrate(inner, a, b, 10, 1e-10);
  ref *= s;
  MeasureOptions o;
  o.threads = 1;
  o.rel_tol = 1e-6;
  const auto r = bbm_functional(BBMQuery{u, 2.0, R, {s}}, o);
  EXPECT_NEAR(r.values[0], ref, 1e-4 * ref);
}

TEST(BBM, TrendSatisfiesLowerBound) {
  const auto u = make_tent();
  for (double p : {1.0, 2.0}) {
    const auto r = bbm_functional(BBMQuery{u, p, 2.0, {0.2, 0.1, 0.05, 0.025}});
    EXPECT_GE(kappa(p, 1) / p * r.trend, 0.95 * *u.grad_lp_pow(p));
  }
  EXPECT_THROW(bbm_functional(BBMQuery{u, 1.0, 2.0, {1.5}}), DomainError);
  EXPECT_THROW(bbm_functional(BBMQuery{u, 1.0, 2.0, {}}), DomainError);
}

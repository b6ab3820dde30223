#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nonlocal/measure.hpp"

using namespace nonlocal;

namespace {

MeasureOptions opts(Method m = Method::automatic) {
  MeasureOptions o;
  o.method = m;
  o.threads = 1;
  return o;
}

double nu(const TestFunction& u, double p, double g, double lam, const MeasureOptions& o = opts()) {
  return nu_measure(LevelSetQuery{u, Params(u.dim, p, g), lam}, o).value;
}

// u(x / R): tent stretched to [0, R]
TestFunction stretched_tent(double R) {
  auto u = make_tent();
  auto f = u.f1;
  u.f1 = [f, R](double x) { return f(x / R); };
  u.df1 = {};
  u.support = Box{{0.0}, {R}};
  u.breaks = {0.0, 0.5 * R, R};
  u.kinks = u.breaks;
  u.resolution *= R;
  u.lip = 1.0 / R;
  u.grad_lp = {};
  return u;
}

}  // namespace

TEST(Measure, HalflineClosedForm) {
  const auto u = make_halfline_step();
  for (double g : {1.0, 2.0, -2.0, -3.0, 0.5, -0.5})
    for (double lam : {0.25, 1.0, 4.0}) EXPECT_NEAR(nu(u, 1, g, lam), halfline_closed_form(g, lam), 1e-3 * halfline_closed_form(g, lam));
}

TEST(Measure, HalflineAtMinusOneIsInfinite) {
  const auto est = nu_measure(LevelSetQuery{make_halfline_step(), Params(1, 1, -1), 0.5}, opts());
  EXPECT_TRUE(est.infinite);
  EXPECT_TRUE(std::isinf(est.value));
}

TEST(Measure, TentFarFieldClosedForm) {
  // gamma = -2, p = 1: only pairs at distance > 1/u(x) >= 2 count, so
  // nu = 2 int u^2 dx / lambda^2 = 1 / (6 lambda^2)
  const auto u = make_tent();
  for (double lam : {1.0, 10.0}) EXPECT_NEAR(nu(u, 1, -2, lam), 1.0 / (6 * lam * lam), 1e-4 / (6 * lam * lam));
}

TEST(Measure, TentBruteForceGrid) {
  // gamma = 1, p = 1, lambda = 4: the weight is 1, so nu is the area of
  // {|u(x) - u(y)| > 4 |x - y|^2}; counted on a 4096 x 4096 midpoint grid
  const auto u = make_tent();
  const int n = 4096;
  const double lo = -0.5, hi = 1.5, w = (hi - lo) / n;
  std::vector<double> x(n), ux(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (i + 0.5) * w, ux[i] = u(x[i]);
  long long hits = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = x[i] - x[j];
      if (std::abs(ux[i] - ux[j]) > 4 * d * d) ++hits;
    }
  const double brute = hits * w * w;
  EXPECT_NEAR(nu(u, 1, 1, 4), brute, 2e-3 * brute);
}

TEST(Measure, IndicatorGammaZeroClosedForm) {
  const auto u = make_interval_indicator(1.0);
  for (double lam : {1.0 / 64, 0.25, 1.0, 2.0, 64.0}) {
    const double ref = lam <= 1 ? 4 * (1 + std::log(1 / lam)) : 4 / lam;
    EXPECT_NEAR(nu(u, 1, 0, lam), ref, 1e-4 * ref) << lam;
  }
}

TEST(Measure, MonotoneInLambda) {
  const auto u = make_smooth_bump(1);
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {0.05, 0.1, 0.5, 1.0, 5.0, 20.0}) {
    const double v = nu(u, 2, 1, lam);
    EXPECT_LE(v, prev * (1 + 1e-6));
    prev = v;
  }
}

TEST(Measure, SymmetryUnderNegationAndReflection) {
  const auto u = make_tent();
  auto neg = u;
  neg.f1 = [f = u.f1](double x) { return -f(x); };
  auto refl = u;
  refl.f1 = [f = u.f1](double x) { return f(1.0 - x); };
  for (double g : {1.0, -2.0}) {
    const double a = nu(u, 1, g, 2.0);
    EXPECT_NEAR(nu(neg, 1, g, 2.0), a, 1e-6 * a);
    EXPECT_NEAR(nu(refl, 1, g, 2.0), a, 1e-4 * a);
  }
}

TEST(Measure, AmplitudeScaling) {
  // nu[c u](lambda) = nu[u](lambda / c)
  const auto u = make_tent();
  const auto v = make_tent(3.0);
  for (double g : {1.0, -2.0}) {
    const double a = nu(v, 1, g, 6.0), b = nu(u, 1, g, 2.0);
    EXPECT_NEAR(a, b, 2e-4 * b);
  }
}

TEST(Measure, DilationScaling) {
  // nu[u(./R)](lambda) = R^(gamma + N) nu[u](lambda R^(1+b))
  for (double R : {0.5, 4.0}) {
    const auto uR = stretched_tent(R);
    const auto u = make_tent();
    for (auto [p, g] : {std::pair{1.0, 1.0}, std::pair{2.0, -2.0}, std::pair{1.0, 0.5}}) {
      const double b = g / p, lam = 1.5;
      const double lhs = nu(uR, p, g, lam);
      const double rhs = std::pow(R, g + 1) * nu(u, p, g, lam * std::pow(R, 1 + b));
      EXPECT_NEAR(lhs, rhs, 3e-4 * rhs) << R << " " << g;
    }
  }
}

TEST(Measure, TruncationIsMonotone) {
  const auto u = make_tent();
  LevelSetQuery q{u, Params(1, 1, 0), 0.5};
  double prev = 0;
  for (int k = 2; k <= 10; k += 2) {
    const double v = nu_measure_truncated(q, std::ldexp(1.0, -k), 1.0, opts()).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_THROW(nu_measure_truncated(q, 0.0, 1.0), DomainError);
}

TEST(Measure, MonteCarloAgreesWithGrid) {
  struct Case {
    TestFunction u;
    double p, g, lam;
  };
  std::vector<Case> cases;
  for (double lam : {0.5, 2.0}) {
    cases.push_back({make_tent(), 1, 1, 4 * lam});
    cases.push_back({make_tent(), 2, -2, 0.25 * lam});
    cases.push_back({make_tent(), 1, 0.5, lam});
    cases.push_back({make_smooth_bump(1), 1, 1, lam});
    cases.push_back({make_smooth_bump(1), 2, 2, 2 * lam});
    cases.push_back({make_smooth_bump(1), 1, -3, 0.1 * lam});
    cases.push_back({make_interval_indicator(1.0), 1, 1, lam});
    cases.push_back({make_interval_indicator(1.0), 1, -2, lam});
    cases.push_back({make_interval_indicator(1.0), 1, 0, lam});
    cases.push_back({make_tent(2.0), 2, 1, lam});
  }
  ASSERT_EQ(cases.size(), 20u);
  for (const auto& c : cases) {
    auto mc = opts(Method::montecarlo);
    mc.samples = 400'000;
    const auto a = nu_measure(LevelSetQuery{c.u, Params(1, c.p, c.g), c.lam}, opts(Method::grid1d));
    const auto b = nu_measure(LevelSetQuery{c.u, Params(1, c.p, c.g), c.lam}, mc);
    EXPECT_LE(std::abs(a.value - b.value), a.error_bound + b.error_bound + 1e-9)
        << c.u.id << " p=" << c.p << " g=" << c.g << " lam=" << c.lam << ": " << a.value << " vs " << b.value;
  }
}

TEST(Measure, MonteCarloIsSeedDeterministic) {
  auto o = opts(Method::montecarlo);
  o.samples = 50'000;
  const LevelSetQuery q{make_tent(), Params(1, 1, 1), 4.0};
  EXPECT_EQ(nu_measure(q, o).value, nu_measure(q, o).value);
  auto o2 = o;
  o2.seed = 99;
  EXPECT_NE(nu_measure(q, o).value, nu_measure(q, o2).value);
}

TEST(Rotation, AgreesWithMonteCarloInTwoDimensions) {
  struct Case {
    TestFunction u;
    double p, g, lam;
  };
  const std::vector<Case> cases{{make_smooth_bump(2), 1, 1, 0.5},
                                {make_smooth_bump(2), 2, -2, 0.2},
                                {make_ball_indicator(1.0, 2), 1, 1, 2.0}};
  for (const auto& c : cases) {
    auto mc = opts(Method::montecarlo);
    mc.samples = 400'000;
    const auto a = nu_measure(LevelSetQuery{c.u, Params(2, c.p, c.g), c.lam}, opts(Method::rotation2d));
    const auto b = nu_measure(LevelSetQuery{c.u, Params(2, c.p, c.g), c.lam}, mc);
    EXPECT_LE(std::abs(a.value - b.value), a.error_bound + b.error_bound) << c.u.id << " " << a.value << " " << b.value;
  }
}

TEST(Rotation, RadialSlicesDoNotDependOnAngle) {
  const LevelSetQuery q{make_smooth_bump(2), Params(2, 1, 1), 0.5};
  const auto o = opts();
  for (double s : {0.0, 0.3, 0.8}) {
    const double a = rotation_slice(q, o, 0.0, s).value;
    for (double th : {0.4, 1.3, 2.9}) EXPECT_NEAR(rotation_slice(q, o, th, s).value, a, 1e-4 * a + 1e-12);
  }
}

TEST(Rotation, AnisotropicFunctionUsesAngles) {
  // u(x) = tent(x_1) bump(x_2) is not radial; rotation and Monte Carlo still agree
  TestFunction u;
  u.id = "product";
  u.dim = 2;
  const auto t = make_tent();
  const auto bmp = make_smooth_bump(1);
  u.fn = [t, bmp](std::span<const double> x) { return t(x[0]) * bmp(x[1]) * std::exp(1.0); };
  u.support = Box{{0.0, -1.0}, {1.0, 1.0}};
  u.sup_norm = 0.5;
  u.oscillation = 0.5;
  auto o = opts(Method::rotation2d);
  o.angles = 32;
  const auto a = nu_measure(LevelSetQuery{u, Params(2, 1, 1), 1.0}, o);
  auto mc = opts(Method::montecarlo);
  mc.samples = 400'000;
  const auto b = nu_measure(LevelSetQuery{u, Params(2, 1, 1), 1.0}, mc);
  EXPECT_LE(std::abs(a.value - b.value), a.error_bound + b.error_bound) << a.value << " " << b.value;
}

TEST(Measure, BudgetExceededCarriesPartialResult) {
  auto o = opts();
  o.max_evaluations = 1000;
  try {
    nu_measure(LevelSetQuery{make_smooth_bump(1), Params(1, 1, 1), 1.0}, o);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_GT(e.evaluations, 1000u);
  }
}

TEST(Measure, RejectsInvalidQueries) {
  EXPECT_THROW(nu_measure(LevelSetQuery{make_tent(), Params(1, 1, 1), 0.0}), DomainError);
  EXPECT_THROW(nu_measure(LevelSetQuery{make_tent(), Params(2, 1, 1), 1.0}), DomainError);
  EXPECT_THROW(nu_measure(LevelSetQuery{make_tent(), Params(1, 1, 1), 1.0}, opts(Method::rotation2d)), DomainError);
  EXPECT_THROW(nu_measure(LevelSetQuery{make_halfline_step(), Params(1, 1, 1), 1.0}, opts(Method::montecarlo)),
               DomainError);
}

TEST(Measure, ConstantFunctionHasEmptyLevelSets) {
  EXPECT_EQ(nu(make_constant(5.0), 1, 1, 1e-6), 0.0);
}

TEST(Quotient, Value) {
  const auto u = make_tent();
  EXPECT_DOUBLE_EQ(quotient(u, 0.0, 0.25, 0.5), -1.0);
  EXPECT_DOUBLE_EQ(quotient(u, 1.0, 0.0, 0.5), -0.5 / 0.25);
  EXPECT_THROW(quotient(u, 1.0, 0.3, 0.3), DomainError);
}

TEST(Stopping, UnitIndicator) {
  const StoppingInput in{[](double x) { return (x >= 0 && x <= 1) ? 1.0 : 0.0; }, 0.0, 1.0, {}};
  const auto d = stopping_intervals(in, -2.0);
  ASSERT_EQ(d.K, 2);
  EXPECT_NEAR(d.endpoints[1], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(d.endpoints[2], 1 + std::sqrt(2.0), 1e-12);
  for (double r : d.residuals) EXPECT_LT(std::abs(r), 1e-12);
}

TEST(Stopping, NarrowIndicatorNeedsOneInterval) {
  // f = 1_[0, eps]: (x - 0) * eps = 1/2 gives a_1 = 1 / (2 eps), past the support
  const double eps = 1e-3;
  const StoppingInput in{[eps](double x) { return (x >= 0 && x <= eps) ? 1.0 : 0.0; }, 0.0, eps, {}};
  const auto d = stopping_intervals(in, -2.0);
  ASSERT_EQ(d.K, 1);
  EXPECT_NEAR(d.endpoints[1], 1 / (2 * eps), 1e-9);
}

TEST(Stopping, GeneralExponent) {
  // gamma = -3: (x - a)^2 F(a, x) = 1/2
  const StoppingInput in{[](double x) { return (x >= 0 && x <= 1) ? 1.0 : 0.0; }, 0.0, 1.0, {}};
  const auto d = stopping_intervals(in, -3.0);
  EXPECT_NEAR(d.endpoints[1], std::cbrt(0.5), 1e-12);
  for (std::size_t i = 1; i < d.endpoints.size(); ++i) EXPECT_GT(d.endpoints[i], d.endpoints[i - 1]);
  EXPECT_THROW(stopping_intervals(in, -1.0), DomainError);
}

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "nonlocal/constants.hpp"

using namespace nonlocal;

namespace {

// kappa(p, N) = int_{S^{N-1}} |w_1|^p dw, reduced to the first coordinate:
// |S^{N-2}| int_{-1}^{1} |t|^p (1 - t^2)^((N-3)/2) dt, with t = sin(phi) to
// remove the endpoint singularity.
double kappa_oracle(double p, int N) {
  if (N == 1) return 2.0;
  const double lower = N == 2 ? 2.0 : sphere_area(N - 1);
  auto f = [&](double phi) {
    return std::pow(std::abs(std::sin(phi)), p) * std::pow(std::cos(phi), N - 2);
  };
  const double half = std::numbers::pi / 2;
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -half, 0.0, 15, 1e-15) +
                   boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, half, 15, 1e-15);
  return lower * I;
}

}  // namespace

TEST(Kappa, TableValues) {
  EXPECT_NEAR(kappa(1, 1), 2.0, 2e-12);
  EXPECT_NEAR(kappa(1, 2), 4.0, 4e-12);
  EXPECT_NEAR(kappa(2, 2), std::numbers::pi, 4e-12);
  EXPECT_NEAR(kappa(2, 1), 2.0, 2e-12);
  EXPECT_NEAR(kappa(1, 3), 2 * std::numbers::pi, 8e-12);
}

TEST(Kappa, MatchesSphereQuadrature) {
  for (int N = 1; N <= 6; ++N) {
    for (double p : {1.0, 1.5, 2.0, 3.0, 7.5}) {
      const double ref = kappa_oracle(p, N);
      EXPECT_NEAR(kappa(p, N), ref, 1e-10 * ref) << "p=" << p << " N=" << N;
    }
  }
}

TEST(Kappa, CircleIntegralOfCosine) {
  // int_0^{2 pi} |cos t| dt by the midpoint rule
  const int n = 1 << 20;
  double s = 0;
  for (int i = 0; i < n; ++i) s += std::abs(std::cos(2 * std::numbers::pi * (i + 0.5) / n));
  EXPECT_NEAR(kappa(1, 2), s * 2 * std::numbers::pi / n, 1e-9);
}

TEST(Kappa, LargeArgumentsStayFinite) {
  const double k = kappa(40.0, 60);
  EXPECT_TRUE(std::isfinite(k));
  EXPECT_GT(k, 0.0);
}

TEST(Kappa, LogDerivativeMatchesFiniteDifference) {
  for (int N : {1, 2, 3, 5}) {
    for (double p : {1.5, 2.0, 4.0}) {
      const double h = 1e-5;
      const double fd = (std::log(kappa(p + h, N)) - std::log(kappa(p - h, N))) / (2 * h);
      EXPECT_NEAR(kappa_log_derivative(p, N), fd, 1e-8);
    }
  }
}

TEST(Kappa, RejectsBadArguments) {
  EXPECT_THROW(kappa(0.5, 2), DomainError);
  EXPECT_THROW(kappa(1.0, 0), DomainError);
  EXPECT_THROW(kappa_log_derivative(0.9, 1), DomainError);
}

TEST(SphereArea, KnownValues) {
  EXPECT_DOUBLE_EQ(sphere_area(1), 2.0);
  EXPECT_NEAR(sphere_area(2), 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(sphere_area(4), 2 * std::numbers::pi * std::numbers::pi, 1e-12);
  EXPECT_THROW(sphere_area(0), DomainError);
}

TEST(Params, DerivedExponents) {
  const Params prm(2, 2.0, -3.0);
  EXPECT_DOUBLE_EQ(prm.b(), -1.5);
  EXPECT_DOUBLE_EQ(prm.e(), -0.5);
  EXPECT_THROW(Params(0, 1.0, 1.0), DomainError);
  EXPECT_THROW(Params(1, 0.5, 1.0), DomainError);
  EXPECT_THROW(Params(1, 1.0, NAN), DomainError);
}

TEST(Regime, Classification) {
  EXPECT_EQ(classify(Params(1, 1, 2)), Regime::gamma_positive);
  EXPECT_EQ(classify(Params(1, 2, 0)), Regime::gamma_zero);
  EXPECT_EQ(classify(Params(1, 2, -0.5)), Regime::negative_p_gt_1);
  EXPECT_EQ(classify(Params(1, 1, -2)), Regime::below_minus_one_p1);
  EXPECT_EQ(classify(Params(1, 1, -0.5)), Regime::band_p1);
  EXPECT_EQ(classify(Params(1, 1, -1)), Regime::band_p1);
  EXPECT_FALSE(sobolev_limit_holds(Params(1, 1, -0.5)));
  EXPECT_TRUE(sobolev_limit_holds(Params(1, 1, -2)));
  EXPECT_EQ(limit_direction(Params(1, 1, 1)), 1);
  EXPECT_EQ(limit_direction(Params(1, 1, -1)), -1);
  EXPECT_EQ(limit_direction(Params(1, 1, 0)), 0);
}

TEST(HalflineClosedForm, Values) {
  EXPECT_DOUBLE_EQ(halfline_closed_form(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(halfline_closed_form(-2.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(halfline_closed_form(-3.0, 4.0), 0.25);
  EXPECT_THROW(halfline_closed_form(-1.0, 1.0), DomainError);
  EXPECT_THROW(halfline_closed_form(1.0, 0.0), DomainError);
}

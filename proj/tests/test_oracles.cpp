#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "spdelab/oracles.hpp"

using namespace spdelab;

namespace {

constexpr double kPi = std::numbers::pi;

// E|N(mu, T)|^-alpha in d = 1 by tanh-sinh on each side of the singularity.
double negative_moment_1d(double mu, double T, double alpha) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double v) {
    return std::pow(v, -alpha) * (std::exp(-(v - mu) * (v - mu) / (2 * T)) + std::exp(-(v + mu) * (v + mu) / (2 * T))) /
           std::sqrt(2 * kPi * T);
  };
  return ts.integrate(f, 0.0, mu + 40.0 * std::sqrt(T));
}

// d = 2 via the angular average I0: int_0^inf r^{1-alpha} e^{-(r^2+mu^2)/2T} I0(r mu / T) dr / T.
double negative_moment_2d(double mu, double T, double alpha) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double r) {
    return std::pow(r, 1 - alpha) * boost::math::cyl_bessel_i(0, r * mu / T) * std::exp(-(r * r + mu * mu) / (2 * T)) / T;
  };
  return ts.integrate(f, 0.0, mu + 40.0 * std::sqrt(T));
}

}  // namespace

TEST(Factorization, MatchesGammaProduct) {
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (auto [t, s] : {std::pair{1.0, 0.0}, std::pair{2.5, 0.3}, std::pair{0.01, -4.0}}) {
      EXPECT_NEAR(factorization_integral(a, t, s), std::tgamma(a) * std::tgamma(1 - a), 1e-8) << a;
      EXPECT_TRUE(factorization_case(a, t, s).pass);
    }
  EXPECT_THROW(factorization_integral(1.0, 1.0, 0.0), Error);
  EXPECT_THROW(factorization_integral(0.5, 0.0, 1.0), Error);
}

TEST(NegativeMoment, ClosedFormMatchesIndependentQuadrature) {
  for (double alpha : {0.2, 0.5, 0.9})
    for (double mu : {0.0, 0.3, 2.0})
      for (double T : {0.2, 1.5}) {
        double ref = negative_moment_1d(mu, T, alpha);
        EXPECT_NEAR(gaussian_negative_moment(mu, T, alpha, 1), ref, 1e-9 * ref);
        double ref2 = negative_moment_2d(mu, T, 1.5 * alpha);
        EXPECT_NEAR(gaussian_negative_moment(mu, T, 1.5 * alpha, 2), ref2, 1e-9 * ref2);
      }
  for (int d : {1, 2})
    for (double T : {0.1, 2.0}) {
      double q = negative_moment_quadrature(T, 0.7, d);
      EXPECT_NEAR(q, negative_moment_constant(0.7, d) * std::pow(T, -0.35), 1e-9 * q);
    }
}

TEST(NegativeMoment, MonteCarloCrossCheck) {
  // alpha < 1/2 keeps |N|^-alpha square integrable.
  std::mt19937_64 gen(17);
  std::normal_distribution<double> z;
  const double alpha = 0.3, T = 0.6, mu = 0.4;
  const int m = 400000;
  double s = 0, s2 = 0;
  for (int i = 0; i < m; ++i) {
    double v = std::pow(std::abs(mu + std::sqrt(T) * z(gen)), -alpha);
    s += v;
    s2 += v * v;
  }
  double mean = s / m, se = std::sqrt((s2 / m - mean * mean) / m);
  EXPECT_NEAR(gaussian_negative_moment(mu, T, alpha, 1), mean, 5 * se);
}

TEST(Correst, ChainHoldsInOneAndTwoDimensions) {
  for (auto [t, tp, x, y] : {std::tuple{0.1, 0.5, 0.3, -1.2}, std::tuple{1.0, 1.0, 0.0, 0.0}, std::tuple{0.5, 0.1, 2.0, -2.0}}) {
    auto c = verify_correst(t, tp, x, y, 0.6);
    EXPECT_TRUE(c.pass) << c.params << " " << c.detail;
    EXPECT_LE(c.ratio, 1.0 + 1e-6);
    double closed = gaussian_negative_moment(std::abs(x - y), t + tp, 0.6, 1);
    EXPECT_NEAR(c.lhs, closed, 1e-6 * closed);
  }
  std::vector<double> x{0.2, -0.4}, y{-0.1, 0.5};
  auto c2 = verify_correst(0.3, 0.7, x, y, 1.3);
  EXPECT_TRUE(c2.pass) << c2.detail;
  EXPECT_THROW(verify_correst(0.1, 0.1, 0.0, 0.0, 1.0), Error);
  EXPECT_THROW(verify_correst(0.0, 0.1, 0.0, 0.0, 0.5), Error);
}

TEST(Pdiff, TotalVariationClosedForm) {
  // lambda' = 0 and t = t': int |p_t(x - w) - p_t(y - w)| dw = 2 erf(|x - y| / (2 sqrt(2t))).
  for (double t : {0.05, 1.0})
    for (double d : {1e-3, 0.1, 1.0}) {
      double ref = 2.0 * std::erf(d / (2.0 * std::sqrt(2.0 * t)));
      EXPECT_NEAR(pdiff_integral(t, t, 0.2, 0.2 + d, 0.0), ref, 1e-8 * ref + 1e-13);
    }
}

TEST(Pdiff, CrossingsAreRoots) {
  for (auto [t, tp, x, y] : {std::tuple{0.2, 0.5, 0.0, 0.3}, std::tuple{1.0, 1.0, -1.0, 1.0}, std::tuple{0.3, 0.9, 0.5, 0.5}}) {
    auto roots = heat_crossings(t, tp, x, y);
    ASSERT_FALSE(roots.empty());
    for (double w : roots) {
      double a = std::exp(-(x - w) * (x - w) / (2 * t)) / std::sqrt(2 * kPi * t);
      double b = std::exp(-(y - w) * (y - w) / (2 * tp)) / std::sqrt(2 * kPi * tp);
      EXPECT_NEAR(a, b, 1e-12 * std::max(a, b));
    }
  }
}

TEST(Pdiff, FrozenBoundHolds) {
  for (auto [t, tp, x, y, beta, lam] :
       {std::tuple{0.1, 0.2, 0.0, 0.5, 0.5, 0.0}, std::tuple{0.5, 0.5, 1.0, 1.01, 1.0, 1.0},
        std::tuple{0.05, 1.0, -1.0, 1.0, 0.25, 2.0}, std::tuple{1.0, 1.0, 0.0, 0.0, 0.5, 0.5}}) {
    auto c = verify_pdiffest(t, tp, x, y, beta, lam);
    EXPECT_TRUE(c.pass) << c.params << " ratio=" << c.ratio;
  }
  EXPECT_TRUE(verify_pdiff_scaling(0.5, 0.0, 1.0).pass);
  EXPECT_THROW(verify_pdiffest(0.5, 0.1, 0, 0, 0.5, 0), Error);
  EXPECT_THROW(verify_pdiffest(0.1, 0.5, 0, 0, 1.5, 0), Error);
}

TEST(CorrDiff, QuadraticScaling) {
  auto s = verify_spacecorrest(0.5, 0.0, 0.05, 0.5);
  EXPECT_TRUE(s.pass) << s.detail;
  EXPECT_EQ(spacecorr_integral(0.5, 0.3, 0.3, 0.5), 0.0);
  auto t = verify_timecorrest(0.3, 0.35, 0.0, 0.5);
  EXPECT_TRUE(t.pass) << t.detail;
  EXPECT_EQ(timecorr_integral(0.3, 0.3, 0.0, 0.5), 0.0);
  // Symmetry in the two points.
  EXPECT_NEAR(spacecorr_integral(0.5, 0.0, 0.1, 0.5), spacecorr_integral(0.5, 0.1, 0.0, 0.5), 1e-10);
}

TEST(Jest, DomainChecks) {
  EXPECT_THROW(verify_jest(0.5, 0.4, 0.0, 0.6, 0.5), Error);   // c too large
  EXPECT_THROW(verify_jest(0.5, 0.8, 0.0, 0.0, 0.5), Error);   // a >= 1 - alpha/2
  EXPECT_THROW(verify_jest(0.5, 0.1, 0.0, 0.2, 0.5), Error);   // a <= c
  EXPECT_THROW(verify_jest(0.5, 0.4, -1.0, 0.0, 0.5), Error);  // b < 0
  EXPECT_THROW(verify_jest(0.5, 0.4, 0.0, 0.0, 1.0), Error);   // alpha >= 1
}

TEST(OracleCsv, HeaderAndRows) {
  std::ostringstream os;
  write_oracle_csv(os, {factorization_case(0.5, 1.0, 0.0)}, "abc");
  std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "lemma,params,lhs,rhs,ratio,pass,detail,fingerprint,version");
  EXPECT_NE(s.find("factorization,a=0.5;s=0;t=1,"), std::string::npos) << s;
  EXPECT_NE(s.find(",true,"), std::string::npos);
  EXPECT_NE(s.find(",abc,"), std::string::npos);
}

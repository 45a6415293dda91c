#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "spdelab/noise.hpp"

using namespace spdelab;

namespace {

constexpr double kPi = std::numbers::pi;

// Hurwitz zeta by Euler-Maclaurin summation (valid for s != 1, including 0 < s < 1).
double hurwitz_zeta(double s, double a) {
  const int n = 30;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::pow(k + a, -s);
  const double x = n + a;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  const double b2j[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730};
  double rising = s, fact = 2.0;
  for (int j = 1; j <= 6; ++j) {
    sum += b2j[j - 1] / fact * rising * std::pow(x, -s - 2.0 * j + 1.0);
    rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }
  return sum;
}

GridSpec grid1(int n, double l = 1.0) {
  GridSpec g;
  g.n = n;
  g.l = l;
  return g;
}

KernelSpec riesz(double alpha, int d = 1) { return KernelSpec{KernelKind::riesz, alpha, 1.0, d}; }

// Exact covariance of the synthesized field at lag r (cells), from the mode variances.
double discrete_covariance(const GridSpec& g, const std::vector<double>& amp, int lag) {
  double c = 0.0;
  for (int k = 0; k < g.n; ++k) c += amp[k] * amp[k] * std::cos(2.0 * kPi * k * lag / g.n);
  return c;
}

}  // namespace

TEST(DirichletBeta, KnownValues) {
  EXPECT_NEAR(dirichlet_beta(1.0), kPi / 4.0, 1e-14);
  EXPECT_NEAR(dirichlet_beta(2.0), 0.915965594177219015, 1e-14);  // Catalan's constant
  EXPECT_NEAR(dirichlet_beta(3.0), kPi * kPi * kPi / 32.0, 1e-14);
  EXPECT_NEAR(dirichlet_beta(0.5), 0.6676914571896091, 1e-13);
  EXPECT_THROW(dirichlet_beta(0.0), Error);
}

TEST(HurwitzOracle, ReducesToRiemannZeta) {
  for (double s : {0.3, 0.5, 0.8, 2.0}) EXPECT_NEAR(hurwitz_zeta(s, 1.0), boost::math::zeta(s), 1e-12);
}

TEST(LatticeZeta, SquareLatticeConvergentRegion) {
  // sum' |m|^-4 over Z^2, direct partial sum with the tail replaced by its integral pi / R^2.
  const int R = 1500;
  double direct = 0.0;
  for (int i = -R; i <= R; ++i)
    for (int j = -R; j <= R; ++j) {
      double r2 = double(i) * i + double(j) * j;
      if (r2 == 0.0 || r2 > double(R) * R) continue;
      direct += 1.0 / (r2 * r2);
    }
  direct += kPi / (double(R) * R);
  EXPECT_NEAR(lattice_zeta(4.0, 2), direct, 1e-6);
  EXPECT_NEAR(lattice_zeta(0.5, 1), 2.0 * boost::math::zeta(0.5), 1e-15);
}

TEST(SpectralAmplitudes, RieszModesMatchFourierConstant) {
  GridSpec g = grid1(256, 2.0);
  for (double a : {0.3, 0.8}) {
    auto amp = spectral_amplitudes(g, riesz(a));
    double c1 = 2.0 * std::tgamma(1.0 - a) * std::sin(kPi * a / 2.0) * std::pow(2.0 * kPi, a - 1.0);
    for (int k : {1, 5, 128, 200}) {
      double xi = std::abs(signed_wavenumber(k, g.n)) / g.l;
      EXPECT_NEAR(amp[k] * amp[k], c1 * std::pow(xi, a - 1.0) / g.l, 1e-12);
    }
    EXPECT_GT(amp[0], 0.0);
  }
}

TEST(SpectralAmplitudes, DiscreteCovarianceTracksRieszKernel) {
  // The synthesized covariance equals the torus covariance
  // l^-a [zeta(a, r/l) + zeta(a, 1 - r/l) - 2 zeta(a)] up to spectral truncation, and that is
  // within 3% of r^-a on [4h, l/8]. Truncation at the Nyquist mode costs up to 3% at 4h for a=0.8.
  GridSpec g = grid1(4096);
  for (double a : {0.3, 0.5, 0.8}) {
    auto amp = spectral_amplitudes(g, riesz(a));
    for (int lag = 4; lag <= g.n / 8; lag *= 2) {
      double x = lag * g.h();
      double torus = hurwitz_zeta(a, x) + hurwitz_zeta(a, 1.0 - x) - 2.0 * boost::math::zeta(a);
      double c = discrete_covariance(g, amp, lag);
      EXPECT_NEAR(c, torus, 0.03 * torus) << "a=" << a << " lag=" << lag;
      EXPECT_NEAR(c, std::pow(x, -a), 0.03 * std::pow(x, -a)) << "a=" << a << " lag=" << lag;
    }
  }
}

TEST(SpectralAmplitudes, WhiteAndBounded) {
  GridSpec g = grid1(64, 2.0);
  auto w = spectral_amplitudes(g, KernelSpec{KernelKind::white, 0.0, 3.0, 1});
  for (double v : w) EXPECT_DOUBLE_EQ(v * v, 1.5);
  auto b = spectral_amplitudes(g, KernelSpec{KernelKind::bounded_constant, 0.0, 2.0, 1});
  EXPECT_DOUBLE_EQ(b[0] * b[0], 2.0);
  for (std::size_t q = 1; q < b.size(); ++q) EXPECT_EQ(b[q], 0.0);
}

TEST(SampleIncrement, RealDeterministicAndStreamDependent) {
  GridSpec g = grid1(512);
  KernelSpec k = riesz(0.5);
  auto f1 = sample_increment(g, k, 1e-3, RngStream{1, 2, 3});
  auto f2 = sample_increment(g, k, 1e-3, RngStream{1, 2, 3});
  auto f3 = sample_increment(g, k, 1e-3, RngStream{1, 2, 4});
  EXPECT_EQ(f1.values, f2.values);
  EXPECT_NE(f1.values, f3.values);
  EXPECT_LT(f1.imag_residue, 1e-12);
  EXPECT_EQ(f1.stream, (RngStream{1, 2, 3}));
}

TEST(SampleIncrement, TwoDimensionalIsReal) {
  GridSpec g;
  g.dim = 2;
  g.n = 64;
  auto f = sample_increment(g, riesz(1.2, 2), 1e-2, RngStream{9, 0, 0});
  EXPECT_EQ(f.values.size(), 64u * 64u);
  EXPECT_LT(f.imag_residue, 1e-12);
}

TEST(SampleIncrement, BoundedConstantIsSpatiallyConstant) {
  GridSpec g = grid1(32);
  auto f = sample_increment(g, KernelSpec{KernelKind::bounded_constant, 0.0, 1.0, 1}, 0.1, RngStream{});
  for (double v : f.values) EXPECT_NEAR(v, f.values[0], 1e-15);
}

TEST(EmpiricalCovariance, MatchesExactDiscreteCovariance) {
  GridSpec g = grid1(1024);
  const double dt = 0.01;
  for (KernelSpec k : {riesz(0.3), riesz(0.8), KernelSpec{KernelKind::riesz_plus_constant, 0.5, 1.0, 1}}) {
    std::vector<NoiseField> fields;
    NoiseSampler s(g, k, dt);
    for (std::uint64_t r = 0; r < 400; ++r) fields.push_back(s.sample(RngStream{5, r, 0}));
    std::vector<int> lags{1, 4, 16, 64, 128};
    auto est = empirical_covariance(fields, lags);
    auto amp = spectral_amplitudes(g, k);
    for (const auto& e : est) {
      double exact = dt * discrete_covariance(g, amp, e.lag);
      EXPECT_NEAR(e.estimate, exact, 5.0 * e.std_error) << "alpha=" << k.alpha << " lag=" << e.lag;
      EXPECT_DOUBLE_EQ(e.theory, dt * kernel_eval(k, e.r).value);
    }
  }
}

TEST(EmpiricalCovariance, WhiteNoiseDiagonal) {
  GridSpec g = grid1(256);
  KernelSpec k{KernelKind::white, 0.0, 1.0, 1};
  std::vector<NoiseField> fields;
  for (std::uint64_t r = 0; r < 200; ++r) fields.push_back(sample_increment(g, k, 0.5, RngStream{3, r, 0}));
  auto est = empirical_covariance(fields, {0, 1, 7});
  EXPECT_DOUBLE_EQ(est[0].theory, 0.5 * 256.0);
  EXPECT_NEAR(est[0].estimate, est[0].theory, 5.0 * est[0].std_error);
  for (std::size_t i = 1; i < est.size(); ++i) {
    EXPECT_EQ(est[i].theory, 0.0);
    EXPECT_NEAR(est[i].estimate, 0.0, 5.0 * est[i].std_error);
  }
}

TEST(EmpiricalCovariance, RieszLagZeroIsSingular) {
  GridSpec g = grid1(64);
  std::vector<NoiseField> fields{sample_increment(g, riesz(0.5), 1.0, RngStream{}),
                                 sample_increment(g, riesz(0.5), 1.0, RngStream{0, 1, 0})};
  try {
    empirical_covariance(fields, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singularity);
  }
}

TEST(CovarianceAccumulator, MergeEqualsSequential) {
  GridSpec g = grid1(128);
  KernelSpec k = riesz(0.5);
  NoiseSampler s(g, k, 1.0);
  CovarianceAccumulator all(g, k, 1.0, {4, 8}), a(g, k, 1.0, {4, 8}), b(g, k, 1.0, {4, 8});
  for (std::uint64_t r = 0; r < 10; ++r) {
    auto f = s.sample(RngStream{1, r, 0});
    all.add(f);
    (r < 5 ? a : b).add(f);
  }
  a.merge(b);
  auto x = all.result(), y = a.result();
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i].estimate, y[i].estimate, 1e-15);
}

TEST(FieldIo, RoundTripIsExact) {
  GridSpec g = grid1(64, 3.0);
  auto f = sample_increment(g, riesz(0.4), 0.25, RngStream{11, 12, 13});
  std::stringstream ss;
  write_field(ss, f);
  EXPECT_EQ(ss.str().size(), 8u + 4 + 4 + 8 + 8 + 4 + 8 + 8 * 3 + 64 * 8);
  auto r = read_field(ss);
  EXPECT_EQ(r.values, f.values);
  EXPECT_EQ(r.grid.n, 64);
  EXPECT_EQ(r.grid.l, 3.0);
  EXPECT_EQ(r.dt, 0.25);
  EXPECT_EQ(r.kernel.kind, KernelKind::riesz);
  EXPECT_EQ(r.kernel.alpha, 0.4);
  EXPECT_EQ(r.stream, f.stream);
}

TEST(FieldIo, LittleEndianHeader) {
  GridSpec g = grid1(2);
  NoiseField f{g, riesz(0.5), RngStream{1, 0, 0}, 1.0, {0.0, 0.0}, 0.0};
  std::stringstream ss;
  write_field(ss, f);
  std::string s = ss.str();
  EXPECT_EQ(s.substr(0, 7), "SPDENZ1");
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 1u);  // dim, least significant byte first
  EXPECT_EQ(static_cast<unsigned char>(s[12]), 2u);  // n
}

TEST(FieldIo, RejectsCorruptInput) {
  std::stringstream bad("NOTAFIELD");
  EXPECT_THROW(read_field(bad), Error);
  GridSpec g = grid1(8);
  auto f = sample_increment(g, riesz(0.5), 1.0, RngStream{});
  std::stringstream ss;
  write_field(ss, f);
  std::string s = ss.str();
  std::stringstream cut(s.substr(0, s.size() - 3));
  try {
    read_field(cut);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
  }
}

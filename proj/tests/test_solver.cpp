#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spdelab/solver.hpp"

using namespace spdelab;

namespace {

constexpr double kPi = std::numbers::pi;

SimulationSpec base_spec(int n, double dt, double t_end) {
  SimulationSpec s;
  s.grid.n = n;
  s.grid.dt = dt;
  s.grid.t_end = t_end;
  s.grid.t_min = 0.0;
  s.kernel = KernelSpec{KernelKind::riesz, 0.5, 1.0, 1};
  s.sigma = SigmaSpec::holder_power(1.0, 0.8);
  s.u0 = U0Spec::sine(1, 1.0, 0.5);
  s.seed = 42;
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("spdelab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Stepper, NoiselessSineModeDecaysExactly) {
  GridSpec g;
  g.n = 64;
  g.dt = 1e-3;
  for (int k : {1, 3, 10}) {
    Field u = initial_field(g, U0Spec::sine(k, 1.0));
    Stepper st(g, SigmaSpec::lipschitz_linear(1.0));
    const int steps = 25;
    for (int m = 0; m < steps; ++m) st.step(u.values, {});
    const double decay = std::exp(-2.0 * kPi * kPi * k * k * g.dt * steps);
    for (std::size_t i = 0; i < u.values.size(); ++i)
      EXPECT_NEAR(u.values[i], decay * std::sin(2.0 * kPi * k * i / 64.0), 1e-13);
  }
}

TEST(Stepper, MultiplicativeNoiseOnConstantFieldIsProduct) {
  // Spatially constant noise and a constant start keep the field constant, so each step multiplies
  // the value by 1 + s dW with the heat step acting as the identity.
  GridSpec g;
  g.n = 16;
  g.dt = 0.01;
  KernelSpec k{KernelKind::bounded_constant, 0.0, 1.0, 1};
  SigmaSpec s = SigmaSpec::lipschitz_linear(0.7);
  Field u = initial_field(g, U0Spec::constant(2.0));
  Stepper st(g, s);
  NoiseSampler ns(g, k, g.dt);
  std::vector<double> dw(g.size());
  double expected = 2.0;
  for (std::uint64_t m = 0; m < 50; ++m) {
    ns.sample(RngStream{1, 0, m}, dw);
    expected *= 1.0 + 0.7 * dw[0];
    st.step(u.values, dw);
  }
  for (double v : u.values) EXPECT_NEAR(v, expected, 1e-12 * std::abs(expected));
}

TEST(Stepper, AdditiveNoiseVarianceMatchesMildSolution) {
  // sigma = 1 (constant table) and u0 = 0: u_M = sum_m S^(M-m) dW_m, so
  // Var u_M(x) = dt sum_k a_k^2 sum_{j=1..M} exp(-4 pi^2 k^2 dt j).
  GridSpec g;
  g.n = 64;
  g.dt = 2e-4;
  KernelSpec k{KernelKind::riesz, 0.5, 1.0, 1};
  SigmaSpec s{SigmaKind::table, 1.0, 1.0, 1.0, {-1e3, 1e3}, {1.0, 1.0}};
  const int steps = 40;
  auto amp = spectral_amplitudes(g, k);
  double var = 0.0;
  for (int q = 0; q < g.n; ++q) {
    double kk = signed_wavenumber(q, g.n);
    double tail = 0.0;
    for (int j = 1; j <= steps; ++j) tail += std::exp(-4.0 * kPi * kPi * kk * kk * g.dt * j);
    var += g.dt * amp[q] * amp[q] * tail;
  }
  NoiseSampler ns(g, k, g.dt);
  std::vector<double> dw(g.size());
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  const int replicas = 400;
  for (int r = 0; r < replicas; ++r) {
    Field u = initial_field(g, U0Spec::constant(0.0));
    Stepper st(g, s);
    for (int m = 0; m < steps; ++m) {
      ns.sample(RngStream{7, std::uint64_t(r), std::uint64_t(m)}, dw);
      st.step(u.values, dw);
    }
    double rs = 0.0;
    for (double v : u.values) rs += v * v;
    rs /= g.n;
    sum += rs;
    sum2 += rs * rs;
    ++count;
  }
  double mean = sum / count;
  double se = std::sqrt((sum2 / count - mean * mean) / count);
  EXPECT_NEAR(mean, var, 5.0 * se);
}

TEST(Stepper, BlowUpReportsStep) {
  GridSpec g;
  g.n = 8;
  g.dt = 1e-3;
  Stepper st(g, SigmaSpec::lipschitz_linear(1.0));
  std::vector<double> u(8, 1.0), dw(8, 1e300);
  st.step(u, dw, 0);
  dw.assign(8, 1e300);
  try {
    st.step(u, dw, 17);
    FAIL();
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.step(), 17);
    EXPECT_EQ(e.kind(), ErrorKind::blow_up);
  }
}

TEST(Stepper, ClipCountsAndClamps) {
  GridSpec g;
  g.n = 8;
  g.dt = 1e-3;
  Stepper st(g, SigmaSpec::viot(1.0), true);
  std::vector<double> u{-0.5, -0.5, -0.5, -0.5, 1.5, 1.5, 1.5, 1.5}, dw(8, 0.0);
  st.step(u, dw);
  for (double v : u) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_GT(st.clip_stats().count, 0);
  EXPECT_GT(st.clip_stats().max_magnitude, 0.0);
  Stepper plain(g, SigmaSpec::viot(1.0), false);
  std::vector<double> w{-0.5, -0.5, -0.5, -0.5, 1.5, 1.5, 1.5, 1.5};
  plain.step(w, dw);
  EXPECT_EQ(plain.clip_stats().count, 0);
  EXPECT_LT(*std::min_element(w.begin(), w.end()), 0.0);
}

TEST(Simulate, DeterministicAndReplicaDependent) {
  auto spec = base_spec(64, 1e-4, 0.01);
  auto times = lattice_times(spec.grid, 20, 100, 20);
  auto a = simulate(spec, 3, times), b = simulate(spec, 3, times), c = simulate(spec, 4, times);
  ASSERT_EQ(a.fields.size(), 5u);
  EXPECT_EQ(a.steps, (std::vector<long>{20, 40, 60, 80, 100}));
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    EXPECT_EQ(a.fields[i].values, b.fields[i].values);
    EXPECT_NE(a.fields[i].values, c.fields[i].values);
  }
  EXPECT_EQ(a.fingerprint, spec.fingerprint());
}

TEST(Simulate, SnapshotsMatchSteppingByHand) {
  auto spec = base_spec(32, 1e-4, 0.01);
  auto tr = simulate(spec, 0, {10 * spec.grid.step()});
  Field u = initial_field(spec.grid, spec.u0);
  Stepper st(spec.grid, spec.sigma);
  NoiseSampler ns(spec.grid, spec.kernel, spec.grid.step());
  std::vector<double> dw(spec.grid.size());
  for (std::uint64_t m = 0; m < 10; ++m) {
    ns.sample(RngStream{spec.seed, 0, m}, dw);
    st.step(u.values, dw);
  }
  EXPECT_EQ(tr.fields[0].values, u.values);
}

TEST(Simulate, SnapshotTimesMustBeOnLattice) {
  GridSpec g;
  g.dt = 0.01;
  EXPECT_EQ(snapshot_steps(g, {0.0, 0.05, 0.1}), (std::vector<long>{0, 5, 10}));
  try {
    snapshot_steps(g, {0.015});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
  EXPECT_THROW(snapshot_steps(g, {0.05, 0.05}), Error);
  EXPECT_THROW(snapshot_steps(g, {0.05, 0.01}), Error);
}

TEST(SimulatePair, ZeroDeltaGivesIdenticalLegs) {
  PairSpec ps;
  ps.base = base_spec(64, 1e-4, 0.01);
  ps.delta = 0.0;
  auto pt = simulate_pair(ps, 1, lattice_times(ps.base.grid, 25, 100, 25));
  for (const auto& d : pt.diff)
    for (double v : d.values) EXPECT_EQ(v, 0.0);
}

TEST(SimulatePair, LegOneMatchesSingleRun) {
  PairSpec ps;
  ps.base = base_spec(64, 1e-4, 0.01);
  ps.delta = 0.05;
  auto times = lattice_times(ps.base.grid, 50, 100, 50);
  auto single = simulate(ps.base, 2, times);
  std::vector<std::vector<double>> leg1;
  simulate_pair_stream(ps, 2, times, [&](long, double, std::span<const double> a, std::span<const double>) {
    leg1.emplace_back(a.begin(), a.end());
  });
  ASSERT_EQ(leg1.size(), 2u);
  EXPECT_EQ(leg1[0], single.fields[0].values);
  EXPECT_EQ(leg1[1], single.fields[1].values);
  auto pt = simulate_pair(ps, 2, times);
  double mx = 0.0;
  for (double v : pt.diff.back().values) mx = std::max(mx, std::abs(v));
  EXPECT_GT(mx, 0.0);
  EXPECT_NE(pt.fingerprint, fingerprint(ps.base.describe()));
}

TEST(InitialField, ProfilesAndFileRoundTrip) {
  GridSpec g;
  g.n = 32;
  auto c = initial_field(g, U0Spec::constant(0.25));
  for (double v : c.values) EXPECT_EQ(v, 0.25);
  auto b = initial_field(g, U0Spec::bump(0.5, 0.1, 2.0));
  EXPECT_DOUBLE_EQ(b.values[16], 2.0);
  EXPECT_EQ(b.values[0], 0.0);
  EXPECT_EQ(b.values[12], 0.0);  // distance 0.125 > width

  auto dir = temp_dir("u0");
  std::filesystem::create_directories(dir);
  auto path = (dir / "u0.bin").string();
  auto s = initial_field(g, U0Spec::sine(2, 0.3, 0.1));
  write_initial_field(path, s);
  EXPECT_EQ(initial_field(g, U0Spec::file(path)).values, s.values);
  GridSpec other = g;
  other.n = 64;
  try {
    initial_field(other, U0Spec::file(path));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
  }
  std::filesystem::remove_all(dir);
}

TEST(InitialField, RejectsBadGrid) {
  GridSpec g;
  g.n = 48;
  EXPECT_THROW(initial_field(g, U0Spec::constant(0.0)), Error);
  EXPECT_THROW(parse_u0_kind("triangle"), Error);
}

TEST(Dump, WritesRecordsAndManifest) {
  auto spec = base_spec(16, 1e-4, 0.001);
  auto tr = simulate(spec, 5, lattice_times(spec.grid, 5, 10, 5));
  auto dir = temp_dir("dump");
  auto names = dump_trajectory(tr, spec, dir, KeyValues{{"run.command", "simulate"}});
  ASSERT_EQ(names.size(), 3u);
  EXPECT_EQ(names[0], "r0005_s00000005.bin");
  auto rec = read_field((dir / names[1]).string());
  EXPECT_EQ(rec.values, tr.fields[1].values);
  EXPECT_EQ(rec.stream, (RngStream{spec.seed, 5, 10}));
  std::ifstream is(dir / "manifest.txt");
  std::stringstream ss;
  ss << is.rdbuf();
  std::string m = ss.str();
  EXPECT_NE(m.find("fingerprint = " + tr.fingerprint), std::string::npos) << m;
  EXPECT_NE(m.find("run.command"), std::string::npos);
  EXPECT_NE(m.find("clip.count"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(SimulationSpec, FingerprintTracksConfig) {
  auto a = base_spec(64, 1e-4, 0.01);
  auto b = a;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.seed = 43;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  b = a;
  b.kernel.alpha = 0.6;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

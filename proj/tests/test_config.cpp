#include <gtest/gtest.h>

#include "spdelab/config.hpp"

using namespace spdelab;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::oracle;
}

}  // namespace

TEST(Fingerprint, Fnv1aKnownAnswers) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}

TEST(Fingerprint, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02e23, -0.0, 1e-300}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Config, ParsesCommentsAndWhitespace) {
  auto c = Config::parse(
      "# header\n"
      "grid.n = 512   # trailing comment\n"
      "\n"
      "  kernel.alpha=0.3\n"
      "kernel.kind = riesz\r\n"
      "run.seed = 0x10\n"
      "small.eps_cells = 4, 8 ,16\n"
      "solver.clip = yes\n");
  EXPECT_EQ(c.integer("grid.n", 0), 512);
  EXPECT_DOUBLE_EQ(c.num("kernel.alpha", 0.0), 0.3);
  EXPECT_EQ(c.str("kernel.kind", ""), "riesz");
  EXPECT_EQ(c.u64("run.seed", 0), 16u);
  EXPECT_EQ(c.int_list("small.eps_cells", {}), (std::vector<int>{4, 8, 16}));
  EXPECT_TRUE(c.flag("solver.clip", false));
  EXPECT_EQ(c.num("grid.l", 2.5), 2.5);
}

TEST(Config, LineOrderDoesNotChangeFingerprint) {
  auto a = Config::parse("grid.n = 64\nkernel.alpha = 0.5\nsigma.kind = sqrt-plus\n");
  auto b = Config::parse("sigma.kind = sqrt-plus\n# reordered\nkernel.alpha = 0.5\ngrid.n = 64\n");
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.canonical(), b.canonical());
  b.set("grid.n", "128");
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(Config, LaterLinesAndOverridesWin) {
  auto c = Config::parse("grid.n = 64\ngrid.n = 128\n");
  EXPECT_EQ(c.integer("grid.n", 0), 128);
  c.set_line("grid.n=256");
  EXPECT_EQ(c.integer("grid.n", 0), 256);
}

TEST(Config, Errors) {
  EXPECT_EQ(kind_of([] { Config::parse("grid.n 64\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { Config::parse("nosection = 1\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { Config::parse("grid.n = sixty\n").integer("grid.n", 0); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { Config::parse("kernel.alpha = 0.5x\n").num("kernel.alpha", 0); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { Config::parse("solver.clip = maybe\n").flag("solver.clip", false); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { Config::parse("grid.typo = 1\n").check_known({"grid.n"}); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { Config::load("/nonexistent/spdelab.cfg"); }), ErrorKind::parse);
}

TEST(Config, BuildsSimulationSpec) {
  auto c = Config::parse(
      "grid.n = 128\ngrid.t_end = 0.01\nkernel.kind = riesz\nkernel.alpha = 0.4\n"
      "sigma.kind = holder-power\nsigma.gamma = 0.7\nu0.kind = sine\nu0.k = 2\n");
  auto s = simulation_from(c, 99);
  EXPECT_EQ(s.grid.n, 128);
  EXPECT_DOUBLE_EQ(s.grid.t_min, 0.001);
  EXPECT_EQ(s.kernel.kind, KernelKind::riesz);
  EXPECT_DOUBLE_EQ(s.kernel.alpha, 0.4);
  EXPECT_EQ(s.sigma.kind, SigmaKind::holder_power);
  EXPECT_DOUBLE_EQ(s.sigma.gamma, 0.7);
  EXPECT_EQ(s.u0.kind, U0Kind::sine);
  EXPECT_EQ(s.u0.k, 2);
  EXPECT_EQ(s.seed, 99u);
}

TEST(Config, RejectsInvalidSpecs) {
  EXPECT_EQ(kind_of([] { grid_from(Config::parse("grid.n = 100\n")); }), ErrorKind::precondition);
  EXPECT_EQ(kind_of([] { kernel_from(Config::parse("kernel.kind = gaussian\n"), 1); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { sigma_from(Config::parse("sigma.kind = holder-power\nsigma.gamma = 1.5\n")); }),
            ErrorKind::precondition);
}

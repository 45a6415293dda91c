#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("spdelab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Result run(const std::string& args, const std::string& env = "") {
  auto log = fs::temp_directory_path() / "spdelab_cli_stdout.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + "\"" SPDELAB_CLI_PATH "\" " + args + " > \"" + log.string() +
                    "\" 2>&1";
  int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(log);
  return r;
}

}  // namespace

TEST(Cli, RegimeExample) {
  auto dir = scratch("regime");
  auto r = run("regime --set kernel.alpha=0.5 --set sigma.kind=holder-power --set sigma.gamma=0.8 --out " +
               dir.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("proven-unique-holder", 0), 0u) << r.out;
  auto csv = slurp(dir / "regime.csv");
  EXPECT_NE(csv.find(",proven-unique-holder,"), std::string::npos);
  auto manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("fingerprint = "), std::string::npos) << manifest;

  auto open = run("regime --set kernel.alpha=0.5 --set sigma.kind=holder-power --set sigma.gamma=0.7 --out " +
                  dir.string());
  EXPECT_EQ(open.out.rfind("open", 0), 0u) << open.out;
  auto yw = run("regime --set kernel.kind=bounded-constant --set sigma.kind=viot --out " + dir.string());
  EXPECT_EQ(yw.out.rfind("proven-unique-yw-bounded", 0), 0u) << yw.out;
}

TEST(Cli, ExitCodes) {
  auto dir = scratch("codes");
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("regime --bogus-flag").code, 2);
  EXPECT_EQ(run("regime --set kernel.typo=1 --out " + dir.string()).code, 2);
  EXPECT_EQ(run("regime --set kernel.alpha=abc --out " + dir.string()).code, 2);
  EXPECT_EQ(run("regime --config /nonexistent.cfg --out " + dir.string()).code, 2);
  EXPECT_EQ(run("regime --set kernel.alpha=-1 --out " + dir.string()).code, 3);
  EXPECT_EQ(run("simulate --set grid.n=48 --out " + dir.string()).code, 3);
  EXPECT_EQ(run("noise-check --set kernel.alpha=1.5 --replicas 2 --out " + dir.string()).code, 3);
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, GatedFailureExitsOne) {
  auto dir = scratch("gate");
  auto args = "noise-check --set grid.n=64 --replicas 2 --seed 1 --out " + dir.string();
  auto ungated = run(args);
  EXPECT_EQ(ungated.code, 0);
  EXPECT_NE(ungated.out.find("gate: FAIL"), std::string::npos) << ungated.out;
  EXPECT_EQ(run(args + " --gated").code, 1);
}

TEST(Cli, ConfigFileAndOverrides) {
  auto dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# regime inputs\nkernel.alpha = 0.5\nsigma.kind = holder-power\nsigma.gamma = 0.7\n";
  }
  auto base = run("regime --config " + (dir / "run.cfg").string() + " --out " + dir.string());
  EXPECT_EQ(base.out.rfind("open", 0), 0u) << base.out;
  auto over = run("regime --config " + (dir / "run.cfg").string() + " --set sigma.gamma=0.9 --out " + dir.string());
  EXPECT_EQ(over.out.rfind("proven-unique-holder", 0), 0u) << over.out;
}

TEST(Cli, SimulateIsReproducibleAcrossRunsAndThreads) {
  const std::string common =
      "simulate --set grid.n=64 --set grid.t_end=0.005 --set grid.dt=0.0001 --set sigma.kind=sqrt-plus "
      "--set u0.kind=constant --set u0.value=0.5 --replicas 3 --seed 0x2a --out ";
  auto a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  ASSERT_EQ(run(common + a.string(), "SPDELAB_THREADS=1").code, 0);
  ASSERT_EQ(run(common + b.string(), "SPDELAB_THREADS=1").code, 0);
  ASSERT_EQ(run(common + c.string(), "SPDELAB_THREADS=3").code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
    EXPECT_EQ(slurp(e.path()), slurp(c / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 6u);
  EXPECT_TRUE(fs::exists(a / "replica_0002"));
}

TEST(Cli, YwSubcommand) {
  auto dir = scratch("yw");
  auto r = run("yw --n 3 --rho sqrt --gated --out " + dir.string());
  EXPECT_EQ(r.code, 0) << r.out;
  auto csv = slurp(dir / "yw.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4) << csv;
  EXPECT_EQ(run("yw --n 3 --rho cubic --out " + dir.string()).code, 2);
}

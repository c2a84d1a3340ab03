#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ssg/cli.hpp"
#include "ssg/driver.hpp"
#include "ssg/parallel.hpp"
#include "ssg/snapshot_io.hpp"

using namespace ssg;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig small_config() {
  SolverConfig c;
  c.n1 = c.n2 = 32;
  c.n3 = 9;
  c.ctilde = 1.0;
  c.pair_budget = 2048;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "ssg_driver_tests" / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

SpectralField2D run_to(const SpectralField2D& theta0, const SolverConfig& cfg, double t_end, int steps,
                       int picard = 2) {
  SolverConfig c = cfg;
  c.picard_iters_per_step = picard;
  c.check_bounds = false;
  const NDOptions nd = c.nd_options();
  StepState s = initial_state(theta0, c, nd);
  for (int n = 1; n <= steps; ++n) s = step(s, t_end * n / steps, c, nd).state;
  return s.theta;
}

}  // namespace

TEST(Step, ZeroIsSteady) {
  const SolverConfig c = small_config();
  const NDOptions nd = c.nd_options();
  const StepState s = initial_state(SpectralField2D(c.grid()), c, nd);
  const StepResult r = step(s, 0.1, c, nd);
  EXPECT_EQ(r.state.theta.max_abs_coeff(), 0.0);
  EXPECT_EQ(r.record.w_inf, 0.0);
  EXPECT_GE(r.record.worst_bound_margin, 0.0);
}

TEST(Step, SingleModeIsSteady) {
  // theta = eps cos(2 pi x1) drives w = (0, w2(x1)), so w . grad theta = 0.
  for (int n : {32, 64}) {
    SolverConfig c = small_config();
    c.n1 = c.n2 = n;
    SpectralField2D theta(c.grid());
    theta.set_coeff(1, 0, {0.5e-3, 0.0});
    const NDOptions nd = c.nd_options();
    const StepState s = initial_state(theta, c, nd);
    EXPECT_NEAR(s.w.w2.coeff(1, 0).imag(), 0.5e-3 / std::tanh(2 * kPi), 1e-18);
    const StepResult r = step(s, 0.05, c, nd);
    EXPECT_LT((r.state.theta - theta).max_abs_coeff(), 1e-15);
  }
}

TEST(Step, NextTimePolicies) {
  SolverConfig c = small_config();
  c.t_end = 0.35;
  c.dt = 0.1;
  c.dt_policy = DtPolicy::Fixed;
  const StepState zero = initial_state(SpectralField2D(c.grid()), c, c.nd_options());
  EXPECT_DOUBLE_EQ(next_time(0, zero, c), 0.1);
  EXPECT_EQ(next_time(3, zero, c), 0.35);
  c.dt_policy = DtPolicy::Cfl;
  EXPECT_DOUBLE_EQ(next_time(0, zero, c), 0.1);  // no velocity: capped by dt
  SpectralField2D theta(c.grid());
  theta.set_coeff(1, 0, {0.1, 0.0});
  const StepState s = initial_state(theta, c, c.nd_options());
  EXPECT_NEAR(next_time(0, s, c), 0.5 / 32 / s.w.max_speed(), 1e-15);
}

TEST(Step, SecondOrderInTime) {
  const SolverConfig c = small_config();
  const SpectralField2D theta0 = random_band_limited(c.grid(), 5, 1, 0.1);
  const SpectralField2D a = run_to(theta0, c, 0.4, 2);
  const SpectralField2D b = run_to(theta0, c, 0.4, 4);
  const SpectralField2D d = run_to(theta0, c, 0.4, 8);
  const double ratio = std::sqrt((a - b).l2_squared() / (b - d).l2_squared());
  EXPECT_GE(std::log2(ratio), 1.8) << ratio;
}

TEST(Step, PicardRefinementIsBelowTruncation) {
  const SolverConfig c = small_config();
  const SpectralField2D theta0 = random_band_limited(c.grid(), 6, 2, 0.05);
  const SpectralField2D m2 = run_to(theta0, c, 0.1, 1, 2);
  const SpectralField2D m3 = run_to(theta0, c, 0.1, 1, 3);
  const SpectralField2D m4 = run_to(theta0, c, 0.1, 1, 4);
  // truncation error of one M = 2 step, estimated by halving it
  const SpectralField2D half = run_to(theta0, c, 0.1, 2, 2);
  const double refine = std::sqrt((m2 - m4).l2_squared());
  EXPECT_LT(refine, std::sqrt((m2 - half).l2_squared()));
  EXPECT_LT(std::sqrt((m3 - m4).l2_squared()), 0.1 * refine);
}

TEST(Step, ThreadCountDoesNotChangeBits) {
  const SolverConfig c = small_config();
  const SpectralField2D theta0 = random_band_limited(c.grid(), 7, 3, 0.05);
  set_num_threads(1);
  const SpectralField2D one = run_to(theta0, c, 0.1, 2);
  set_num_threads(8);
  const SpectralField2D eight = run_to(theta0, c, 0.1, 2);
  set_num_threads(1);
  EXPECT_EQ(std::memcmp(one.data().data(), eight.data().data(), one.data().size_bytes()), 0);
}

TEST(Evolve, ZeroRunWritesZeroSnapshots) {
  SolverConfig c = small_config();
  c.t_end = 0.25;
  c.dt = 0.05;
  c.snapshot_every = 2;
  const fs::path dir = fresh_dir("zero");
  const RunSummary s = evolve(SpectralField2D(c.grid()), c, dir);
  EXPECT_EQ(s.status, RunStatus::Completed);
  EXPECT_EQ(s.steps, 5);
  EXPECT_EQ(s.t, 0.25);
  for (const char* f : {"theta_00000000.ssgf", "theta_00000002.ssgf", "theta_00000004.ssgf",
                        "theta_00000005.ssgf", "phi_00000005.ssg3", "run.cfg", "bounds.csv"}) {
    ASSERT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(read_spectral_field(dir / "theta_00000005.ssgf").max_abs_coeff(), 0.0);
  EXPECT_EQ(slurp(dir / "snapshots.csv").substr(0, 28), "step,t,theta_file,phi_file\n0");
}

TEST(Evolve, DiagnoseReproducesBitwise) {
  SolverConfig c = small_config();
  c.t_end = 0.3;
  c.dt = 0.05;
  c.snapshot_every = 4;
  c.theta0 = Theta0Spec::parse("random:3,2,0.05");
  const fs::path dir = fresh_dir("replay");
  const RunSummary s = evolve(make_theta0(c.theta0, c.grid()), c, dir);
  ASSERT_EQ(s.status, RunStatus::Completed);
  const DiagnoseSummary d = diagnose(dir);
  EXPECT_TRUE(d.reproduced) << (d.mismatches.empty() ? "" : d.mismatches.front());
  EXPECT_TRUE(d.bounds_hold);
  EXPECT_EQ(d.steps, s.steps);
  EXPECT_EQ(slurp(dir / "diagnostics.csv"), slurp(dir / "diagnostics_recomputed.csv"));
  EXPECT_EQ(slurp(dir / "bounds.csv"), slurp(dir / "bounds_recomputed.csv"));

  // rows: header plus one per step; mean stays at rounding level
  std::istringstream rows(slurp(dir / "diagnostics.csv"));
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, DiagnosticsRecord::csv_header());
  int count = 0;
  while (std::getline(rows, line)) {
    ++count;
    EXPECT_LT(std::abs(std::stod(line.substr(line.find(',') + 1))), 1e-10);
  }
  EXPECT_EQ(count, s.steps + 1);
}

TEST(Evolve, DiagnoseDetectsTampering) {
  SolverConfig c = small_config();
  c.t_end = 0.1;
  c.dt = 0.05;
  c.theta0 = Theta0Spec::parse("random:4,2,0.05");
  const fs::path dir = fresh_dir("tamper");
  evolve(make_theta0(c.theta0, c.grid()), c, dir);
  SpectralField2D t = read_spectral_field(dir / "theta_00000002.ssgf");
  t.data()[5] += Complex(1e-15, 0.0);
  write_field(dir / "theta_00000002.ssgf", t);
  EXPECT_FALSE(diagnose(dir).reproduced);
}

TEST(Evolve, DivergenceStopsWithCheckpoint) {
  SolverConfig c = small_config();
  c.t_end = 0.1;
  c.theta0 = Theta0Spec::parse("random:5,4,20");
  const fs::path dir = fresh_dir("diverge");
  const RunSummary s = evolve(make_theta0(c.theta0, c.grid()), c, dir);
  EXPECT_EQ(s.status, RunStatus::Diverged);
  EXPECT_TRUE(fs::exists(dir / "theta_00000000.ssgf"));
  EXPECT_TRUE(fs::exists(dir / "nd_failure.csv"));
}

TEST(Cli, ExitCodes) {
  const fs::path base = fresh_dir("cli");
  const std::string out = (base / "bvp").string();
  EXPECT_EQ(cli_main({"ssg"}), kExitUsage);
  EXPECT_EQ(cli_main({"ssg", "evolve", "--out", out, "--theta0", "mode:0,0,1"}), kExitUsage);
  EXPECT_EQ(cli_main({"ssg", "evolve", "--out", out, "--resolution", "31x32x9"}), kExitUsage);
  EXPECT_EQ(cli_main({"ssg", "evolve", "--out", out, "--bogus"}), kExitUsage);
  EXPECT_EQ(cli_main({"ssg", "solve-bvp", "--out", out, "--theta0", "mode:1,0,0.001",
                      "--resolution", "32x32x17", "--set", "ctilde=1"}),
            kExitOk);
  const SpectralField2D trace = read_spectral_field(base / "bvp" / "trace.ssgf");
  EXPECT_NEAR(trace.coeff(1, 0).real() * 2, 0.001 / std::tanh(2 * kPi) / (2 * kPi), 1e-17);
  EXPECT_EQ(cli_main({"ssg", "solve-bvp", "--out", out, "--theta0", "random:5,4,20",
                      "--resolution", "32x32x9", "--set", "ctilde=1"}),
            kExitDivergence);
  const std::string run = (base / "run").string();
  EXPECT_EQ(cli_main({"ssg", "evolve", "--out", run, "--theta0", "random:1,2,0.01", "--resolution",
                      "32x32x9", "--t-end", "0.1", "--dt", "0.05", "--set", "ctilde=1",
                      "--set", "bound_tolerance=-1e6"}),
            kExitBoundViolation);
  EXPECT_EQ(cli_main({"ssg", "diagnose", "--out", run}), kExitBoundViolation);
  EXPECT_EQ(cli_main({"ssg", "diagnose", "--out", (base / "nowhere").string()}), kExitFailure);
}

#ifdef SSG_CLI_PATH
TEST(Cli, BinaryZeroRun) {
  const fs::path dir = fresh_dir("binary");
  const std::string cmd = std::string(SSG_CLI_PATH) + " evolve --theta0 mode:1,0,0 --t-end 1 --out " +
                          dir.string() + " --resolution 16x16x9 --set ctilde=1 > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(read_spectral_field(dir / "theta_00000100.ssgf").max_abs_coeff(), 0.0);
}
#endif

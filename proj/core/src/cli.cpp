#include "ssg/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ssg/config.hpp"
#include "ssg/driver.hpp"
#include "ssg/nd_map.hpp"
#include "ssg/parallel.hpp"
#include "ssg/snapshot_io.hpp"

namespace ssg {

namespace {

struct CommonFlags {
  std::string config;
  std::string theta0;
  std::string out;
  std::string resolution;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<int> picard;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> set;

  void attach(CLI::App* app, bool run_options) {
    app->add_option("--config", config, "key=value configuration file");
    app->add_option("--theta0", theta0, "file:PATH | mode:k1,k2,amp | random:seed,band,amp");
    app->add_option("--out", out, "output directory")->required();
    app->add_option("--resolution", resolution, "N1xN2xN3");
    app->add_option("--seed", seed, "seed of a random: initial datum");
    app->add_option("--threads", threads, "worker threads (0 = default)");
    app->add_option("--set", set, "extra key=value configuration entries");
    if (run_options) {
      app->add_option("--dt", dt, "fixed step, or the step cap under the CFL policy");
      app->add_option("--t-end", t_end, "final time");
      app->add_option("--picard", picard, "velocity refreshes per step");
    }
  }

  SolverConfig resolve() const {
    ConfigMap entries;
    if (!config.empty()) entries = read_config_file(config);
    auto put = [&](const char* key, const std::string& v) { entries[key] = v; };
    auto num = [](double x) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return std::string(buf);
    };
    for (const std::string& kv : set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      entries[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!theta0.empty()) put("theta0", theta0);
    if (!resolution.empty()) put("resolution", resolution);
    if (dt) put("dt", num(*dt));
    if (t_end) put("t_end", num(*t_end));
    if (picard) put("picard", std::to_string(*picard));
    if (seed) put("seed", std::to_string(*seed));
    if (threads) put("threads", std::to_string(*threads));
    SolverConfig cfg = apply_config(entries);
    cfg.validate();
    return cfg;
  }
};

int run_solve_bvp(const CommonFlags& flags) {
  const SolverConfig cfg = flags.resolve();
  if (cfg.threads > 0) set_num_threads(cfg.threads);
  SpectralField2D theta = make_theta0(cfg.theta0, cfg.grid());
  if (std::abs(theta.mean()) > 1e-10)
    std::cerr << "warning: theta has mean " << theta.mean() << "; it is removed\n";
  theta.data()[0] = Complex(0.0, 0.0);

  const std::filesystem::path out = flags.out;
  std::filesystem::create_directories(out);
  const NDOptions nd = cfg.nd_options();
  try {
    const NDSolution sol = solve_nonlinear_bvp(theta, cfg.n3, nd);
    write_strip(out / "phi.ssg3", sol.phi);
    write_field(out / "trace.ssgf", dirichlet_trace(sol.phi, Boundary::Upper));
    std::ofstream os(out / "nd_report.csv");
    sol.report.write_csv(os);
    if (!os) throw IoError("write failed: " + (out / "nd_report.csv").string());
    std::printf("iterations=%d residual=%.3e converged=%s\n", sol.report.iterations,
                sol.report.final_residual(), sol.report.converged ? "yes" : "no");
    if (sol.report.outside_ball)
      std::cerr << "warning: data proxy " << sol.report.data_norm << " exceeds ball radius "
                << nd.ball.r2 << '\n';
    return kExitOk;
  } catch (const DivergenceError& e) {
    std::ofstream os(out / "nd_report.csv");
    e.report().write_csv(os);
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  }
}

int run_evolve(const CommonFlags& flags) {
  const SolverConfig cfg = flags.resolve();
  const SpectralField2D theta0 = make_theta0(cfg.theta0, cfg.grid());
  const RunSummary s = evolve(theta0, cfg, flags.out);
  std::printf("steps=%d t=%.17g worst_bound_margin=%.6e\n", s.steps, s.t, s.worst_bound_margin);
  if (!s.message.empty()) std::cerr << s.message << '\n';
  return static_cast<int>(s.status);
}

int run_diagnose(const std::string& dir) {
  const DiagnoseSummary s = diagnose(dir);
  for (const auto& m : s.mismatches) std::cerr << "mismatch: " << m << '\n';
  std::printf("steps=%d reproduced=%s worst_bound_margin=%.6e\n", s.steps,
              s.reproduced ? "yes" : "no", s.worst_bound_margin);
  if (!s.reproduced) return kExitFailure;
  return s.bounds_hold ? kExitOk : kExitBoundViolation;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Surface semi-geostrophic solver"};
  app.require_subcommand(1);

  CommonFlags bvp_flags, evolve_flags;
  std::string run_dir;
  CLI::App* bvp = app.add_subcommand("solve-bvp", "one nonlinear Neumann-to-Dirichlet solve");
  bvp_flags.attach(bvp, false);
  CLI::App* ev = app.add_subcommand("evolve", "time evolution with snapshots and diagnostics");
  evolve_flags.attach(ev, true);
  CLI::App* dg = app.add_subcommand("diagnose", "replay a run and check its stored artifacts");
  dg->add_option("--out", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bvp) return run_solve_bvp(bvp_flags);
    if (*ev) return run_evolve(evolve_flags);
    return run_diagnose(run_dir);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const DimensionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& a : storage) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ssg

#include "ssg/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "ssg/holder.hpp"
#include "ssg/parallel.hpp"
#include "ssg/snapshot_io.hpp"

namespace ssg {

namespace {

constexpr double kMeanWarning = 1e-10;

std::string step_name(const char* prefix, int step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%08d.%s", prefix, step, ext);
  return buf;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void remove_mean(SpectralField2D& f) { f.data()[0] = Complex(0.0, 0.0); }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot open " + p.string() + " for writing");
  return os;
}

void check_stream(const std::ostream& os, const std::filesystem::path& p) {
  if (!os) throw IoError("write failed: " + p.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw IoError("cannot open " + p.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

bool same_bits(const SpectralField2D& a, const SpectralField2D& b) {
  if (!(a.grid() == b.grid())) return false;
  const auto x = a.data();
  const auto y = b.data();
  return std::equal(x.begin(), x.end(), y.begin(), [](Complex p, Complex q) {
    return std::memcmp(&p, &q, sizeof p) == 0;
  });
}

bool same_bits(const StripField3D& a, const StripField3D& b) {
  if (!(a.grid() == b.grid())) return false;
  for (int j = 0; j < a.n3(); ++j)
    if (!same_bits(a.level(j), b.level(j))) return false;
  return true;
}

struct SnapshotEntry {
  int step = 0;
  double t = 0.0;
  std::string theta_file;
  std::string phi_file;
};

std::vector<SnapshotEntry> read_snapshot_index(const std::filesystem::path& p) {
  const auto lines = read_lines(p);
  std::vector<SnapshotEntry> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::istringstream is(lines[i]);
    SnapshotEntry e;
    std::string step, t;
    if (!std::getline(is, step, ',') || !std::getline(is, t, ',') ||
        !std::getline(is, e.theta_file, ',') || !std::getline(is, e.phi_file))
      throw IoError(p.string() + ": malformed line " + std::to_string(i + 1));
    try {
      e.step = std::stoi(step);
      e.t = std::stod(t);
    } catch (const std::exception&) {
      throw IoError(p.string() + ": malformed line " + std::to_string(i + 1));
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

const char* DiagnosticsRecord::csv_header() {
  return "t,mean,min,max,l2,c1alpha_proxy,w_inf,nd_iters,nd_residual,worst_bound_margin";
}

std::string DiagnosticsRecord::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g", t,
                mean, min, max, l2, c1alpha_proxy, w_inf, nd_iters, nd_residual,
                worst_bound_margin);
  return buf;
}

VelocityField velocity_from_potential(const StripField3D& phi) {
  return VelocityField::from_stream_function(dirichlet_trace(phi, Boundary::Upper));
}

StepState initial_state(const SpectralField2D& theta0, const SolverConfig& cfg,
                        const NDOptions& nd, NDSolveReport* report) {
  SpectralField2D theta = theta0;
  remove_mean(theta);
  NDSolution sol = solve_nonlinear_bvp(theta, cfg.n3, nd);
  if (report) *report = sol.report;
  VelocityField w = velocity_from_potential(sol.phi);
  return {0.0, std::move(theta), std::move(sol.phi), std::move(w)};
}

DiagnosticsRecord make_record(const StepState& s, const SolverConfig& cfg,
                              const NDSolveReport& nd, double worst_bound_margin) {
  DiagnosticsRecord r;
  const GridField g = to_physical(s.theta);
  r.t = s.t;
  r.mean = g.mean();
  r.min = g.min();
  r.max = g.max();
  r.l2 = g.l2();
  r.c1alpha_proxy =
      discrete_holder_norms(s.theta, cfg.alpha, std::max(cfg.pair_budget, g.grid().size()),
                            cfg.norm_seed)
          .c1alpha();
  r.w_inf = s.w.max_speed();
  r.nd_iters = nd.iterations;
  r.nd_residual = nd.final_residual();
  r.worst_bound_margin = worst_bound_margin;
  return r;
}

double next_time(int index, const StepState& s, const SolverConfig& cfg) {
  if (cfg.dt_policy == DtPolicy::Fixed) return std::min((index + 1) * cfg.dt, cfg.t_end);
  const TorusGrid& g = s.theta.grid();
  const double h = std::min(g.dx1(), g.dx2());
  const double w_inf = s.w.max_speed();
  double dt = cfg.dt;
  if (w_inf > 0.0) dt = std::min(dt, cfg.cfl * h / w_inf);
  const double slack = 1e-12 * std::max(1.0, cfg.t_end);
  return s.t + dt >= cfg.t_end - slack ? cfg.t_end : s.t + dt;
}

StepResult step(const StepState& s, double t_next, const SolverConfig& cfg, const NDOptions& nd) {
  if (!(t_next > s.t)) throw DomainError("step: end time must exceed the start time");
  VelocityField w_end = s.w;
  StripField3D phi = s.phi;
  SpectralField2D theta = s.theta;
  NDSolveReport report;
  VelocityTimeline timeline;
  FlowMapBatch flow = FlowMapBatch::identity(s.theta.grid(), t_next);

  for (int m = 1; m <= cfg.picard_iters_per_step; ++m) {
    timeline = VelocityTimeline();
    timeline.add(s.t, s.w);
    timeline.add(t_next, w_end);
    // departure points at t_n of the characteristics through the nodes at t_{n+1}
    flow = integrate_flow(timeline, t_next, s.t, cfl_substeps(timeline, s.t, t_next));
    theta = advect(s.theta, flow);
    remove_mean(theta);
    NDSolution sol = solve_nonlinear_bvp(theta, cfg.n3, nd, &phi);
    phi = std::move(sol.phi);
    report = std::move(sol.report);
    w_end = velocity_from_potential(phi);
  }

  StepResult out{StepState{t_next, std::move(theta), std::move(phi), std::move(w_end)}, {},
                 std::move(report), {}};
  double margin = std::numeric_limits<double>::infinity();
  if (cfg.check_bounds) {
    const double times[] = {s.t, t_next};
    const SpectralField2D thetas[] = {s.theta, out.state.theta};
    const FlowMapBatch flows[] = {flow};
    out.bounds = check_appendix_bounds(times, thetas, timeline, flows,
                                       BoundOptions{cfg.sampling(), 1.05});
    margin = out.bounds.worst_margin();
  }
  out.record = make_record(out.state, cfg, out.nd, margin);
  return out;
}

RunSummary evolve(const SpectralField2D& theta0, const SolverConfig& cfg,
                  const std::filesystem::path& out_dir) {
  cfg.validate();
  if (!(theta0.grid() == cfg.grid())) throw DimensionError("theta0 does not live on the configured grid");
  if (cfg.threads > 0) set_num_threads(cfg.threads);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  {
    auto os = open_out(out_dir / "run.cfg");
    os << cfg.to_text();
    check_stream(os, out_dir / "run.cfg");
  }
  if (std::abs(theta0.mean()) > kMeanWarning)
    std::cerr << "warning: theta0 has mean " << theta0.mean() << "; it is removed\n";

  const NDOptions nd = cfg.nd_options();
  auto diag = open_out(out_dir / "diagnostics.csv");
  auto bounds = open_out(out_dir / "bounds.csv");
  auto index = open_out(out_dir / "snapshots.csv");
  diag << DiagnosticsRecord::csv_header() << '\n';
  bounds << "t,bound_id,lhs,rhs,margin\n";
  index << "step,t,theta_file,phi_file\n";

  int last_snapshot = -1;
  auto snapshot = [&](int n, const StepState& s) {
    const std::string tf = step_name("theta", n, "ssgf");
    const std::string pf = step_name("phi", n, "ssg3");
    write_field(out_dir / tf, s.theta);
    write_strip(out_dir / pf, s.phi);
    index << n << ',' << fmt(s.t) << ',' << tf << ',' << pf << '\n';
    index.flush();
    check_stream(index, out_dir / "snapshots.csv");
    last_snapshot = n;
  };
  auto diverged = [&](const DivergenceError& e, int n, double t) {
    std::ofstream os(out_dir / "nd_failure.csv");
    e.report().write_csv(os);
    RunSummary r;
    r.status = RunStatus::Diverged;
    r.steps = n;
    r.t = t;
    r.message = e.what();
    return r;
  };

  NDSolveReport report;
  std::optional<StepState> initial;
  try {
    initial = initial_state(theta0, cfg, nd, &report);
  } catch (const DivergenceError& e) {
    SpectralField2D theta = theta0;
    remove_mean(theta);
    write_field(out_dir / step_name("theta", 0, "ssgf"), theta);
    return diverged(e, 0, 0.0);
  }
  StepState state = std::move(*initial);
  if (report.outside_ball)
    std::cerr << "warning: |theta0| proxy " << report.data_norm << " exceeds the ball radius "
              << nd.ball.r2 << "; contraction is not guaranteed\n";
  diag << make_record(state, cfg, report, std::numeric_limits<double>::infinity()).csv_row() << '\n';
  snapshot(0, state);

  RunSummary summary;
  summary.worst_bound_margin = std::numeric_limits<double>::infinity();
  int n = 0;
  while (state.t < cfg.t_end) {
    const double t_next = next_time(n, state, cfg);
    std::optional<StepResult> attempt;
    try {
      attempt = step(state, t_next, cfg, nd);
    } catch (const DivergenceError& e) {
      if (last_snapshot != n) snapshot(n, state);
      return diverged(e, n, state.t);
    }
    StepResult& r = *attempt;
    ++n;
    diag << r.record.csv_row() << '\n';
    diag.flush();
    check_stream(diag, out_dir / "diagnostics.csv");
    r.bounds.write_csv(bounds, false);
    summary.worst_bound_margin = std::min(summary.worst_bound_margin, r.record.worst_bound_margin);
    state = std::move(r.state);
    if (n % cfg.snapshot_every == 0 || state.t >= cfg.t_end) snapshot(n, state);
  }
  check_stream(bounds, out_dir / "bounds.csv");

  summary.steps = n;
  summary.t = state.t;
  if (summary.worst_bound_margin < -cfg.bound_tolerance) {
    summary.status = RunStatus::BoundViolation;
    summary.message = "transport bound violated, worst margin " + fmt(summary.worst_bound_margin);
  }
  return summary;
}

DiagnoseSummary diagnose(const std::filesystem::path& run_dir) {
  if (!std::filesystem::exists(run_dir / "run.cfg"))
    throw IoError("no run.cfg in " + run_dir.string());
  const SolverConfig cfg = apply_config(read_config_file(run_dir / "run.cfg"));
  cfg.validate();
  if (cfg.threads > 0) set_num_threads(cfg.threads);
  const NDOptions nd = cfg.nd_options();
  const auto entries = read_snapshot_index(run_dir / "snapshots.csv");
  if (entries.empty() || entries.front().step != 0) throw IoError("run has no step-0 snapshot");
  const auto stored = read_lines(run_dir / "diagnostics.csv");

  DiagnoseSummary out;
  out.worst_bound_margin = std::numeric_limits<double>::infinity();
  auto diag = open_out(run_dir / "diagnostics_recomputed.csv");
  auto bounds = open_out(run_dir / "bounds_recomputed.csv");
  diag << DiagnosticsRecord::csv_header() << '\n';
  bounds << "t,bound_id,lhs,rhs,margin\n";

  auto compare_row = [&](int n, const std::string& row) {
    const std::size_t line = static_cast<std::size_t>(n) + 1;
    if (line >= stored.size() || stored[line] != row)
      out.mismatches.push_back("diagnostics row for step " + std::to_string(n) + " differs");
  };
  auto load = [&](const SnapshotEntry& e) {
    StripField3D phi = read_strip(run_dir / e.phi_file);
    VelocityField w = velocity_from_potential(phi);
    return StepState{e.t, read_spectral_field(run_dir / e.theta_file), std::move(phi), std::move(w)};
  };

  {
    const StepState s0 = load(entries.front());
    NDSolveReport report;
    const StepState fresh = initial_state(s0.theta, cfg, nd, &report);
    if (!same_bits(fresh.phi, s0.phi)) out.mismatches.push_back("step 0 potential differs");
    const std::string row = make_record(fresh, cfg, report, std::numeric_limits<double>::infinity()).csv_row();
    diag << row << '\n';
    compare_row(0, row);
  }

  for (std::size_t k = 0; k + 1 < entries.size(); ++k) {
    StepState state = load(entries[k]);
    for (int n = entries[k].step; n < entries[k + 1].step; ++n) {
      StepResult r = step(state, next_time(n, state, cfg), cfg, nd);
      const std::string row = r.record.csv_row();
      diag << row << '\n';
      compare_row(n + 1, row);
      r.bounds.write_csv(bounds, false);
      out.worst_bound_margin = std::min(out.worst_bound_margin, r.record.worst_bound_margin);
      state = std::move(r.state);
      ++out.steps;
    }
    const StepState next = load(entries[k + 1]);
    if (!same_bits(state.theta, next.theta) || !same_bits(state.phi, next.phi) || state.t != next.t)
      out.mismatches.push_back("snapshot at step " + std::to_string(entries[k + 1].step) + " differs");
  }
  check_stream(diag, run_dir / "diagnostics_recomputed.csv");
  check_stream(bounds, run_dir / "bounds_recomputed.csv");
  if (stored.size() != static_cast<std::size_t>(out.steps) + 2)
    out.mismatches.push_back("stored diagnostics have " + std::to_string(stored.size()) +
                             " lines, replay produced " + std::to_string(out.steps + 2));
  out.reproduced = out.mismatches.empty();
  out.bounds_hold = !(out.worst_bound_margin < -cfg.bound_tolerance);
  return out;
}

}  // namespace ssg

#pragma once

// Time evolution of the surface semi-geostrophic active scalar
//
//   d_t theta + w . grad theta = 0,   w = grad^perp T[theta],
//
// with a per-step predictor-corrector: the velocity inside a step is linear
// in time between its endpoint fields, and the end field is refreshed from
// the transported scalar picard_iters_per_step times.

#include <filesystem>
#include <string>
#include <vector>

#include "ssg/config.hpp"
#include "ssg/elliptic_strip.hpp"
#include "ssg/fields.hpp"
#include "ssg/nd_map.hpp"
#include "ssg/transport.hpp"

namespace ssg {

struct StepState {
  double t = 0.0;
  SpectralField2D theta;  // zero mean
  StripField3D phi;       // S[theta]
  VelocityField w;        // grad^perp of the upper trace of phi
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double l2 = 0.0;
  double c1alpha_proxy = 0.0;
  double w_inf = 0.0;
  int nd_iters = 0;
  double nd_residual = 0.0;
  double worst_bound_margin = 0.0;  // +inf when no bound was evaluated

  static const char* csv_header();
  std::string csv_row() const;
};

struct StepResult {
  StepState state;
  DiagnosticsRecord record;
  NDSolveReport nd;
  BoundReport bounds;
};

/// grad^perp of the upper trace of phi.
VelocityField velocity_from_potential(const StripField3D& phi);

/// Solves the ND problem for theta0 (whose mean is removed) from a cold start.
StepState initial_state(const SpectralField2D& theta0, const SolverConfig& cfg,
                        const NDOptions& nd, NDSolveReport* report = nullptr);

DiagnosticsRecord make_record(const StepState& s, const SolverConfig& cfg,
                              const NDSolveReport& nd, double worst_bound_margin);

/// End time of step `index` started from s: fixed policy t = (index+1) dt,
/// CFL policy t + min(dt, cfl h / |w|_inf); both clipped to t_end.
double next_time(int index, const StepState& s, const SolverConfig& cfg);

/// One step from s to t_next. Throws DivergenceError from the ND solver.
StepResult step(const StepState& s, double t_next, const SolverConfig& cfg, const NDOptions& nd);

enum class RunStatus { Completed = 0, Diverged = 3, BoundViolation = 4 };

struct RunSummary {
  RunStatus status = RunStatus::Completed;
  int steps = 0;
  double t = 0.0;
  double worst_bound_margin = 0.0;
  std::string message;
};

/// Writes to out_dir: run.cfg, diagnostics.csv, bounds.csv, snapshots.csv and
/// theta_{step:08}.ssgf / phi_{step:08}.ssg3 at step 0, every snapshot_every
/// steps and at the last step (or the last good step before a divergence,
/// together with nd_failure.csv).
RunSummary evolve(const SpectralField2D& theta0, const SolverConfig& cfg,
                  const std::filesystem::path& out_dir);

struct DiagnoseSummary {
  bool reproduced = true;
  bool bounds_hold = true;
  int steps = 0;
  double worst_bound_margin = 0.0;
  std::vector<std::string> mismatches;
};

/// Replays every stored segment of a run from its starting snapshot, writes
/// diagnostics_recomputed.csv and bounds_recomputed.csv, and compares rows
/// and end snapshots bitwise with the stored ones.
DiagnoseSummary diagnose(const std::filesystem::path& run_dir);

}  // namespace ssg

#include "ssg/nd_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>

#include "ssg/monge_ampere.hpp"

namespace ssg {

namespace {

constexpr double kMeanTolerance = 1e-10;
constexpr int kDivergenceStreak = 3;
// Successive differences below this multiple of eps * |iterate| are rounding
// noise; their ratios say nothing about contraction.
constexpr double kRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

// The horizontal mean of M[Phi] vanishes identically, so its discrete value
// is rounding noise proportional to the size of the field.
double compatibility_tolerance(const StripField3D& rhs) {
  double m = 1.0;
  for (int j = 0; j < rhs.n3(); ++j) m = std::max(m, rhs.level(j).max_abs_coeff());
  return kDefaultCompatibilityTolerance * m;
}

void require_zero_mean(const SpectralField2D& theta) {
  if (std::abs(theta.mean()) > kMeanTolerance)
    throw DomainError("Neumann data must have zero mean, got " + std::to_string(theta.mean()));
}

// Tracks successive-difference ratios and flags a run of non-contraction.
class ContractionMonitor {
 public:
  explicit ContractionMonitor(std::vector<double>& history) : history_(history) {}

  /// Returns true once the ratio has been >= 1 kDivergenceStreak times in a row.
  bool push(double diff) {
    if (has_prev_) {
      const double ratio = prev_ > 0.0 ? diff / prev_ : 0.0;
      history_.push_back(ratio);
      streak_ = ratio >= 1.0 ? streak_ + 1 : 0;
    }
    prev_ = diff;
    has_prev_ = true;
    return streak_ >= kDivergenceStreak || !std::isfinite(diff);
  }

 private:
  std::vector<double>& history_;
  double prev_ = 0.0;
  bool has_prev_ = false;
  int streak_ = 0;
};

}  // namespace

BallParams BallParams::from_constant(double ctilde) {
  BallParams b;
  b.ctilde = ctilde;
  b.r1 = 1.0 / (8.0 * ctilde);
  b.r2 = std::min(1.0 / (8.0 * ctilde * ctilde), b.r1 / ctilde - 2.0 * b.r1 * b.r1);
  return b;
}

bool BallParams::valid() const {
  if (!(ctilde > 0.0 && r1 > 0.0 && r2 > 0.0)) return false;
  const double eps = 1e-15;
  return r1 <= 1.0 / (8.0 * ctilde) + eps &&
         r2 <= std::min(1.0 / (8.0 * ctilde * ctilde), r1 / ctilde - 2.0 * r1 * r1) + eps;
}

double default_stability_constant() {
  static std::once_flag once;
  static double value = 0.0;
  std::call_once(once, [] {
    const StripGrid grid(TorusGrid(32, 32), 17);
    value = measure_stability_constant(grid, 9, 2024, PairSampling{0.5, 32 * 32 * 17, 7});
  });
  return value;
}

void NDSolveReport::write_csv(std::ostream& os) const {
  os << "iteration,residual,contraction_factor\n";
  char buf[128];
  for (std::size_t i = 0; i < residual_history.size(); ++i) {
    // contraction ratios start at the second iteration; other rows leave the field empty
    if (i >= 1 && i - 1 < contraction_history.size())
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, residual_history[i],
                    contraction_history[i - 1]);
    else
      std::snprintf(buf, sizeof buf, "%zu,%.17g,\n", i + 1, residual_history[i]);
    os << buf;
  }
}

NDSolution solve_nonlinear_bvp(const SpectralField2D& theta, int n3, const NDOptions& options,
                               const StripField3D* seed) {
  require_zero_mean(theta);
  const StripGrid grid(theta.grid(), n3);
  if (seed && !(seed->grid() == grid)) throw DimensionError("warm start lives on another grid");

  NDSolveReport report;
  if (options.check_ball) {
    const auto& s = options.sampling;
    report.data_norm =
        discrete_holder_norms(theta, s.alpha, std::max(s.pair_budget, theta.grid().size()), s.seed)
            .c1alpha();
    report.outside_ball = report.data_norm > options.ball.r2;
  }

  StripField3D phi = seed ? *seed : StripField3D(grid);
  StripField3D m_phi = monge_ampere_apply(phi);
  ContractionMonitor monitor(report.contraction_history);

  for (int n = 1; n <= options.max_iter; ++n) {
    StripField3D next = solve_poisson(m_phi, theta, compatibility_tolerance(m_phi));
    StripField3D m_next = monge_ampere_apply(next);
    const double residual = strip_sup_norm(m_next - m_phi);
    const double diff = strip_sup_norm(next - phi);
    const double floor = kRoundingFloor * strip_sup_norm(next);
    report.iterations = n;
    report.residual_history.push_back(residual);
    phi = std::move(next);
    m_phi = std::move(m_next);

    if (diff <= floor) {
      report.converged = residual <= options.tolerance;
      break;
    }
    const bool stalled = monitor.push(diff) || !std::isfinite(residual);
    if (residual <= options.tolerance) {
      report.converged = true;
      break;
    }
    if (stalled) {
      report.diverged = true;
      throw DivergenceError("Picard iteration for the ND map is not contracting", report);
    }
  }
  return {std::move(phi), std::move(report)};
}

SpectralField2D nd_apply(const SpectralField2D& theta, int n3, const NDOptions& options,
                         NDSolveReport* report) {
  NDSolution sol = solve_nonlinear_bvp(theta, n3, options);
  if (report) *report = sol.report;
  return dirichlet_trace(sol.phi, Boundary::Upper);
}

StripField3D frechet_apply(const StripField3D& phi, const SpectralField2D& h, double tolerance,
                           int max_iter) {
  require_zero_mean(h);
  StripField3D l(phi.grid());
  std::vector<double> ratios;
  ContractionMonitor monitor(ratios);
  for (int m = 1; m <= max_iter; ++m) {
    const StripField3D rhs = gamma_apply(l, phi);
    StripField3D next = solve_poisson(rhs, h, compatibility_tolerance(rhs));
    const double diff = strip_sup_norm(next - l);
    const double floor = kRoundingFloor * strip_sup_norm(next);
    l = std::move(next);
    if (diff <= tolerance || diff <= floor) return l;
    if (monitor.push(diff)) {
      NDSolveReport r;
      r.iterations = m;
      r.contraction_history = ratios;
      r.diverged = true;
      throw DivergenceError("linearised ND iteration is not contracting", r);
    }
  }
  return l;
}

StripField3D frechet_apply(const SpectralField2D& theta, const SpectralField2D& h, int n3,
                           const NDOptions& options, double tolerance, int max_iter) {
  const NDSolution s = solve_nonlinear_bvp(theta, n3, options);
  return frechet_apply(s.phi, h, tolerance, max_iter);
}

}  // namespace ssg

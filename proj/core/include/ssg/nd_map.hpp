#pragma once

// Nonlinear Neumann-to-Dirichlet map. For boundary data theta the interior
// potential Phi = S[theta] solves
//
//   Lap Phi = M[Phi],  d3 Phi = 0 on x3 = 0,  d3 Phi = theta on x3 = 1,
//   mean(Phi) = 0,
//
// and is found by the Picard iteration Phi_{n+1} = A_theta(M[Phi_n]),
// Phi_0 = 0, where A_theta is solve_poisson with boundary data theta. The
// ND map is the upper trace T[theta] = S[theta]|_{x3=1}.

#include <iosfwd>
#include <optional>
#include <vector>

#include "ssg/elliptic_strip.hpp"
#include "ssg/holder.hpp"

namespace ssg {

/// Radii of the data and solution balls on which the Picard map contracts.
struct BallParams {
  double r1 = 0.0;      // bound for |Phi|_{C^{2,a}}
  double r2 = 0.0;      // bound for |theta|_{C^{1,a}}
  double ctilde = 1.0;  // stability constant of the Poisson solve

  /// Largest radii admitted by a stability constant.
  static BallParams from_constant(double ctilde);
  /// r1 <= 1/(8C), r2 <= min(1/(8C^2), r1/C - 2 r1^2).
  bool valid() const;
};

/// Stability constant measured on the default 32x32x17 suite; used when a
/// configuration does not set one.
double default_stability_constant();

struct NDSolveReport {
  int iterations = 0;
  std::vector<double> residual_history;     // |M[Phi_{n-1}] - M[Phi_n]|_inf
  std::vector<double> contraction_history;  // successive-difference ratios, from n = 2
  bool converged = false;
  bool diverged = false;
  bool outside_ball = false;  // |theta|_{C^{1,a}} proxy exceeded r2 (advisory)
  double data_norm = 0.0;     // the proxy that was compared with r2

  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
  /// One row per iteration: iteration,residual,contraction_factor.
  void write_csv(std::ostream& os) const;
};

struct NDOptions {
  BallParams ball = BallParams::from_constant(1.0);
  double tolerance = 1e-10;
  int max_iter = 50;
  PairSampling sampling{};
  bool check_ball = true;
};

/// Raised when the Picard iteration stops contracting; carries the report.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, NDSolveReport report)
      : Error(what), report_(std::move(report)) {}
  const NDSolveReport& report() const { return report_; }

 private:
  NDSolveReport report_;
};

struct NDSolution {
  StripField3D phi;
  NDSolveReport report;
};

/// Fixed point of Phi -> A_theta(M[Phi]) started from `seed` (zero if
/// absent). Requires a zero-mean theta; throws DivergenceError when the
/// successive-difference ratio is >= 1 three times in a row. Returns with
/// report.converged = false if max_iter is reached first.
NDSolution solve_nonlinear_bvp(const SpectralField2D& theta, int n3, const NDOptions& options,
                               const StripField3D* seed = nullptr);

/// T[theta]: upper trace of the fixed point.
SpectralField2D nd_apply(const SpectralField2D& theta, int n3, const NDOptions& options,
                         NDSolveReport* report = nullptr);

/// Linearisation L[theta](h): solves Lap L = gamma(L, Phi) with d3 L = h on
/// top and 0 below, by the inner iteration L_{m+1} = A_h(gamma(L_m, Phi)).
/// `phi` is S[theta]. Stops when successive iterates differ by <= tolerance
/// in max norm; throws DivergenceError on non-contraction.
StripField3D frechet_apply(const StripField3D& phi, const SpectralField2D& h,
                           double tolerance = 1e-12, int max_iter = 100);

/// Same, computing S[theta] first.
StripField3D frechet_apply(const SpectralField2D& theta, const SpectralField2D& h, int n3,
                           const NDOptions& options, double tolerance = 1e-12,
                           int max_iter = 100);

}  // namespace ssg

#pragma once

// Semi-Lagrangian transport on the torus: characteristics are integrated
// with RK4 through a velocity that is bicubic-Hermite interpolated in space
// (nodal values and derivatives taken spectrally) and linear in time, and
// the scalar is carried by composition theta(x, t) = theta0(F(0, t, x)).

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssg/fields.hpp"
#include "ssg/holder.hpp"

namespace ssg {

struct VelocityField {
  SpectralField2D w1;
  SpectralField2D w2;

  static VelocityField zero(const TorusGrid& grid);
  /// (-d2 psi, d1 psi).
  static VelocityField from_stream_function(const SpectralField2D& psi);

  const TorusGrid& grid() const { return w1.grid(); }
  /// Largest nodal |w|.
  double max_speed() const;
  /// Largest coefficient of the spectral divergence.
  double divergence_defect() const;
};

/// Bicubic Hermite interpolant of a periodic field. Nodal values and
/// first/mixed derivatives come from the spectrum, so the interpolant is
/// C^1, fourth-order accurate and exact at the nodes.
class HermiteInterpolant {
 public:
  explicit HermiteInterpolant(const SpectralField2D& f);

  const TorusGrid& grid() const { return grid_; }
  double operator()(double x1, double x2) const;

 private:
  TorusGrid grid_;
  std::vector<double> f_, fx_, fy_, fxy_;  // derivatives pre-scaled by the spacing
};

/// Velocity known at increasing time levels, linear in time between them.
class VelocityTimeline {
 public:
  void add(double t, const VelocityField& w);

  bool empty() const { return levels_.empty(); }
  double t_min() const;
  double t_max() const;
  const TorusGrid& grid() const;
  std::span<const double> times() const { return times_; }
  const VelocityField& field(std::size_t i) const { return levels_[i].w; }
  std::size_t size() const { return levels_.size(); }

  /// Largest nodal speed over all levels.
  double max_speed() const;

  /// Velocity at (x, t); throws DomainError outside [t_min, t_max].
  std::array<double, 2> operator()(double x1, double x2, double t) const;

 private:
  struct Level {
    VelocityField w;
    HermiteInterpolant u1;
    HermiteInterpolant u2;
  };
  std::vector<double> times_;
  std::vector<Level> levels_;
};

/// Positions at end_time of the characteristics passing through every grid
/// node at start_time, i.e. F(end_time, start_time, x_ij).
struct FlowMapBatch {
  TorusGrid grid;
  double start_time = 0.0;
  double end_time = 0.0;
  std::vector<double> x1, x2;  // wrapped into [0, 1)
  std::vector<double> d1, d2;  // unwrapped displacement F - x

  static FlowMapBatch identity(const TorusGrid& grid, double t);
};

/// RK4 substep count that keeps max_speed * dt_sub <= cells grid spacings.
int cfl_substeps(const VelocityTimeline& w, double t_from, double t_to, double cells = 0.5);

/// One characteristic from (x, t_from) to t_to; returns the unwrapped end point.
std::array<double, 2> trace_point(const VelocityTimeline& w, std::array<double, 2> x,
                                  double t_from, double t_to, int substeps);

/// Characteristics from every node at t_from to t_to. F(t, t, .) is the
/// identity without any integration. Throws DomainError for substeps < 1, a
/// time range outside the timeline, or a non-finite trajectory.
FlowMapBatch integrate_flow(const VelocityTimeline& w, double t_from, double t_to, int substeps);

/// theta0 evaluated at the flow's end points (nodal values).
GridField advect_values(const SpectralField2D& theta0, const FlowMapBatch& flow);
SpectralField2D advect(const SpectralField2D& theta0, const FlowMapBatch& flow);

/// C^0_t C^{1,alpha}_x proxy of the velocity: max over levels of
/// max(|w|, |Dw|) + inflation * [Dw]_alpha (entrywise maxima).
double velocity_norm(const VelocityTimeline& w, const PairSampling& sampling,
                     double seminorm_inflation = 1.05);

struct BoundRecord {
  double t = 0.0;
  std::string bound_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

struct BoundReport {
  std::vector<BoundRecord> records;

  double worst_margin() const;
  bool holds(double tolerance = 1e-6) const { return worst_margin() >= -tolerance; }
  /// Rows t,bound_id,lhs,rhs,margin.
  void write_csv(std::ostream& os, bool header = true) const;
};

struct BoundOptions {
  PairSampling sampling{};
  double seminorm_inflation = 1.05;
};

/// Evaluates both sides of the transport estimates with discrete proxies:
///  a_flow_sup     |F(t,s,.)|_inf        <= diam T^2 + W |t-s|
///  b_flow_grad    |DF(t,s,.)|_inf       <= exp(W |t-s|)
///  c_flow_holder  [DF(t,s,.)]_alpha     <= W |t-s| exp((2+alpha) W |t-s|)
///  A_sup          |theta(t)|_inf        <= N0
///  B_grad         |grad theta(t)|_inf   <= N0 exp(W t)
///  C_grad_holder  [grad theta(t)]_alpha <= N0 exp(2 W t) (2^{(1-alpha)/2} + W t exp(alpha W t))
///  D_c1alpha      |theta(t)|_{C^{1,a}}  <= N0 exp(W t) (1 + 2^{(1-alpha)/2} exp(W t)
///                                                       + W t exp((1+alpha) W t))
/// with W = velocity_norm over the relevant time window, N0 the C^{2,alpha}
/// proxy of thetas[0] and t measured from times[0]. DF uses centred
/// differences of the displacement and the normalised Frobenius norm.
BoundReport check_appendix_bounds(std::span<const double> times,
                                  std::span<const SpectralField2D> thetas,
                                  const VelocityTimeline& w, std::span<const FlowMapBatch> flows,
                                  const BoundOptions& options);

}  // namespace ssg

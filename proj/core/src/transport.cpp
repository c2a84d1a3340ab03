#include "ssg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ssg/error.hpp"

namespace ssg {

namespace {

constexpr double kSnap = 1e-11;       // index-space distance treated as "on the node"
constexpr double kTimeSlack = 1e-12;  // relative slack at the ends of a timeline

double wrap_unit(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

// Splits x (in units of the spacing) into a cell index in [0, n) and an offset in [0, 1).
void locate(double x, int n, int& cell, double& offset) {
  double u = x * n;
  const double r = std::nearbyint(u);
  if (std::abs(u - r) <= kSnap) u = r;
  const double fl = std::floor(u);
  offset = u - fl;
  long long c = static_cast<long long>(fl) % n;
  if (c < 0) c += n;
  cell = static_cast<int>(c);
}

std::vector<double> copy_values(const GridField& f) {
  return {f.values().begin(), f.values().end()};
}

struct VelocityGradient {
  GridField d11, d12, d21, d22;  // d_j w_i stored as d{i}{j}
};

VelocityGradient gradient_of(const VelocityField& w) {
  return {to_physical(spectral_derivative(w.w1, Axis::X1, 1)),
          to_physical(spectral_derivative(w.w1, Axis::X2, 1)),
          to_physical(spectral_derivative(w.w2, Axis::X1, 1)),
          to_physical(spectral_derivative(w.w2, Axis::X2, 1))};
}

double level_norm(const VelocityField& w, const PairSampling& sampling, double inflation) {
  const GridField u1 = to_physical(w.w1);
  const GridField u2 = to_physical(w.w2);
  const VelocityGradient g = gradient_of(w);
  const double sup = std::max({u1.max_abs(), u2.max_abs(), g.d11.max_abs(), g.d12.max_abs(),
                               g.d21.max_abs(), g.d22.max_abs()});
  const std::span<const double> comps[] = {g.d11.values(), g.d12.values(), g.d21.values(),
                                           g.d22.values()};
  const TorusGrid& grid = w.grid();
  return sup + inflation * sampled_holder_seminorm(Lattice{grid.n1(), grid.n2()}, comps, sampling);
}

// Norm over [a, b]: the velocity there is a convex combination of the
// bracketing levels, so the max over those levels bounds every proxy.
double window_norm(const VelocityTimeline& w, std::span<const double> level_norms, double a,
                   double b) {
  const auto times = w.times();
  std::size_t lo = 0;
  while (lo + 1 < times.size() && times[lo + 1] <= a) ++lo;
  std::size_t hi = times.size() - 1;
  while (hi > 0 && times[hi - 1] >= b) --hi;
  double m = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, level_norms[i]);
  return m;
}

}  // namespace

VelocityField VelocityField::zero(const TorusGrid& grid) {
  return {SpectralField2D(grid), SpectralField2D(grid)};
}

VelocityField VelocityField::from_stream_function(const SpectralField2D& psi) {
  PerpGradient g = perp_gradient(psi);
  return {std::move(g.w1), std::move(g.w2)};
}

double VelocityField::max_speed() const {
  const GridField u1 = to_physical(w1);
  const GridField u2 = to_physical(w2);
  double m = 0.0;
  for (std::size_t i = 0; i < u1.values().size(); ++i)
    m = std::max(m, std::hypot(u1.values()[i], u2.values()[i]));
  return m;
}

double VelocityField::divergence_defect() const {
  return spectral_divergence(w1, w2).max_abs_coeff();
}

HermiteInterpolant::HermiteInterpolant(const SpectralField2D& f) : grid_(f.grid()) {
  SpectralField2D fx = spectral_derivative(f, Axis::X1, 1);
  SpectralField2D fy = spectral_derivative(f, Axis::X2, 1);
  SpectralField2D fxy = spectral_derivative(fx, Axis::X2, 1);
  fx *= grid_.dx1();
  fy *= grid_.dx2();
  fxy *= grid_.dx1() * grid_.dx2();
  f_ = copy_values(to_physical(f));
  fx_ = copy_values(to_physical(fx));
  fy_ = copy_values(to_physical(fy));
  fxy_ = copy_values(to_physical(fxy));
}

double HermiteInterpolant::operator()(double x1, double x2) const {
  int i, j;
  double s, t;
  locate(x1, grid_.n1(), i, s);
  locate(x2, grid_.n2(), j, t);
  const int ip = (i + 1) % grid_.n1();
  const int jp = (j + 1) % grid_.n2();

  // Cubic Hermite basis: value weights (a0, a1), slope weights (b0, b1).
  const double s1 = 1.0 - s, t1 = 1.0 - t;
  const double as[2] = {(1.0 + 2.0 * s) * s1 * s1, s * s * (3.0 - 2.0 * s)};
  const double bs[2] = {s * s1 * s1, s * s * (s - 1.0)};
  const double at[2] = {(1.0 + 2.0 * t) * t1 * t1, t * t * (3.0 - 2.0 * t)};
  const double bt[2] = {t * t1 * t1, t * t * (t - 1.0)};

  const std::size_t idx[2][2] = {{grid_.index(i, j), grid_.index(i, jp)},
                                 {grid_.index(ip, j), grid_.index(ip, jp)}};
  double v = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::size_t k = idx[a][b];
      v += as[a] * at[b] * f_[k] + bs[a] * at[b] * fx_[k] + as[a] * bt[b] * fy_[k] +
           bs[a] * bt[b] * fxy_[k];
    }
  }
  return v;
}

void VelocityTimeline::add(double t, const VelocityField& w) {
  if (!times_.empty() && !(t > times_.back()))
    throw DomainError("velocity levels must be added in increasing time");
  if (!levels_.empty() && !(w.grid() == grid())) throw DimensionError("velocity grid mismatch");
  times_.push_back(t);
  levels_.push_back(Level{w, HermiteInterpolant(w.w1), HermiteInterpolant(w.w2)});
}

double VelocityTimeline::t_min() const {
  if (empty()) throw DomainError("empty velocity timeline");
  return times_.front();
}

double VelocityTimeline::t_max() const {
  if (empty()) throw DomainError("empty velocity timeline");
  return times_.back();
}

const TorusGrid& VelocityTimeline::grid() const {
  if (empty()) throw DomainError("empty velocity timeline");
  return levels_.front().w.grid();
}

double VelocityTimeline::max_speed() const {
  double m = 0.0;
  for (const auto& l : levels_) m = std::max(m, l.w.max_speed());
  return m;
}

std::array<double, 2> VelocityTimeline::operator()(double x1, double x2, double t) const {
  const double slack = kTimeSlack * std::max(1.0, std::abs(t));
  if (empty() || t < t_min() - slack || t > t_max() + slack)
    throw DomainError("velocity requested outside the stored time range");
  t = std::clamp(t, t_min(), t_max());
  if (levels_.size() == 1) return {levels_[0].u1(x1, x2), levels_[0].u2(x1, x2)};

  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - times_.begin()), times_.size() - 1);
  const std::size_t lo = hi - 1;
  const double lambda = (t - times_[lo]) / (times_[hi] - times_[lo]);
  const Level& a = levels_[lo];
  const Level& b = levels_[hi];
  if (lambda == 0.0) return {a.u1(x1, x2), a.u2(x1, x2)};
  if (lambda == 1.0) return {b.u1(x1, x2), b.u2(x1, x2)};
  return {(1.0 - lambda) * a.u1(x1, x2) + lambda * b.u1(x1, x2),
          (1.0 - lambda) * a.u2(x1, x2) + lambda * b.u2(x1, x2)};
}

FlowMapBatch FlowMapBatch::identity(const TorusGrid& grid, double t) {
  FlowMapBatch f{grid, t, t, {}, {}, {}, {}};
  f.x1.resize(grid.size());
  f.x2.resize(grid.size());
  f.d1.assign(grid.size(), 0.0);
  f.d2.assign(grid.size(), 0.0);
  for (int i1 = 0; i1 < grid.n1(); ++i1)
    for (int i2 = 0; i2 < grid.n2(); ++i2) {
      f.x1[grid.index(i1, i2)] = grid.x1(i1);
      f.x2[grid.index(i1, i2)] = grid.x2(i2);
    }
  return f;
}

int cfl_substeps(const VelocityTimeline& w, double t_from, double t_to, double cells) {
  const TorusGrid& g = w.grid();
  const double h = std::min(g.dx1(), g.dx2());
  const double travel = w.max_speed() * std::abs(t_to - t_from);
  // the small slack keeps exact multiples from rounding up to an extra substep
  return std::max(1, static_cast<int>(std::ceil(travel / (cells * h) - 1e-9)));
}

std::array<double, 2> trace_point(const VelocityTimeline& w, std::array<double, 2> x,
                                  double t_from, double t_to, int substeps) {
  if (substeps < 1) throw DomainError("integrate_flow needs at least one substep");
  const double h = (t_to - t_from) / substeps;
  for (int n = 0; n < substeps; ++n) {
    const double t = t_from + n * h;
    const double tm = t + 0.5 * h;
    const double te = n + 1 == substeps ? t_to : t + h;
    const auto k1 = w(x[0], x[1], t);
    const auto k2 = w(x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1], tm);
    const auto k3 = w(x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1], tm);
    const auto k4 = w(x[0] + h * k3[0], x[1] + h * k3[1], te);
    x[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    x[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  }
  return x;
}

FlowMapBatch integrate_flow(const VelocityTimeline& w, double t_from, double t_to, int substeps) {
  if (substeps < 1) throw DomainError("integrate_flow needs at least one substep");
  const TorusGrid& g = w.grid();
  if (t_from == t_to) return FlowMapBatch::identity(g, t_from);
  const double lo = std::min(t_from, t_to), hi = std::max(t_from, t_to);
  const double slack = kTimeSlack * std::max(1.0, hi);
  if (lo < w.t_min() - slack || hi > w.t_max() + slack)
    throw DomainError("velocity provider does not cover the requested time range");

  FlowMapBatch out = FlowMapBatch::identity(g, t_from);
  out.end_time = t_to;
  bool finite = true;
#pragma omp parallel for schedule(static) reduction(&& : finite)
  for (int i1 = 0; i1 < g.n1(); ++i1) {
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const std::size_t k = g.index(i1, i2);
      const std::array<double, 2> x0{g.x1(i1), g.x2(i2)};
      const auto x = trace_point(w, x0, t_from, t_to, substeps);
      finite = finite && std::isfinite(x[0]) && std::isfinite(x[1]);
      out.d1[k] = x[0] - x0[0];
      out.d2[k] = x[1] - x0[1];
      out.x1[k] = wrap_unit(x[0]);
      out.x2[k] = wrap_unit(x[1]);
    }
  }
  if (!finite) throw DomainError("non-finite characteristic in integrate_flow");
  return out;
}

GridField advect_values(const SpectralField2D& theta0, const FlowMapBatch& flow) {
  if (!(theta0.grid() == flow.grid)) throw DimensionError("advect: field and flow grids differ");
  const HermiteInterpolant interp(theta0);
  GridField out(flow.grid);
  auto v = out.values();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = interp(flow.x1[k], flow.x2[k]);
  return out;
}

SpectralField2D advect(const SpectralField2D& theta0, const FlowMapBatch& flow) {
  return to_spectral(advect_values(theta0, flow));
}

double velocity_norm(const VelocityTimeline& w, const PairSampling& sampling,
                     double seminorm_inflation) {
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    m = std::max(m, level_norm(w.field(i), sampling, seminorm_inflation));
  return m;
}

double BoundReport::worst_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : records) m = std::min(m, r.margin());
  return m;
}

void BoundReport::write_csv(std::ostream& os, bool header) const {
  if (header) os << "t,bound_id,lhs,rhs,margin\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g\n", r.t, r.bound_id.c_str(), r.lhs,
                  r.rhs, r.margin());
    os << buf;
  }
}

BoundReport check_appendix_bounds(std::span<const double> times,
                                  std::span<const SpectralField2D> thetas,
                                  const VelocityTimeline& w, std::span<const FlowMapBatch> flows,
                                  const BoundOptions& options) {
  if (times.size() != thetas.size()) throw DimensionError("one time per theta snapshot expected");
  BoundReport report;
  if (w.empty()) return report;
  const double alpha = options.sampling.alpha;
  const double holder_gain = std::pow(2.0, 0.5 * (1.0 - alpha));

  std::vector<double> level_norms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    level_norms[i] = level_norm(w.field(i), options.sampling, options.seminorm_inflation);

  for (const FlowMapBatch& f : flows) {
    const TorusGrid& g = f.grid;
    const double span = std::abs(f.end_time - f.start_time);
    const double big_w = window_norm(w, level_norms, std::min(f.start_time, f.end_time),
                                     std::max(f.start_time, f.end_time));
    const double t = f.end_time;

    double sup = 0.0;
    for (int i1 = 0; i1 < g.n1(); ++i1)
      for (int i2 = 0; i2 < g.n2(); ++i2) {
        const std::size_t k = g.index(i1, i2);
        sup = std::max(sup, std::hypot(g.x1(i1) + f.d1[k], g.x2(i2) + f.d2[k]));
      }
    report.records.push_back({t, "a_flow_sup", sup, std::sqrt(2.0) + big_w * span});

    // DF = I + D(displacement), centred differences across periodic neighbours.
    std::vector<double> j11(g.size()), j12(g.size()), j21(g.size()), j22(g.size());
    double grad_sup = 0.0;
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      const int ip = (i1 + 1) % g.n1(), im = (i1 + g.n1() - 1) % g.n1();
      for (int i2 = 0; i2 < g.n2(); ++i2) {
        const int jp = (i2 + 1) % g.n2(), jm = (i2 + g.n2() - 1) % g.n2();
        const std::size_t k = g.index(i1, i2);
        j11[k] = 1.0 + (f.d1[g.index(ip, i2)] - f.d1[g.index(im, i2)]) / (2.0 * g.dx1());
        j12[k] = (f.d1[g.index(i1, jp)] - f.d1[g.index(i1, jm)]) / (2.0 * g.dx2());
        j21[k] = (f.d2[g.index(ip, i2)] - f.d2[g.index(im, i2)]) / (2.0 * g.dx1());
        j22[k] = 1.0 + (f.d2[g.index(i1, jp)] - f.d2[g.index(i1, jm)]) / (2.0 * g.dx2());
        const double fro = std::sqrt(0.5 * (j11[k] * j11[k] + j12[k] * j12[k] +
                                             j21[k] * j21[k] + j22[k] * j22[k]));
        grad_sup = std::max(grad_sup, fro);
      }
    }
    report.records.push_back({t, "b_flow_grad", grad_sup, std::exp(big_w * span)});
    const std::span<const double> comps[] = {j11, j12, j21, j22};
    const double df_holder = sampled_holder_seminorm(Lattice{g.n1(), g.n2()}, comps,
                                                     options.sampling,
                                                     ComponentNorm::NormalizedFrobenius);
    report.records.push_back({t, "c_flow_holder", df_holder,
                              big_w * span * std::exp((2.0 + alpha) * big_w * span)});
  }

  if (thetas.empty()) return report;
  const double n0 = holder_norm(thetas[0], 2, options.sampling);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double t = times[i] - times[0];
    const double big_w = window_norm(w, level_norms, times[0], times[i]);
    const double wt = big_w * t;
    const DiscreteNorms norms = discrete_holder_norms(
        thetas[i], alpha, std::max(options.sampling.pair_budget, thetas[i].grid().size()),
        options.sampling.seed);
    report.records.push_back({times[i], "A_sup", norms.sup, n0});
    report.records.push_back({times[i], "B_grad", norms.grad_sup, n0 * std::exp(wt)});
    report.records.push_back({times[i], "C_grad_holder", norms.holder_seminorm,
                              n0 * std::exp(2.0 * wt) * (holder_gain + wt * std::exp(alpha * wt))});
    report.records.push_back(
        {times[i], "D_c1alpha", norms.c1alpha(),
         n0 * std::exp(wt) *
             (1.0 + holder_gain * std::exp(wt) + wt * std::exp((1.0 + alpha) * wt))});
  }
  return report;
}

}  // namespace ssg

#include "ssg/elliptic_strip.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ssg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wavenumber(int k1, int k2) { return kTwoPi * std::sqrt(double(k1) * k1 + double(k2) * k2); }

void require_same_grid(const StripGrid& a, const StripGrid& b) {
  if (!(a == b)) throw DimensionError("strip fields live on different grids");
}

// cosh(kappa z) / (kappa sinh(kappa)) written with decaying exponentials only.
double extension_factor(double kappa, double z) {
  return std::exp(-kappa * (1.0 - z)) * (1.0 + std::exp(-2.0 * kappa * z)) /
         (-std::expm1(-2.0 * kappa)) / kappa;
}

// Solves the scaled system for v'' - kappa^2 v = f with v'(0) = v'(1) = 0:
// rows (1 or 2) v_{j-1} - (2 + (kappa h)^2) v_j + (1 or 2) v_{j+1} = h^2 f_j.
// Diagonally dominant for kappa > 0, so Thomas needs no pivoting.
void solve_neumann_mode(double kappa, double h, std::span<const Complex> rhs,
                        std::span<Complex> out, std::vector<double>& cprime) {
  const int n = static_cast<int>(rhs.size());
  const double diag = -(2.0 + (kappa * h) * (kappa * h));
  const double h2 = h * h;
  cprime.resize(n);

  auto sub = [&](int j) { return j == n - 1 ? 2.0 : 1.0; };
  auto sup = [&](int j) { return j == 0 ? 2.0 : 1.0; };

  cprime[0] = sup(0) / diag;
  out[0] = h2 * rhs[0] / diag;
  for (int j = 1; j < n; ++j) {
    const double denom = diag - sub(j) * cprime[j - 1];
    cprime[j] = j < n - 1 ? sup(j) / denom : 0.0;
    out[j] = (h2 * rhs[j] - sub(j) * out[j - 1]) / denom;
  }
  for (int j = n - 2; j >= 0; --j) out[j] -= cprime[j] * out[j + 1];
}

double trapezoid_mean(std::span<const double> v, double h) {
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t j = 1; j + 1 < v.size(); ++j) s += v[j];
  return s * h;
}

// Vertical first and second differences of per-level spectra: central in the
// interior, second-order one-sided at the two boundaries.
StripField3D vertical_derivative(const StripField3D& u, int order) {
  const int n = u.n3();
  const double h = u.grid().dz();
  StripField3D out(u.grid());
  const std::size_t m = u.grid().horizontal().spectral_size();
  for (int j = 0; j < n; ++j) {
    auto dst = out.level(j).data();
    for (std::size_t i = 0; i < m; ++i) {
      auto at = [&](int jj) { return u.level(jj).data()[i]; };
      if (order == 1) {
        if (j == 0)
          dst[i] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        else if (j == n - 1)
          dst[i] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
        else
          dst[i] = (at(j + 1) - at(j - 1)) / (2.0 * h);
      } else {
        if (j == 0)
          dst[i] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
        else if (j == n - 1)
          dst[i] = (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
        else
          dst[i] = (at(j + 1) - 2.0 * at(j) + at(j - 1)) / (h * h);
      }
    }
  }
  return out;
}

template <class Op>
StripField3D map_levels(const StripField3D& u, Op&& op) {
  StripField3D out(u.grid());
  for (int j = 0; j < u.n3(); ++j) out.level(j) = op(u.level(j));
  return out;
}

// Physical values of a strip field, level-major, matching Lattice indexing.
std::vector<double> physical_values(const StripField3D& u) {
  const std::size_t m = u.grid().horizontal().size();
  std::vector<double> out(m * u.n3());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < u.n3(); ++j) {
    const GridField level = to_physical(u.level(j));
    std::copy(level.values().begin(), level.values().end(), out.begin() + j * m);
  }
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

StripGrid::StripGrid(const TorusGrid& horizontal, int n3) : horizontal_(horizontal), n3_(n3) {
  if (n3 < 9 || n3 % 2 == 0)
    throw DimensionError("strip grid needs an odd number of levels >= 9, got " +
                         std::to_string(n3));
}

StripField3D::StripField3D(const StripGrid& grid)
    : grid_(grid), levels_(grid.n3(), SpectralField2D(grid.horizontal())) {}

double StripField3D::mean() const {
  std::vector<double> dc(levels_.size());
  for (std::size_t j = 0; j < levels_.size(); ++j) dc[j] = levels_[j].mean();
  return trapezoid_mean(dc, grid_.dz());
}

StripField3D& StripField3D::operator+=(const StripField3D& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t j = 0; j < levels_.size(); ++j) levels_[j] += other.levels_[j];
  return *this;
}

StripField3D& StripField3D::operator-=(const StripField3D& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t j = 0; j < levels_.size(); ++j) levels_[j] -= other.levels_[j];
  return *this;
}

StripField3D& StripField3D::operator*=(double s) {
  for (auto& l : levels_) l *= s;
  return *this;
}

CompatibilityError::CompatibilityError(double defect, double tolerance)
    : DomainError("incompatible Neumann data: int f - int g = " + std::to_string(defect) +
                  " exceeds tolerance " + std::to_string(tolerance)),
      defect_(defect) {}

double check_compatibility(const StripField3D& f, const SpectralField2D& g) {
  if (!(f.grid().horizontal() == g.grid()))
    throw DimensionError("compatibility check: horizontal grids differ");
  return f.mean() - g.mean();
}

StripField3D harmonic_extension(const SpectralField2D& g, int n3) {
  const TorusGrid& tg = g.grid();
  if (std::abs(g.coeff(0, 0)) > 1e-12)
    throw DomainError("harmonic extension needs zero-mean boundary data, mean = " +
                      std::to_string(g.mean()));
  const StripGrid grid(tg, n3);
  StripField3D out(grid);
  for (int r = 0; r < tg.n1(); ++r) {
    const int k1 = tg.k1_of_row(r);
    for (int k2 = 0; k2 < tg.half_n2(); ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const std::size_t idx = tg.spectral_index(r, k2);
      const Complex gk = g.data()[idx];
      if (gk == Complex(0.0, 0.0)) continue;
      const double kappa = wavenumber(k1, k2);
      for (int j = 0; j < n3; ++j) out.level(j).data()[idx] = extension_factor(kappa, grid.x3(j)) * gk;
    }
  }
  return out;
}

StripField3D solve_poisson(const StripField3D& f, const SpectralField2D& g,
                           double compatibility_tolerance) {
  const StripGrid& grid = f.grid();
  const TorusGrid& tg = grid.horizontal();
  const double defect = check_compatibility(f, g);
  if (!(std::abs(defect) <= compatibility_tolerance))
    throw CompatibilityError(defect, compatibility_tolerance);

  const int n3 = grid.n3();
  const double h = grid.dz();
  StripField3D u(grid);

#pragma omp parallel
  {
    std::vector<Complex> rhs(n3), sol(n3);
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (int r = 0; r < tg.n1(); ++r) {
      const int k1 = tg.k1_of_row(r);
      for (int k2 = 0; k2 < tg.half_n2(); ++k2) {
        const std::size_t idx = tg.spectral_index(r, k2);
        for (int j = 0; j < n3; ++j) rhs[j] = f.level(j).data()[idx];

        if (k1 == 0 && k2 == 0) {
          // u'' = f with u'(0) = 0 marched upward from u_0 = 0; the top row is
          // the compatibility condition and is not imposed.
          sol[0] = 0.0;
          sol[1] = sol[0] + 0.5 * h * h * rhs[0];
          for (int j = 1; j + 1 < n3; ++j) sol[j + 1] = 2.0 * sol[j] - sol[j - 1] + h * h * rhs[j];
          for (int j = 0; j < n3; ++j) u.level(j).data()[idx] = sol[j];
          continue;
        }

        const double kappa = wavenumber(k1, k2);
        solve_neumann_mode(kappa, h, rhs, sol, scratch);
        const Complex gk = g.data()[idx];
        for (int j = 0; j < n3; ++j) {
          Complex v = sol[j];
          if (gk != Complex(0.0, 0.0)) v += extension_factor(kappa, grid.x3(j)) * gk;
          u.level(j).data()[idx] = v;
        }
      }
    }
  }

  const double shift = u.mean();
  for (int j = 0; j < n3; ++j) u.level(j).data()[0] -= shift;
  return u;
}

SpectralField2D dirichlet_trace(const StripField3D& u, Boundary which) {
  return which == Boundary::Upper ? u.level(u.n3() - 1) : u.level(0);
}

double strip_sup_norm(const StripField3D& u) { return max_abs(physical_values(u)); }

double strip_holder_norm(const StripField3D& u, int order, const PairSampling& sampling) {
  if (order != 0 && order != 2) throw DomainError("strip_holder_norm supports orders 0 and 2");
  const Lattice lattice = u.grid().lattice();

  if (order == 0) {
    const auto values = physical_values(u);
    const std::span<const double> comps[] = {values};
    return max_abs(values) + sampled_holder_seminorm(lattice, comps, sampling);
  }

  const StripField3D u3 = vertical_derivative(u, 1);
  auto d = [](Axis a, int o) {
    return [a, o](const SpectralField2D& s) { return spectral_derivative(s, a, o); };
  };
  const std::vector<double> lower[] = {
      physical_values(u),
      physical_values(map_levels(u, d(Axis::X1, 1))),
      physical_values(map_levels(u, d(Axis::X2, 1))),
      physical_values(u3),
  };
  const std::vector<double> second[] = {
      physical_values(map_levels(u, d(Axis::X1, 2))),
      physical_values(map_levels(u, d(Axis::X2, 2))),
      physical_values(map_levels(u, [](const SpectralField2D& s) { return mixed_derivative(s); })),
      physical_values(map_levels(u3, d(Axis::X1, 1))),
      physical_values(map_levels(u3, d(Axis::X2, 1))),
      physical_values(vertical_derivative(u, 2)),
  };
  double sup = 0.0;
  for (const auto& v : lower) sup = std::max(sup, max_abs(v));
  std::vector<std::span<const double>> comps;
  for (const auto& v : second) {
    sup = std::max(sup, max_abs(v));
    comps.emplace_back(v);
  }
  return sup + sampled_holder_seminorm(lattice, comps, sampling);
}

StripField3D random_strip_field(const StripGrid& grid, std::uint64_t seed, int band,
                                int vertical_modes, double amplitude) {
  StripField3D out(grid);
  for (int m = 0; m <= vertical_modes; ++m) {
    const SpectralField2D a =
        random_band_limited(grid.horizontal(), seed * 7919 + static_cast<std::uint64_t>(m), band,
                            amplitude);
    for (int j = 0; j < grid.n3(); ++j) {
      SpectralField2D term = a;
      term *= std::cos(m * std::numbers::pi * grid.x3(j));
      out.level(j) += term;
    }
  }
  return out;
}

double measure_stability_constant(const StripGrid& grid, int samples, std::uint64_t seed,
                                  const PairSampling& sampling) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t sub = seed + 1000003ULL * static_cast<std::uint64_t>(s);
    const int band = 1 + s % 3;
    StripField3D f(grid);
    SpectralField2D g(grid.horizontal());
    if (s % 3 != 0) f = random_strip_field(grid, sub, band, 3, 1.0);
    if (s % 3 != 1) g = random_band_limited(grid.horizontal(), sub + 17, band, 1.0);
    const StripField3D u = solve_poisson(f, g);
    const double denom = strip_holder_norm(f, 0, sampling) + holder_norm(g, 1, sampling);
    if (denom > 0.0) worst = std::max(worst, strip_holder_norm(u, 2, sampling) / denom);
  }
  return worst;
}

}  // namespace ssg

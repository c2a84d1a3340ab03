#pragma once

// Linear Neumann problems on the strip T^2 x (0,1):
//
//   Lap u = f,   d3 u = 0 on x3 = 0,   d3 u = g on x3 = 1,   mean(u) = 0.
//
// Fields are stored as one horizontal Fourier spectrum per vertical node, so
// every horizontal mode decouples into a two-point problem in x3.

#include <cstdint>
#include <vector>

#include "ssg/error.hpp"
#include "ssg/fields.hpp"
#include "ssg/holder.hpp"

namespace ssg {

/// Horizontal torus grid times n3 uniform vertical nodes x3_j = j/(n3-1).
class StripGrid {
 public:
  /// n3 must be odd and at least 9.
  StripGrid(const TorusGrid& horizontal, int n3);

  const TorusGrid& horizontal() const { return horizontal_; }
  int n3() const { return n3_; }
  double dz() const { return 1.0 / (n3_ - 1); }
  double x3(int j) const { return static_cast<double>(j) / (n3_ - 1); }
  Lattice lattice() const { return {horizontal_.n1(), horizontal_.n2(), n3_, dz()}; }

  friend bool operator==(const StripGrid&, const StripGrid&) = default;

 private:
  TorusGrid horizontal_;
  int n3_;
};

class StripField3D {
 public:
  explicit StripField3D(const StripGrid& grid);

  const StripGrid& grid() const { return grid_; }
  int n3() const { return grid_.n3(); }

  const SpectralField2D& level(int j) const { return levels_[j]; }
  SpectralField2D& level(int j) { return levels_[j]; }

  /// Trapezoid-rule mean over the strip (horizontal mean is the k = 0 mode).
  double mean() const;

  StripField3D& operator+=(const StripField3D& other);
  StripField3D& operator-=(const StripField3D& other);
  StripField3D& operator*=(double s);

  friend StripField3D operator+(StripField3D a, const StripField3D& b) { return a += b; }
  friend StripField3D operator-(StripField3D a, const StripField3D& b) { return a -= b; }
  friend StripField3D operator*(double s, StripField3D a) { return a *= s; }

 private:
  StripGrid grid_;
  std::vector<SpectralField2D> levels_;
};

enum class Boundary { Lower, Upper };

/// Raised when f and g violate the solvability condition int f = int g.
class CompatibilityError : public DomainError {
 public:
  CompatibilityError(double defect, double tolerance);
  double defect() const { return defect_; }

 private:
  double defect_;
};

inline constexpr double kDefaultCompatibilityTolerance = 1e-10;

/// int_Omega f - int_{T^2} g, with the trapezoid rule in x3.
double check_compatibility(const StripField3D& f, const SpectralField2D& g);

/// Closed-form harmonic function with d3 w = 0 at x3 = 0, d3 w = g at x3 = 1:
/// w_k(x3) = g_k cosh(2 pi |k| x3) / (2 pi |k| sinh(2 pi |k|)), evaluated
/// without overflow. Requires g to have zero mean.
StripField3D harmonic_extension(const SpectralField2D& g, int n3);

/// Solves the Neumann Poisson problem. The part driven by f uses second
/// order central differences with ghost-node closure (one tridiagonal solve
/// per mode); the part driven by k != 0 boundary data is the exact harmonic
/// extension; the k = 0 mode is integrated with the discrete Neumann data and
/// shifted to zero mean. Throws CompatibilityError when |defect| > tolerance.
StripField3D solve_poisson(const StripField3D& f, const SpectralField2D& g,
                           double compatibility_tolerance = kDefaultCompatibilityTolerance);

SpectralField2D dirichlet_trace(const StripField3D& u, Boundary which);

/// Largest nodal |u| over the strip.
double strip_sup_norm(const StripField3D& u);

/// Discrete C^{order,alpha} proxy (order 0 or 2) on the strip: largest
/// entrywise grid maximum of all derivatives up to the order plus the sampled
/// 3D seminorm of the top-order derivatives. Horizontal derivatives are
/// spectral, vertical ones second-order finite differences.
double strip_holder_norm(const StripField3D& u, int order, const PairSampling& sampling);

/// Reproducible smooth strip field: sum over m = 0..vertical_modes of
/// a_m(x') cos(m pi x3), each a_m a random_band_limited field of the given
/// band and amplitude (so the result has zero mean).
StripField3D random_strip_field(const StripGrid& grid, std::uint64_t seed, int band,
                                int vertical_modes, double amplitude);

/// Empirical Schauder-type constant: the largest ratio
/// |u|_{C^{2,a}} / (|f|_{C^{0,a}} + |g|_{C^{1,a}}) over a seeded suite of
/// pure-boundary, pure-interior and mixed problems.
double measure_stability_constant(const StripGrid& grid, int samples, std::uint64_t seed,
                                  const PairSampling& sampling);

}  // namespace ssg

#pragma once

// Periodic grids on the unit torus [0,1)^2, real grid fields, and their
// Hermitian half-spectrum Fourier representation in the e^{2 pi i k.x} basis.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ssg {

using Complex = std::complex<double>;

enum class Axis { X1 = 1, X2 = 2 };

/// Uniform collocation grid x = (i1/n1, i2/n2) on the unit torus.
class TorusGrid {
 public:
  /// Both sizes must be even and at least 8.
  TorusGrid(int n1, int n2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }

  /// Number of stored k2 columns in the half spectrum (k2 = 0 .. n2/2).
  int half_n2() const { return n2_ / 2 + 1; }
  std::size_t spectral_size() const {
    return static_cast<std::size_t>(n1_) * half_n2();
  }

  double dx1() const { return 1.0 / n1_; }
  double dx2() const { return 1.0 / n2_; }
  double x1(int i1) const { return static_cast<double>(i1) / n1_; }
  double x2(int i2) const { return static_cast<double>(i2) / n2_; }

  /// Row-major physical index, x2 varies fastest.
  std::size_t index(int i1, int i2) const {
    return static_cast<std::size_t>(i1) * n2_ + i2;
  }
  std::size_t spectral_index(int row, int k2) const {
    return static_cast<std::size_t>(row) * half_n2() + k2;
  }

  /// Signed wavenumber of spectral row r; the Nyquist row maps to +n1/2.
  int k1_of_row(int row) const { return row <= n1_ / 2 ? row : row - n1_; }
  int row_of_k1(int k1) const { return k1 >= 0 ? k1 : k1 + n1_; }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int n1_;
  int n2_;
};

/// Real values sampled on a TorusGrid.
class GridField {
 public:
  explicit GridField(const TorusGrid& grid);
  GridField(const TorusGrid& grid, std::vector<double> values);

  template <class Fn>
  static GridField sample(const TorusGrid& grid, Fn&& fn) {
    GridField out(grid);
    for (int i1 = 0; i1 < grid.n1(); ++i1)
      for (int i2 = 0; i2 < grid.n2(); ++i2)
        out(i1, i2) = fn(grid.x1(i1), grid.x2(i2));
    return out;
  }

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator()(int i1, int i2) const { return values_[grid_.index(i1, i2)]; }
  double& operator()(int i1, int i2) { return values_[grid_.index(i1, i2)]; }

  double min() const;
  double max() const;
  double max_abs() const;
  double mean() const;
  /// Root mean square, i.e. the L2(T^2) norm on the unit torus.
  double l2() const;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real field, normalised so that
/// f(x) = sum_k c_k e^{2 pi i k.x}. Only k2 >= 0 is stored; the remaining
/// half follows from c_{-k} = conj(c_k).
class SpectralField2D {
 public:
  explicit SpectralField2D(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  std::span<const Complex> data() const { return coeffs_; }
  std::span<Complex> data() { return coeffs_; }

  /// Coefficient for any |k1| <= n1/2, |k2| <= n2/2.
  Complex coeff(int k1, int k2) const;
  /// Sets c_k and, where both live in storage, c_{-k} = conj(c_k).
  void set_coeff(int k1, int k2, Complex value);

  double mean() const { return coeffs_[0].real(); }
  /// Sum of |c_k|^2 over the full spectrum (equals the mean of f^2).
  double l2_squared() const;
  /// Sum of |c_k| over the full spectrum, an upper bound for max |f|.
  double l1_coefficients() const;
  /// Largest coefficient magnitude.
  double max_abs_coeff() const;

  SpectralField2D& operator+=(const SpectralField2D& other);
  SpectralField2D& operator-=(const SpectralField2D& other);
  SpectralField2D& operator*=(double s);

  friend SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
  friend SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
  friend SpectralField2D operator*(double s, SpectralField2D a) { return a *= s; }

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

/// Forward transform. Throws DimensionError if the value count does not match the grid.
SpectralField2D to_spectral(const GridField& field);
SpectralField2D to_spectral(const TorusGrid& grid, std::span<const double> values);
GridField to_physical(const SpectralField2D& field);

/// Multiplies c_k by (2 pi i k_dir)^order; order must be 1 or 2. Odd orders
/// zero the Nyquist mode along dir.
SpectralField2D spectral_derivative(const SpectralField2D& f, Axis dir, int order);

/// d^2/dx1 dx2 through a single real multiplier, so the result does not
/// depend on the order of differentiation.
SpectralField2D mixed_derivative(const SpectralField2D& f);

struct PerpGradient {
  SpectralField2D w1;
  SpectralField2D w2;
};

/// Rotated gradient (-d2 psi, d1 psi).
PerpGradient perp_gradient(const SpectralField2D& psi);

/// d1 v1 + d2 v2.
SpectralField2D spectral_divergence(const SpectralField2D& v1, const SpectralField2D& v2);

/// 2/3-rule truncation: keeps modes with 3|k1| < n1 and 3|k2| < n2.
SpectralField2D dealias(const SpectralField2D& f);
bool in_dealiased_band(const TorusGrid& grid, int k1, int k2);

/// Largest |c_k - conj(c_{-k})| over pairs that are both stored.
double hermitian_defect(const SpectralField2D& f);

/// Reproducible random field with modes 0 < max(|k1|,|k2|) <= band and
/// sum_k |c_k| = amplitude (so max |f| <= amplitude). The coefficients depend
/// only on (seed, band), not on the grid, so the same field can be placed on
/// several resolutions.
SpectralField2D random_band_limited(const TorusGrid& grid, std::uint64_t seed, int band,
                                    double amplitude);

/// Copies the overlapping modes of f onto another grid (zero padding or truncation).
SpectralField2D resample(const SpectralField2D& f, const TorusGrid& target);

}  // namespace ssg

#include "ssg/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "ssg/error.hpp"
#include "ssg/random.hpp"

namespace ssg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread safe, execution with the new-array interface
// is. Plans are made once per grid shape with FFTW_ESTIMATE, which keeps the
// chosen algorithm (and hence every rounding) independent of timing.
class PlanCache {
 public:
  struct Plans {
    fftw_plan forward;
    fftw_plan inverse;
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  Plans get(int n1, int n2) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({n1, n2});
    if (it != plans_.end()) return it->second;

    const std::size_t n = static_cast<std::size_t>(n1) * n2;
    const std::size_t nh = static_cast<std::size_t>(n1) * (n2 / 2 + 1);
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(nh);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_r2c_2d(n1, n2, real, cplx, flags),
            fftw_plan_dft_c2r_2d(n1, n2, cplx, real, flags)};
    fftw_free(real);
    fftw_free(cplx);
    plans_.emplace(std::make_pair(n1, n2), p);
    return p;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, Plans> plans_;
};

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw DimensionError("spectral fields live on different grids");
}

}  // namespace

TorusGrid::TorusGrid(int n1, int n2) : n1_(n1), n2_(n2) {
  if (n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0)
    throw DimensionError("torus grid sizes must be even and >= 8, got " + std::to_string(n1) +
                         "x" + std::to_string(n2));
}

GridField::GridField(const TorusGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridField::GridField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DimensionError("grid field has " + std::to_string(values_.size()) +
                         " values, grid expects " + std::to_string(grid_.size()));
}

double GridField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double GridField::l2() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s / static_cast<double>(values_.size()));
}

SpectralField2D::SpectralField2D(const TorusGrid& grid)
    : grid_(grid), coeffs_(grid.spectral_size(), Complex(0.0, 0.0)) {}

Complex SpectralField2D::coeff(int k1, int k2) const {
  const int n1 = grid_.n1();
  const int n2 = grid_.n2();
  if (std::abs(k1) > n1 / 2 || std::abs(k2) > n2 / 2)
    throw DomainError("wavevector outside the resolved band");
  if (k2 < 0) return std::conj(coeffs_[grid_.spectral_index(grid_.row_of_k1(-k1), -k2)]);
  return coeffs_[grid_.spectral_index(grid_.row_of_k1(k1), k2)];
}

void SpectralField2D::set_coeff(int k1, int k2, Complex value) {
  const int n1 = grid_.n1();
  const int n2 = grid_.n2();
  if (std::abs(k1) > n1 / 2 || std::abs(k2) > n2 / 2)
    throw DomainError("wavevector outside the resolved band");
  if (k2 < 0) {
    k1 = -k1;
    k2 = -k2;
    value = std::conj(value);
  }
  coeffs_[grid_.spectral_index(grid_.row_of_k1(k1), k2)] = value;
  if (k2 == 0 || k2 == n2 / 2)
    coeffs_[grid_.spectral_index(grid_.row_of_k1(-k1), k2)] = std::conj(value);
}

double SpectralField2D::l2_squared() const {
  const int h = grid_.half_n2();
  const int nyq = grid_.n2() / 2;
  double s = 0.0;
  for (int r = 0; r < grid_.n1(); ++r) {
    for (int k2 = 0; k2 < h; ++k2) {
      const double w = (k2 == 0 || k2 == nyq) ? 1.0 : 2.0;
      s += w * std::norm(coeffs_[grid_.spectral_index(r, k2)]);
    }
  }
  return s;
}

double SpectralField2D::l1_coefficients() const {
  const int h = grid_.half_n2();
  const int nyq = grid_.n2() / 2;
  double s = 0.0;
  for (int r = 0; r < grid_.n1(); ++r) {
    for (int k2 = 0; k2 < h; ++k2) {
      const double w = (k2 == 0 || k2 == nyq) ? 1.0 : 2.0;
      s += w * std::abs(coeffs_[grid_.spectral_index(r, k2)]);
    }
  }
  return s;
}

double SpectralField2D::max_abs_coeff() const {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField2D& SpectralField2D::operator+=(const SpectralField2D& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField2D& SpectralField2D::operator-=(const SpectralField2D& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField2D& SpectralField2D::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

SpectralField2D to_spectral(const TorusGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size())
    throw DimensionError("physical array has " + std::to_string(values.size()) +
                         " values, grid expects " + std::to_string(grid.size()));
  SpectralField2D out(grid);
  auto plans = PlanCache::instance().get(grid.n1(), grid.n2());
  // r2c does not modify its input with the default flags.
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(out.data().data()));
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (Complex& c : out.data()) c *= scale;
  return out;
}

SpectralField2D to_spectral(const GridField& field) {
  return to_spectral(field.grid(), field.values());
}

GridField to_physical(const SpectralField2D& field) {
  const TorusGrid& grid = field.grid();
  auto plans = PlanCache::instance().get(grid.n1(), grid.n2());
  std::vector<Complex> scratch(field.data().begin(), field.data().end());
  std::vector<double> values(grid.size());
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       values.data());
  return GridField(grid, std::move(values));
}

SpectralField2D spectral_derivative(const SpectralField2D& f, Axis dir, int order) {
  if (order != 1 && order != 2)
    throw DomainError("spectral_derivative supports order 1 or 2, got " + std::to_string(order));
  const TorusGrid& g = f.grid();
  SpectralField2D out(g);
  auto src = f.data();
  auto dst = out.data();
  for (int r = 0; r < g.n1(); ++r) {
    const int k1 = g.k1_of_row(r);
    for (int k2 = 0; k2 < g.half_n2(); ++k2) {
      const int k = dir == Axis::X1 ? k1 : k2;
      const int nyq = dir == Axis::X1 ? g.n1() / 2 : g.n2() / 2;
      const std::size_t idx = g.spectral_index(r, k2);
      const double s = kTwoPi * k;
      const Complex c = src[idx];
      if (order == 1) {
        dst[idx] = (k == nyq) ? Complex(0.0, 0.0) : Complex(-s * c.imag(), s * c.real());
      } else {
        dst[idx] = -(s * s) * c;
      }
    }
  }
  return out;
}

SpectralField2D mixed_derivative(const SpectralField2D& f) {
  const TorusGrid& g = f.grid();
  SpectralField2D out(g);
  auto src = f.data();
  auto dst = out.data();
  for (int r = 0; r < g.n1(); ++r) {
    const int k1 = g.k1_of_row(r);
    for (int k2 = 0; k2 < g.half_n2(); ++k2) {
      const std::size_t idx = g.spectral_index(r, k2);
      if (k1 == g.n1() / 2 || k2 == g.n2() / 2) continue;
      // (2 pi i k1)(2 pi i k2) = -(2 pi)^2 k1 k2
      const double m = -(kTwoPi * k1) * (kTwoPi * k2);
      dst[idx] = m * src[idx];
    }
  }
  return out;
}

PerpGradient perp_gradient(const SpectralField2D& psi) {
  SpectralField2D w1 = spectral_derivative(psi, Axis::X2, 1);
  w1 *= -1.0;
  return {std::move(w1), spectral_derivative(psi, Axis::X1, 1)};
}

SpectralField2D spectral_divergence(const SpectralField2D& v1, const SpectralField2D& v2) {
  require_same_grid(v1.grid(), v2.grid());
  return spectral_derivative(v1, Axis::X1, 1) + spectral_derivative(v2, Axis::X2, 1);
}

bool in_dealiased_band(const TorusGrid& grid, int k1, int k2) {
  return 3 * std::abs(k1) < grid.n1() && 3 * std::abs(k2) < grid.n2();
}

SpectralField2D dealias(const SpectralField2D& f) {
  const TorusGrid& g = f.grid();
  SpectralField2D out(f);
  auto dst = out.data();
  for (int r = 0; r < g.n1(); ++r) {
    const int k1 = g.k1_of_row(r);
    for (int k2 = 0; k2 < g.half_n2(); ++k2) {
      if (!in_dealiased_band(g, k1, k2)) dst[g.spectral_index(r, k2)] = Complex(0.0, 0.0);
    }
  }
  return out;
}

double hermitian_defect(const SpectralField2D& f) {
  const TorusGrid& g = f.grid();
  double worst = 0.0;
  for (int k2 : {0, g.n2() / 2}) {
    for (int r = 0; r < g.n1(); ++r) {
      const int k1 = g.k1_of_row(r);
      const Complex a = f.data()[g.spectral_index(r, k2)];
      const int partner = g.row_of_k1(-k1);
      const Complex b = f.data()[g.spectral_index(partner, k2)];
      worst = std::max(worst, std::abs(a - std::conj(b)));
    }
  }
  return worst;
}

SpectralField2D random_band_limited(const TorusGrid& grid, std::uint64_t seed, int band,
                                    double amplitude) {
  if (band < 1 || 3 * band >= std::min(grid.n1(), grid.n2()))
    throw DomainError("random field band must satisfy 1 <= band < n/3");
  SpectralField2D out(grid);
  SplitMix64 rng(seed);
  // Half plane k2 > 0, plus k2 == 0 with k1 > 0; fixed order so the
  // coefficients are independent of the grid.
  for (int k1 = -band; k1 <= band; ++k1) {
    for (int k2 = 0; k2 <= band; ++k2) {
      if (k2 == 0 && k1 <= 0) continue;
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      out.set_coeff(k1, k2, Complex(re, im));
    }
  }
  const double l1 = out.l1_coefficients();
  if (l1 > 0.0) out *= amplitude / l1;
  return out;
}

SpectralField2D resample(const SpectralField2D& f, const TorusGrid& target) {
  const TorusGrid& src = f.grid();
  SpectralField2D out(target);
  const int m1 = std::min(src.n1(), target.n1()) / 2;
  const int m2 = std::min(src.n2(), target.n2()) / 2;
  // Nyquist modes of the smaller grid are dropped: they have no unambiguous
  // counterpart on the other grid.
  for (int k1 = -(m1 - 1); k1 <= m1 - 1; ++k1) {
    for (int k2 = 0; k2 <= m2 - 1; ++k2) {
      out.data()[target.spectral_index(target.row_of_k1(k1), k2)] =
          f.data()[src.spectral_index(src.row_of_k1(k1), k2)];
    }
  }
  return out;
}

}  // namespace ssg

#include "ssg/monge_ampere.hpp"

#include <vector>

namespace ssg {

namespace {

struct PhysicalHessian {
  GridField h11, h22, h12;
};

PhysicalHessian physical_hessian(const SpectralField2D& level) {
  return {to_physical(dealias(spectral_derivative(level, Axis::X1, 2))),
          to_physical(dealias(spectral_derivative(level, Axis::X2, 2))),
          to_physical(dealias(mixed_derivative(level)))};
}

template <class Pointwise>
StripField3D level_products(const StripGrid& grid, Pointwise&& pointwise) {
  StripField3D out(grid);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < grid.n3(); ++j) {
    GridField product(grid.horizontal());
    pointwise(j, product.values());
    out.level(j) = dealias(to_spectral(product));
  }
  return out;
}

}  // namespace

HessianPack::HessianPack(const StripField3D& phi)
    : phi11(phi.grid()), phi22(phi.grid()), phi12(phi.grid()) {
  for (int j = 0; j < phi.n3(); ++j) {
    phi11.level(j) = spectral_derivative(phi.level(j), Axis::X1, 2);
    phi22.level(j) = spectral_derivative(phi.level(j), Axis::X2, 2);
    phi12.level(j) = mixed_derivative(phi.level(j));
  }
}

StripField3D monge_ampere_apply(const StripField3D& phi) {
  return level_products(phi.grid(), [&](int j, std::span<double> out) {
    const PhysicalHessian h = physical_hessian(phi.level(j));
    const auto a = h.h11.values();
    const auto b = h.h22.values();
    const auto c = h.h12.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i] - c[i] * c[i];
  });
}

StripField3D gamma_apply(const StripField3D& f, const StripField3D& g) {
  if (!(f.grid() == g.grid())) throw DimensionError("gamma_apply: grids differ");
  return level_products(f.grid(), [&](int j, std::span<double> out) {
    const PhysicalHessian hf = physical_hessian(f.level(j));
    const PhysicalHessian hg = physical_hessian(g.level(j));
    const auto f11 = hf.h11.values();
    const auto f22 = hf.h22.values();
    const auto f12 = hf.h12.values();
    const auto g11 = hg.h11.values();
    const auto g22 = hg.h22.values();
    const auto g12 = hg.h12.values();
    // Each term is a commutative product and the two cross terms are summed
    // in one addition, so swapping f and g leaves every rounding unchanged.
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (f11[i] * g22[i] + f22[i] * g11[i]) - 2.0 * (f12[i] * g12[i]);
  });
}

}  // namespace ssg

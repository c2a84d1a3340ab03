#pragma once

// Quadratic horizontal Hessian operators on strip fields:
//   M[phi]      = phi_11 phi_22 - phi_12^2
//   gamma(f, g) = f_11 g_22 + f_22 g_11 - 2 f_12 g_12
// Products are formed in physical space from 2/3-truncated derivative
// spectra and truncated again after the forward transform.

#include "ssg/elliptic_strip.hpp"

namespace ssg {

/// Second horizontal derivatives of a strip field.
struct HessianPack {
  StripField3D phi11;
  StripField3D phi22;
  StripField3D phi12;

  explicit HessianPack(const StripField3D& phi);
};

StripField3D monge_ampere_apply(const StripField3D& phi);

/// Symmetric in its arguments bitwise; gamma_apply(f, f) == 2 M[f].
StripField3D gamma_apply(const StripField3D& f, const StripField3D& g);

}  // namespace ssg

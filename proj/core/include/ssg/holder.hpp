#pragma once

// Sampled-pair estimators for Hölder seminorms and the discrete C^{k,alpha}
// proxies built on them.

#include <cstddef>
#include <cstdint>
#include <span>

#include "ssg/fields.hpp"

namespace ssg {

struct PairSampling {
  double alpha = 0.5;
  /// Number of random pairs on top of the nearest-neighbour pairs.
  std::size_t pair_budget = 4096;
  std::uint64_t seed = 0x5eed;
};

/// How the difference of a vector- or matrix-valued sample is measured.
enum class ComponentNorm {
  Max,                  // largest entry
  Euclidean,            // sqrt of the sum of squares
  NormalizedFrobenius,  // Euclidean / sqrt(dim), so that |I| = 1 for square matrices
};

/// Node lattice: periodic n1 x n2 torus stacked over n3 levels at vertical
/// spacing dz (n3 = 1 for a purely horizontal field). Values are stored with
/// index (j * n1 + i1) * n2 + i2.
struct Lattice {
  int n1;
  int n2;
  int n3 = 1;
  double dz = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(n1) * n2 * n3; }
};

/// max over pairs of |u(p) - u(q)| / dist(p, q)^alpha, over every
/// nearest-neighbour pair plus pair_budget seeded random pairs. The random
/// pairs form a prefix-stable sequence in the budget, so the estimate never
/// decreases when the budget grows. Horizontal distances are periodic.
double sampled_holder_seminorm(const Lattice& lattice,
                               std::span<const std::span<const double>> components,
                               const PairSampling& sampling,
                               ComponentNorm norm = ComponentNorm::Max);

/// Discrete C^{1,alpha} proxy of a torus field: grid maxima of f and of
/// |d_i f| (largest entry), and the sampled seminorm of the gradient.
struct DiscreteNorms {
  double sup = 0.0;
  double grad_sup = 0.0;
  double holder_seminorm = 0.0;
  double alpha = 0.5;

  /// max(sup, grad_sup) + holder_seminorm.
  double c1alpha() const;
};

/// Requires alpha in (0,1) and pair_budget >= n1*n2.
DiscreteNorms discrete_holder_norms(const SpectralField2D& f, double alpha,
                                    std::size_t pair_budget, std::uint64_t seed);

/// C^{order,alpha} proxy for order 0, 1 or 2: the largest grid maximum over
/// all derivatives up to the order (entrywise), plus the sampled seminorm of
/// the top-order derivatives.
double holder_norm(const SpectralField2D& f, int order, const PairSampling& sampling);

}  // namespace ssg

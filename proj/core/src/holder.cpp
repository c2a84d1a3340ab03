#include "ssg/holder.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ssg/error.hpp"
#include "ssg/random.hpp"

namespace ssg {

namespace {

struct Coord {
  int i1, i2, j;
};

Coord coord_of(const Lattice& l, std::size_t p) {
  const int i2 = static_cast<int>(p % l.n2);
  p /= l.n2;
  const int i1 = static_cast<int>(p % l.n1);
  return {i1, i2, static_cast<int>(p / l.n1)};
}

double periodic_gap(int a, int b, int n) {
  int d = std::abs(a - b);
  d = std::min(d, n - d);
  return static_cast<double>(d) / n;
}

double distance(const Lattice& l, const Coord& a, const Coord& b) {
  const double d1 = periodic_gap(a.i1, b.i1, l.n1);
  const double d2 = periodic_gap(a.i2, b.i2, l.n2);
  const double d3 = std::abs(a.j - b.j) * l.dz;
  return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

double difference(std::span<const std::span<const double>> comps, std::size_t p,
                  std::size_t q, ComponentNorm norm) {
  if (norm == ComponentNorm::Max) {
    double m = 0.0;
    for (const auto& c : comps) m = std::max(m, std::abs(c[p] - c[q]));
    return m;
  }
  double s = 0.0;
  for (const auto& c : comps) {
    const double d = c[p] - c[q];
    s += d * d;
  }
  if (norm == ComponentNorm::NormalizedFrobenius) s /= static_cast<double>(comps.size());
  return std::sqrt(s);
}

std::vector<std::span<const double>> spans_of(const std::vector<GridField>& fields) {
  std::vector<std::span<const double>> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(f.values());
  return out;
}

}  // namespace

double sampled_holder_seminorm(const Lattice& lattice,
                               std::span<const std::span<const double>> components,
                               const PairSampling& sampling, ComponentNorm norm) {
  const std::size_t n = lattice.size();
  for (const auto& c : components)
    if (c.size() != n) throw DimensionError("holder seminorm: component size mismatch");
  if (components.empty() || n < 2) return 0.0;

  const double alpha = sampling.alpha;
  double best = 0.0;
  auto visit = [&](std::size_t p, std::size_t q) {
    const double d = distance(lattice, coord_of(lattice, p), coord_of(lattice, q));
    if (d <= 0.0) return;
    best = std::max(best, difference(components, p, q, norm) / std::pow(d, alpha));
  };

  for (int j = 0; j < lattice.n3; ++j) {
    for (int i1 = 0; i1 < lattice.n1; ++i1) {
      for (int i2 = 0; i2 < lattice.n2; ++i2) {
        const std::size_t base = static_cast<std::size_t>(j) * lattice.n1;
        const std::size_t p = (base + i1) * lattice.n2 + i2;
        visit(p, (base + (i1 + 1) % lattice.n1) * lattice.n2 + i2);
        visit(p, (base + i1) * lattice.n2 + (i2 + 1) % lattice.n2);
        if (j + 1 < lattice.n3)
          visit(p, ((base + lattice.n1) + i1) * lattice.n2 + i2);
      }
    }
  }

  SplitMix64 rng(sampling.seed);
  for (std::size_t s = 0; s < sampling.pair_budget; ++s) {
    const std::size_t p = rng.below(n);
    const std::size_t q = rng.below(n);
    if (p != q) visit(p, q);
  }
  return best;
}

double DiscreteNorms::c1alpha() const { return std::max(sup, grad_sup) + holder_seminorm; }

DiscreteNorms discrete_holder_norms(const SpectralField2D& f, double alpha,
                                    std::size_t pair_budget, std::uint64_t seed) {
  const TorusGrid& g = f.grid();
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (pair_budget < g.size())
    throw DomainError("pair budget must be at least n1*n2 = " + std::to_string(g.size()));

  const std::vector<GridField> grad{to_physical(spectral_derivative(f, Axis::X1, 1)),
                                    to_physical(spectral_derivative(f, Axis::X2, 1))};
  DiscreteNorms out;
  out.alpha = alpha;
  out.sup = to_physical(f).max_abs();
  out.grad_sup = std::max(grad[0].max_abs(), grad[1].max_abs());
  const auto comps = spans_of(grad);
  out.holder_seminorm = sampled_holder_seminorm(Lattice{g.n1(), g.n2()}, comps,
                                                PairSampling{alpha, pair_budget, seed});
  return out;
}

double holder_norm(const SpectralField2D& f, int order, const PairSampling& sampling) {
  if (order < 0 || order > 2) throw DomainError("holder_norm supports orders 0, 1, 2");
  const TorusGrid& g = f.grid();
  std::vector<GridField> levels[3];
  levels[0].push_back(to_physical(f));
  if (order >= 1) {
    levels[1].push_back(to_physical(spectral_derivative(f, Axis::X1, 1)));
    levels[1].push_back(to_physical(spectral_derivative(f, Axis::X2, 1)));
  }
  if (order >= 2) {
    levels[2].push_back(to_physical(spectral_derivative(f, Axis::X1, 2)));
    levels[2].push_back(to_physical(spectral_derivative(f, Axis::X2, 2)));
    levels[2].push_back(to_physical(mixed_derivative(f)));
  }
  double sup = 0.0;
  for (int k = 0; k <= order; ++k)
    for (const auto& fld : levels[k]) sup = std::max(sup, fld.max_abs());
  const auto comps = spans_of(levels[order]);
  return sup + sampled_holder_seminorm(Lattice{g.n1(), g.n2()}, comps, sampling);
}

}  // namespace ssg

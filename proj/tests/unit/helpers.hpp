#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include "frontlab/grid.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::testing {

inline ScalarField sample(const Grid& g, FieldKind kind,
                          const std::function<double(double, double)>& f) {
  ScalarField q(g, kind);
  for (int j1 = 0; j1 < g.n1(); ++j1)
    for (int j2 = 0; j2 < g.n2(); ++j2) q(j1, j2) = f(g.x1(j1), g.x2(j2));
  return q;
}

// Zero-mean random field with modes |k_i| <= kmax, built in physical space
// from explicit cos/sin terms so it does not depend on the FFT under test.
inline ScalarField random_field(const Grid& g, FieldKind kind, std::uint64_t seed, int kmax = 6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  struct Term {
    int k1, k2;
    double a, b;
  };
  std::vector<Term> terms;
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = 0; k2 <= kmax; ++k2) {
      if (k2 == 0 && k1 <= 0) continue;
      const double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      terms.push_back({k1, k2, normal(rng) * decay, normal(rng) * decay});
    }
  return sample(g, kind, [&](double x1, double x2) {
    double s = 0.0;
    for (const auto& t : terms) {
      const double ph = t.k1 * x1 + t.k2 * x2;
      s += t.a * std::cos(ph) + t.b * std::sin(ph);
    }
    return s;
  });
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace frontlab::testing

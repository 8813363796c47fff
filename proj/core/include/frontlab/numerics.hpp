#pragma once

#include <span>
#include <vector>

namespace frontlab::numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule with n nodes on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// Finite-difference weights (Fornberg) for the m-th derivative at x0 from
/// samples at the given nodes.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m);

/// First derivative of sampled y(x) at every sample using `width`-point
/// stencils (centred in the interior, shifted near the ends). Periodic
/// samples wrap with period `period`.
std::vector<double> differentiate_samples(std::span<const double> x, std::span<const double> y,
                                          int width, bool periodic = false,
                                          double period = 0.0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y ≈ slope·x + intercept. Requires ≥ 2 distinct x.
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace frontlab::numerics

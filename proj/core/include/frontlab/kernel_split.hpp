#pragma once

#include <functional>
#include <span>
#include <vector>

#include "frontlab/error.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/modulus.hpp"

namespace frontlab::modulus {

/// Density sampled at a batch of points (coordinates may lie outside the
/// fundamental cell).
using BatchDensity = std::function<std::vector<double>(std::span<const Point>)>;

/// ∫ θ(y)(1/|y−z1| − 1/|y−z2|) dy split into
///   I1: |y − z1| ≤ 2τ,
///   I2: 2τ < |y − z1| ≤ k,
///   I3: the rest of the 2π square centred at the pair midpoint.
/// The square is symmetric under z1 ↔ z2, so the total is antisymmetric.
struct KernelSplit {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double k_cutoff = 1.0;

  double total() const noexcept { return i1 + i2 + i3; }
};

struct SplitResolution {
  /// Largest |k|∞ present in the density; sets panel lengths.
  int bandwidth = 1;
  int radial_nodes = 16;
  int min_angular = 64;
};

/// The pair separation is too small to place quadrature nodes reliably
/// relative to the point coordinates.
class Unresolvable : public Error {
 public:
  explicit Unresolvable(double tau);
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

inline constexpr double kMinResolvableTau = 1e-9;

/// Polar Gauss quadrature centred on the singularities: the 1/|y − z|
/// factors cancel against the polar Jacobian, so every region integrand is
/// smooth. Requires 2τ < k and k + τ/2 ≤ π.
KernelSplit kernel_split(const BatchDensity& theta, const PointPair& pair, double k_cutoff,
                         SplitResolution resolution = {});

/// Spectral density; its mean is kept (the split is a quadrature test).
KernelSplit kernel_split(const ScalarField& theta, const PointPair& pair, double k_cutoff = 1.0);

struct RegionBoundsReport {
  std::vector<double> taus;
  /// Per τ: largest |I1|/τ, |I2|/(τ|log τ|), |I3|/τ over the base points.
  std::vector<std::array<double, 3>> ratios;
  /// Ratios at the largest τ.
  std::array<double, 3> constants{};
  /// max over the sweep of ratio / constant (1 when both vanish).
  std::array<double, 3> growth{};
  std::vector<double> excluded_taus;

  bool bounded(double factor = 2.0) const;
};

/// Sweeps τ (≥ 3 values spanning at least two decades) for pairs
/// z2 = z1 + τ(cos α, sin α) at each base point z1.
RegionBoundsReport verify_region_bounds(const ScalarField& theta, std::span<const double> taus,
                                        double k_cutoff = 1.0,
                                        std::span<const Point> base_points = {},
                                        double angle = 0.7);

}  // namespace frontlab::modulus

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frontlab/grid.hpp"

namespace frontlab::modulus {

using Point = std::array<double, 2>;

/// Minimum-image distance on the 2π torus.
double torus_distance(Point a, Point b);

/// Shortest displacement from a to b on the torus.
Point torus_displacement(Point a, Point b);

struct PointPair {
  Point z1{};
  Point z2{};
  double tau = 0.0;

  /// Builds a pair and checks 0 < τ < 1/e.
  static PointPair make(Point z1, Point z2);
};

/// ψ(z1) − ψ(z2) from two spectral evaluations.
double psi_difference(const SpectralCoeffs& psi, const PointPair& pair);

struct Box {
  double x1_lo = 0.0;
  double x1_hi = kTwoPi;
  double x2_lo = 0.0;
  double x2_hi = kTwoPi;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Seeded random pair plan: z1 uniform on the torus (or, with probability
/// focus_fraction, uniform in the focus box), direction uniform, τ
/// log-uniform in [tau_floor, tau_max). Every pair consumes the same number
/// of draws, so a plan of 2N pairs starts with the plan of N pairs.
struct SamplingPlan {
  std::size_t pair_count = 10000;
  double tau_floor = 1e-6;
  double tau_max = 0.36787944117144233;  // 1/e
  std::uint64_t seed = 42;
  std::optional<Box> focus;
  double focus_fraction = 0.5;
  /// Number of best pairs polished by a local pattern search afterwards.
  int refine_top = 0;

  void validate() const;
};

std::vector<PointPair> generate_pairs(const SamplingPlan& plan);

/// |Δψ|/(τ|log τ|) for QG, |Δψ|/τ for Euler.
double modulus_ratio(FieldKind kind, double psi_diff, double tau);

struct PairSample {
  PointPair pair;
  double psi_diff = 0.0;
  double ratio = 0.0;
};

struct DecadeBin {
  int decade = 0;  // covers [10^decade, 10^(decade+1))
  std::size_t count = 0;
  double max_ratio = 0.0;
};

struct ModulusEstimate {
  FieldKind kind = FieldKind::QgTheta;
  double M_hat = 0.0;
  std::size_t pair_count = 0;
  PointPair worst_pair;
  /// Largest ratio per decade of τ, smallest decade first.
  std::vector<DecadeBin> ratio_curve;
  /// Per-pair records, filled only when requested.
  std::vector<PairSample> samples;
};

/// Supremum of the modulus ratio over the plan. Ties go to the first pair
/// in plan order.
ModulusEstimate estimate_modulus(const SpectralCoeffs& psi, FieldKind kind,
                                 const SamplingPlan& plan, bool keep_samples = false);
ModulusEstimate estimate_modulus(const SpectralCoeffs& psi, FieldKind kind,
                                 std::span<const PointPair> pairs, bool keep_samples = false);

}  // namespace frontlab::modulus

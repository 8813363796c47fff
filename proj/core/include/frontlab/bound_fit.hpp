#pragma once

#include <optional>
#include <span>
#include <string>

#include "frontlab/error.hpp"

namespace frontlab::front {

enum class BoundModel { DoubleExponential, Exponential };

std::string to_string(BoundModel model);

/// Lower envelope fitted to a collapsing series v(t).
/// DoubleExponential: v ≥ exp(−exp(A t + B)) with G = log|log v|, only v < 1/e.
/// Exponential:       v ≥ exp(−(A t + B))     with G = −log v.
struct BoundFit {
  BoundModel model = BoundModel::DoubleExponential;
  double A_hat = 0.0;
  /// Smallest intercept that keeps the whole series on or above the
  /// envelope: max of G(t) − A_hat·t over every point where G is defined
  /// (v < 1 for the double exponential), not only the fitted ones.
  double B_hat = 0.0;
  /// Least-squares intercept, reported alongside.
  double B_ls = 0.0;
  /// NaN when no bound was supplied.
  double slope_bound = 0.0;
  /// max over consecutive used points of |ΔG/Δt|.
  double empirical_slope = 0.0;
  /// max over the whole series of envelope(t) − v(t); ≤ 0 means no dip.
  double max_violation = 0.0;
  /// The same with the least-squares intercept B_ls.
  double max_violation_ls = 0.0;
  /// Same for the a-priori envelope G(t) ≤ G(t₀) + slope_bound·(t − t₀);
  /// NaN when no bound was supplied.
  double theory_violation = 0.0;
  std::size_t points_used = 0;
  std::size_t points_excluded = 0;

  double envelope(double t) const;
};

/// Fewer than two points survive the transform.
class Unfittable : public Error {
 public:
  explicit Unfittable(const std::string& message) : Error("unfittable", message) {}
};

/// The transformed value G(v) of a sample, or nullopt when the model excludes it.
std::optional<double> bound_transform(BoundModel model, double value);

BoundFit fit_bound_envelope(std::span<const double> t, std::span<const double> values,
                            BoundModel model, std::optional<double> slope_bound = std::nullopt);

}  // namespace frontlab::front

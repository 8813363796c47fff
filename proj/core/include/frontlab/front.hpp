#pragma once

#include <span>
#include <string>
#include <vector>

#include "frontlab/error.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::front {

struct Window {
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const Window&, const Window&) = default;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Bracket&, const Bracket&) = default;
};

struct CurveSample {
  double x1 = 0.0;
  double phi = 0.0;
};

/// A level set {q = contour_value} written as the graph x2 = φ(x1) on grid
/// columns. `window` is the effective window: the first and last sampled
/// columns, or [x_first, x_first + 2π) when the curve wraps the torus.
struct LevelCurve {
  double rho_label = 0.0;
  double contour_value = 0.0;
  Window window;
  Bracket bracket;
  bool periodic = false;
  double contour_tol = 0.0;
  std::vector<CurveSample> samples;

  double length() const noexcept { return window.b - window.a; }
};

/// The column has no sign change of q − G inside the bracket.
class NoCrossing : public Error {
 public:
  explicit NoCrossing(double x1);
  double x1() const noexcept { return x1_; }

 private:
  double x1_;
};

/// The column has several sign changes: the level set folded over and is no
/// longer a graph in x1.
class NonGraph : public Error {
 public:
  NonGraph(double x1, int crossings);
  double x1() const noexcept { return x1_; }
  int crossings() const noexcept { return crossings_; }

 private:
  double x1_;
  int crossings_;
};

struct ExtractOptions {
  /// Residual bound relative to max|q|.
  double contour_tol_rel = 1e-9;
};

/// Grid columns (as x1 coordinates, possibly outside [0, 2π)) used for a
/// window. A window spanning 2π or more yields one full period.
std::vector<double> window_columns(const Grid& grid, Window window, bool* periodic = nullptr);

/// Per-column root of q(x1, ·) = G inside the bracket: sign scan on the grid
/// rows, bisection, then Newton polish on the column's trigonometric
/// interpolant.
LevelCurve extract_level_curve(const SpectralCoeffs& q, double contour_value, Window window,
                               Bracket bracket, double rho_label = 0.0, ExtractOptions options = {});

/// Maximum of |q(x1, φ) − G| over the samples, evaluated independently by
/// full 2D mode summation.
double contour_residual(const SpectralCoeffs& q, const LevelCurve& curve);

struct Thickness {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double semi_uniformity = 0.0;
  bool collapsed = false;
};

Thickness thickness(const LevelCurve& c1, const LevelCurve& c2);

/// A(t) = (b−a)⁻¹ ∫ₐᵇ (φ₂ − φ₁) dx1 by the trapezoid rule over the columns
/// (the rectangle rule for curves that wrap the torus).
double area_between_curves(const LevelCurve& c1, const LevelCurve& c2);

/// Corner combination ψ(b,φ₂(b)) − ψ(a,φ₂(a)) + ψ(a,φ₁(a)) − ψ(b,φ₁(b)),
/// divided by (b − a). Equals dA/dt for an exactly transported pair.
double flux_form_derivative(const SpectralCoeffs& psi, const LevelCurve& c1, const LevelCurve& c2);

/// Per-snapshot record for a tracked front pair.
struct FrontDiagnostics {
  double t = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
  double semi_uniformity_c = 0.0;
  double area_A = 0.0;
  double flux_F = 0.0;
  double u_sup_integral = 0.0;
  double front_length = 0.0;
};

FrontDiagnostics diagnose(double t, const SpectralCoeffs& psi, const LevelCurve& c1,
                          const LevelCurve& c2, double u_sup_integral);

struct AreaFluxReport {
  std::vector<double> t;        // interior times
  std::vector<double> dA_dt;    // centred differences of A
  std::vector<double> flux;     // flux-form values at the same times
  double max_abs_mismatch = 0.0;
  double max_abs_flux = 0.0;
  /// max|dA/dt − F| / max|F| over the interior points.
  double relative_mismatch = 0.0;
};

/// Compares centred differences of A(t) with the flux-form series.
/// Needs ≥ 3 samples; spacing may be non-uniform.
AreaFluxReport verify_area_flux(std::span<const double> t, std::span<const double> area,
                                std::span<const double> flux);

/// ψ(x1, φ(x1)) at each curve sample.
std::vector<double> composite_stream(const SpectralCoeffs& psi, const LevelCurve& curve);

struct GraphSnapshot {
  double t = 0.0;
  LevelCurve curve;
  std::vector<double> composite;  // ψ(x1, φ(x1, t), t) per sample
};

struct GraphEvolutionReport {
  std::size_t snapshots_used = 0;
  double max_mismatch = 0.0;
  double max_dphi_dt = 0.0;
  double relative_mismatch = 0.0;
  /// Some interior snapshots were skipped (column sets differed).
  bool partial = false;
};

/// Checks ∂φ/∂t = ∂/∂x1 ψ(x1, φ(x1, t), t) column by column: the left side
/// by centred time differences of φ, the right side by high-order
/// differentiation of the sampled composite along x1.
GraphEvolutionReport verify_graph_evolution(std::span<const GraphSnapshot> snapshots,
                                            int stencil_width = 8);

}  // namespace frontlab::front

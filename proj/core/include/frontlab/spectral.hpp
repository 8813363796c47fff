#pragma once

#include <array>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "frontlab/grid.hpp"

namespace frontlab {

/// Allocation with the SIMD alignment FFTW plans assume.
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;

template <class T>
class AlignedArray {
 public:
  explicit AlignedArray(std::size_t n) : n_(n), p_(static_cast<T*>(fft_alloc(sizeof(T) * n))) {
    for (std::size_t i = 0; i < n_; ++i) p_[i] = T{};
  }
  ~AlignedArray() { fft_free(p_); }
  AlignedArray(const AlignedArray&) = delete;
  AlignedArray& operator=(const AlignedArray&) = delete;

  T* data() noexcept { return p_; }
  const T* data() const noexcept { return p_; }
  std::size_t size() const noexcept { return n_; }
  T& operator[](std::size_t i) noexcept { return p_[i]; }
  const T& operator[](std::size_t i) const noexcept { return p_[i]; }
  std::span<T> span() noexcept { return {p_, n_}; }
  std::span<const T> span() const noexcept { return {p_, n_}; }

 private:
  std::size_t n_;
  T* p_;
};

/// Real-to-complex 2D FFT pair for one grid. Plans are built once per grid
/// with FFTW_ESTIMATE (so results do not depend on planner timing) and shared
/// through for_grid(). Execution is thread-safe.
class Fft2 {
 public:
  static std::shared_ptr<const Fft2> for_grid(const Grid& grid);

  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  const Grid& grid() const noexcept { return grid_; }

  /// Unnormalised forward transform of n1·n2 samples into the half spectrum.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Unnormalised inverse; `in` is not modified.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  /// Direct execution on fft_alloc'd buffers. inverse_inplace_input
  /// overwrites its input.
  void forward_aligned(const double* in, std::complex<double>* out) const;
  void inverse_inplace_input(std::complex<double>* in, double* out) const;

 private:
  explicit Fft2(const Grid& grid);

  Grid grid_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Precomputed wavenumber tables for one grid. Derivative wavenumbers drop
/// the unpaired Nyquist modes; |k| keeps them.
struct Wavenumbers {
  explicit Wavenumbers(const Grid& grid);

  Grid grid;
  std::vector<double> k1;        // per spectral row, signed
  std::vector<double> k2;        // per stored column
  std::vector<double> dk1;       // derivative multiplier, 0 at Nyquist
  std::vector<double> dk2;
  std::vector<double> k_squared; // per (row, column)
};

ScalarField from_spectral(const SpectralCoeffs& c, FieldKind kind = FieldKind::QgTheta);
SpectralCoeffs to_spectral(const ScalarField& f);

/// Multiplies every mode by |k|^{-2a}, a ∈ {1/2, 1}. A mean mode below
/// 1e-12·Σ|c| is zeroed; a larger one is rejected with InvalidInput.
SpectralCoeffs invert_fractional_laplacian(const SpectralCoeffs& c, RieszOrder order);

/// ψ for a zero-mean scalar, with the inversion selected by the field kind.
SpectralCoeffs stream_function(const ScalarField& q);

/// u = ∇⊥ψ = (−∂ψ/∂x2, ∂ψ/∂x1), computed spectrally.
VelocityField velocity_from_scalar(const ScalarField& q);
VelocityField velocity_from_stream(const SpectralCoeffs& psi);

/// Spectral partial derivatives.
SpectralCoeffs derivative_x1(const SpectralCoeffs& c);
SpectralCoeffs derivative_x2(const SpectralCoeffs& c);

/// max_k |k1 û1 + k2 û2| / max_k |û|; zero for a zero field.
double spectral_divergence(const VelocityField& u);

/// Max over samples of |∇q|.
double max_gradient_norm(const ScalarField& q);

/// Trigonometric interpolation of a spectral field at arbitrary points by
/// full mode summation. On-grid points reproduce from_spectral samples.
std::vector<double> evaluate_field_at(const SpectralCoeffs& c,
                                      std::span<const std::array<double, 2>> points);
double evaluate_field_at(const SpectralCoeffs& c, double x1, double x2);

/// Largest |k|_∞ carrying a coefficient above rel_tol·max|c|.
int effective_bandwidth(const SpectralCoeffs& c, double rel_tol = 1e-14);

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

/// Cell-area weighted grid quadrature for L1/L2, exact sample max for L∞.
Norms norms(const ScalarField& q);
/// L2 norm from the mode sum, (2π)·sqrt(Σ|c_k|²).
double spectral_l2(const SpectralCoeffs& c);
/// Max over samples of the Euclidean speed |u|.
double velocity_sup(const VelocityField& u);

}  // namespace frontlab

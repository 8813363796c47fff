#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace frontlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform sampling of the torus [0, 2π)². Both sizes are even and at least 8.
class Grid {
 public:
  Grid(int n1, int n2);
  explicit Grid(int n) : Grid(n, n) {}

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  double h1() const noexcept { return kTwoPi / n1_; }
  double h2() const noexcept { return kTwoPi / n2_; }
  double min_spacing() const noexcept { return h1() < h2() ? h1() : h2(); }
  double cell_area() const noexcept { return h1() * h2(); }

  double x1(int j1) const noexcept { return j1 * h1(); }
  double x2(int j2) const noexcept { return j2 * h2(); }

  std::size_t size() const noexcept { return std::size_t(n1_) * std::size_t(n2_); }
  /// Number of stored k2 columns in the half spectrum (n2/2 + 1).
  int n2_half() const noexcept { return n2_ / 2 + 1; }
  std::size_t spectral_size() const noexcept { return std::size_t(n1_) * std::size_t(n2_half()); }

  /// Signed wavenumber stored in spectral row r1, in [-n1/2, n1/2).
  int k1_of_row(int r1) const noexcept { return r1 < n1_ / 2 ? r1 : r1 - n1_; }
  int row_of_k1(int k1) const noexcept { return k1 >= 0 ? k1 : k1 + n1_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n1_;
  int n2_;
};

/// Which active scalar a field carries. Selects the stream-function
/// inversion: ψ = (−Δ)^{-1/2} θ for QG, ψ = (−Δ)^{-1} ω for Euler.
enum class FieldKind : std::uint8_t { QgTheta = 0, EulerVorticity = 1 };

enum class RieszOrder { Half, One };

constexpr RieszOrder inversion_order(FieldKind kind) noexcept {
  return kind == FieldKind::QgTheta ? RieszOrder::Half : RieszOrder::One;
}

const char* to_string(FieldKind kind) noexcept;

/// Physical samples of q on a grid, row-major with x2 fastest:
/// values[j1 * n2 + j2] = q(j1·h1, j2·h2).
class ScalarField {
 public:
  ScalarField(Grid grid, FieldKind kind);
  ScalarField(Grid grid, FieldKind kind, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  FieldKind kind() const noexcept { return kind_; }

  double operator()(int j1, int j2) const noexcept { return values_[index(j1, j2)]; }
  double& operator()(int j1, int j2) noexcept { return values_[index(j1, j2)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double mean() const noexcept;
  double max_abs() const noexcept;
  /// Subtracts the grid mean in place and returns the amount removed.
  double remove_mean() noexcept;
  /// True when |mean| ≤ tol·max|q|.
  bool is_zero_mean(double rel_tol = 1e-12) const noexcept;

 private:
  std::size_t index(int j1, int j2) const noexcept {
    return std::size_t(j1) * std::size_t(grid_.n2()) + std::size_t(j2);
  }

  Grid grid_;
  FieldKind kind_;
  std::vector<double> values_;
};

/// Half-spectrum Fourier coefficients normalised so that
/// q(x) = Σ_k c_k e^{i k·x}. Row r1 holds k1 = grid.k1_of_row(r1),
/// column k2 ∈ [0, n2/2]. Negative k2 follow from conjugate symmetry.
class SpectralCoeffs {
 public:
  explicit SpectralCoeffs(Grid grid);

  const Grid& grid() const noexcept { return grid_; }

  std::complex<double>& at(int r1, int k2) noexcept { return modes_[index(r1, k2)]; }
  const std::complex<double>& at(int r1, int k2) const noexcept { return modes_[index(r1, k2)]; }

  /// Coefficient of e^{i(k1 x1 + k2 x2)} for any k with k_i ∈ [-n_i/2, n_i/2).
  std::complex<double> mode(int k1, int k2) const;
  void set_mode(int k1, int k2, std::complex<double> value);

  std::span<const std::complex<double>> data() const noexcept { return modes_; }
  std::span<std::complex<double>> data() noexcept { return modes_; }

  /// Σ|c_k| over the full spectrum: an upper bound on the max-norm of the field.
  double abs_sum() const noexcept;

 private:
  std::size_t index(int r1, int k2) const noexcept {
    return std::size_t(r1) * std::size_t(grid_.n2_half()) + std::size_t(k2);
  }

  Grid grid_;
  std::vector<std::complex<double>> modes_;
};

struct VelocityField {
  Grid grid;
  std::vector<double> u1;
  std::vector<double> u2;
};

}  // namespace frontlab

#include "frontlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frontlab/error.hpp"

namespace frontlab {

Grid::Grid(int n1, int n2) : n1_(n1), n2_(n2) {
  if (n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0) {
    throw InvalidInput("grid sizes must be even and >= 8, got " + std::to_string(n1) + "x" +
                       std::to_string(n2));
  }
}

const char* to_string(FieldKind kind) noexcept {
  return kind == FieldKind::QgTheta ? "qg" : "euler";
}

ScalarField::ScalarField(Grid grid, FieldKind kind)
    : grid_(grid), kind_(kind), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(Grid grid, FieldKind kind, std::vector<double> values)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidInput("sample count " + std::to_string(values_.size()) +
                       " does not match grid size " + std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("non-finite sample at (" + std::to_string(i / grid_.n2()) + ", " +
                         std::to_string(i % grid_.n2()) + ")");
    }
  }
}

double ScalarField::mean() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / double(values_.size());
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::remove_mean() noexcept {
  const double m = mean();
  for (double& v : values_) v -= m;
  return m;
}

bool ScalarField::is_zero_mean(double rel_tol) const noexcept {
  return std::abs(mean()) <= rel_tol * max_abs();
}

SpectralCoeffs::SpectralCoeffs(Grid grid) : grid_(grid), modes_(grid.spectral_size()) {}

std::complex<double> SpectralCoeffs::mode(int k1, int k2) const {
  const int n1 = grid_.n1();
  const int n2 = grid_.n2();
  if (k1 < -n1 / 2 || k1 >= n1 / 2 || k2 < -n2 / 2 || k2 >= n2 / 2) {
    throw InvalidInput("wavevector out of range");
  }
  if (k2 == -n2 / 2) return at(grid_.row_of_k1(k1), n2 / 2);
  if (k2 >= 0) return at(grid_.row_of_k1(k1), k2);
  // c(-k) = conj(c(k)); -k1 wraps when k1 is the Nyquist row.
  const int mk1 = k1 == -n1 / 2 ? k1 : -k1;
  return std::conj(at(grid_.row_of_k1(mk1), -k2));
}

void SpectralCoeffs::set_mode(int k1, int k2, std::complex<double> value) {
  const int n2 = grid_.n2();
  if (k2 >= 0 && k2 < n2 / 2) {
    at(grid_.row_of_k1(k1), k2) = value;
  } else if (k2 == -n2 / 2) {
    at(grid_.row_of_k1(k1), n2 / 2) = value;
  } else {
    const int mk1 = k1 == -grid_.n1() / 2 ? k1 : -k1;
    at(grid_.row_of_k1(mk1), -k2) = std::conj(value);
  }
}

double SpectralCoeffs::abs_sum() const noexcept {
  const int nh = grid_.n2_half();
  double sum = 0.0;
  for (int r1 = 0; r1 < grid_.n1(); ++r1) {
    for (int k2 = 0; k2 < nh; ++k2) {
      const double w = (k2 == 0 || k2 == grid_.n2() / 2) ? 1.0 : 2.0;
      sum += w * std::abs(at(r1, k2));
    }
  }
  return sum;
}

}  // namespace frontlab

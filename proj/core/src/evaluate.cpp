#include <cmath>
#include <vector>

#include "frontlab/error.hpp"
#include "frontlab/parallel.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab {

namespace {

// Unpaired Nyquist modes are evaluated as cos(n/2·x), the symmetric real
// interpolant; on grid points this equals e^{-i n/2 x}.
double evaluate_one(const SpectralCoeffs& c, double x1, double x2,
                    std::vector<std::complex<double>>& e1, std::vector<std::complex<double>>& e2) {
  const Grid& g = c.grid();
  const int n1 = g.n1();
  const int nh = g.n2_half();
  const int nyq2 = g.n2() / 2;
  for (int r1 = 0; r1 < n1; ++r1) {
    const int k1 = g.k1_of_row(r1);
    e1[r1] = (r1 == n1 / 2) ? std::complex<double>(std::cos(k1 * x1), 0.0)
                            : std::polar(1.0, k1 * x1);
  }
  for (int k2 = 0; k2 < nh; ++k2) {
    const double w = (k2 == 0 || k2 == nyq2) ? 1.0 : 2.0;
    e2[k2] = (k2 == nyq2) ? std::complex<double>(w * std::cos(k2 * x2), 0.0)
                          : w * std::polar(1.0, k2 * x2);
  }
  std::complex<double> total = 0.0;
  for (int r1 = 0; r1 < n1; ++r1) {
    const std::complex<double>* row = &c.at(r1, 0);
    std::complex<double> acc = 0.0;
    for (int k2 = 0; k2 < nh; ++k2) acc += row[k2] * e2[k2];
    total += e1[r1] * acc;
  }
  return total.real();
}

}  // namespace

std::vector<double> evaluate_field_at(const SpectralCoeffs& c,
                                      std::span<const std::array<double, 2>> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw InvalidInput("evaluate_field_at: non-finite point");
    }
  }
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<std::complex<double>> e1(c.grid().n1());
    std::vector<std::complex<double>> e2(c.grid().n2_half());
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = evaluate_one(c, points[i][0], points[i][1], e1, e2);
    }
  });
  return out;
}

double evaluate_field_at(const SpectralCoeffs& c, double x1, double x2) {
  const std::array<double, 2> p{x1, x2};
  return evaluate_field_at(c, std::span(&p, 1)).front();
}

}  // namespace frontlab

#include "frontlab/kernel_split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frontlab/numerics.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::modulus {

Unresolvable::Unresolvable(double tau)
    : Error("unresolvable", "pair separation " + std::to_string(tau) + " is below quadrature resolution"),
      tau_(tau) {}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Nodes {
  std::vector<Point> y;
  std::vector<double> w;  // includes the kernel factor

  void add(Point p, double weight) {
    y.push_back(p);
    w.push_back(weight);
  }

  double integrate(const BatchDensity& theta) const {
    if (y.empty()) return 0.0;
    const auto v = theta(y);
    if (v.size() != y.size()) throw InvalidInput("density returned the wrong number of samples");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
    return s;
  }
};

int round_up4(int n) { return (n + 3) / 4 * 4; }

// 1 − r/|y − z2| for y = z1 + r·e, written without cancellation:
// (ρ² − r²)/(ρ(ρ + r)) with ρ² − r² = |d|² − 2r(e·d).
double kernel_factor(double r, double ex, double ey, Point d, double d2) {
  const double rx = r * ex - d[0];
  const double ry = r * ey - d[1];
  const double rho = std::hypot(rx, ry);
  return (d2 - 2.0 * r * (ex * d[0] + ey * d[1])) / (rho * (rho + r));
}

}  // namespace

KernelSplit kernel_split(const BatchDensity& theta, const PointPair& pair, double k_cutoff,
                         SplitResolution res) {
  const double tau = pair.tau;
  if (!(tau > 0.0)) throw InvalidInput("kernel_split: pair separation must be positive");
  if (!(2.0 * tau < k_cutoff)) throw InvalidInput("kernel_split: need tau < k_cutoff / 2");
  if (!(k_cutoff + 0.5 * tau <= kPi)) throw InvalidInput("kernel_split: k_cutoff too large");
  if (tau < kMinResolvableTau) throw Unresolvable(tau);

  const Point z1 = pair.z1;
  const Point d = torus_displacement(pair.z1, pair.z2);
  const Point z2{z1[0] + d[0], z1[1] + d[1]};
  const double d2 = d[0] * d[0] + d[1] * d[1];
  const auto& gl = numerics::gauss_legendre(res.radial_nodes);
  const double bw = std::max(res.bandwidth, 1);
  const double panel_max = std::min(0.5, 4.0 / bw);

  KernelSplit out;
  out.k_cutoff = k_cutoff;

  // I1 = ∫_{D(z1,2τ)} θ/|y−z1| − ∫_{D(z1,2τ)} θ/|y−z2|, each in polar
  // coordinates about its own singular point.
  {
    const double R = 2.0 * tau;
    const int na = res.min_angular;
    const double dphi = 2.0 * kPi / na;
    Nodes nodes;
    for (int m = 0; m < na; ++m) {
      const double phi = (m + 0.5) * dphi;
      const double ex = std::cos(phi);
      const double ey = std::sin(phi);
      for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
        const double r = 0.5 * R * (1.0 + gl.nodes[g]);
        nodes.add({z1[0] + r * ex, z1[1] + r * ey}, dphi * 0.5 * R * gl.weights[g]);
      }
      // Ray from z2 leaves the disc at r_max: |z2 − z1 + r e| = R.
      const double de = d[0] * ex + d[1] * ey;
      const double rmax = -de + std::sqrt(de * de - d2 + R * R);
      for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
        const double r = 0.5 * rmax * (1.0 + gl.nodes[g]);
        nodes.add({z2[0] + r * ex, z2[1] + r * ey}, -dphi * 0.5 * rmax * gl.weights[g]);
      }
    }
    out.i1 = nodes.integrate(theta);
  }

  // I2: annulus about z1, geometric panels near the inner edge.
  {
    Nodes nodes;
    double r_lo = 2.0 * tau;
    while (r_lo < k_cutoff) {
      const double r_hi = std::min(k_cutoff, r_lo + std::min(r_lo, panel_max));
      const int na = round_up4(std::max(res.min_angular, int(std::ceil(4.0 * bw * r_hi)) + 32));
      const double dphi = 2.0 * kPi / na;
      const double half = 0.5 * (r_hi - r_lo);
      for (int m = 0; m < na; ++m) {
        const double phi = (m + 0.5) * dphi;
        const double ex = std::cos(phi);
        const double ey = std::sin(phi);
        for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
          const double r = r_lo + half * (1.0 + gl.nodes[g]);
          nodes.add({z1[0] + r * ex, z1[1] + r * ey},
                    dphi * half * gl.weights[g] * kernel_factor(r, ex, ey, d, d2));
        }
      }
      r_lo = r_hi;
    }
    out.i2 = nodes.integrate(theta);
  }

  // I3: square of side 2π centred at the midpoint, minus D(z1, k). In polar
  // coordinates about z1 the outer radius is piecewise smooth between the
  // corner directions.
  {
    const double lo1 = -kPi + 0.5 * d[0];
    const double hi1 = kPi + 0.5 * d[0];
    const double lo2 = -kPi + 0.5 * d[1];
    const double hi2 = kPi + 0.5 * d[1];
    std::vector<double> corners{std::atan2(lo2, lo1), std::atan2(lo2, hi1), std::atan2(hi2, hi1),
                                std::atan2(hi2, lo1)};
    for (double& c : corners) {
      if (c < 0.0) c += 2.0 * kPi;
    }
    std::sort(corners.begin(), corners.end());
    corners.push_back(corners.front() + 2.0 * kPi);

    auto outer = [&](double ex, double ey) {
      double t = std::numeric_limits<double>::infinity();
      if (ex > 0.0) t = std::min(t, hi1 / ex);
      if (ex < 0.0) t = std::min(t, lo1 / ex);
      if (ey > 0.0) t = std::min(t, hi2 / ey);
      if (ey < 0.0) t = std::min(t, lo2 / ey);
      return t;
    };

    Nodes nodes;
    const double r_far = std::hypot(kPi + 0.5 * std::abs(d[0]), kPi + 0.5 * std::abs(d[1]));
    for (std::size_t p = 0; p + 1 < corners.size(); ++p) {
      const double a0 = corners[p];
      const double a1 = corners[p + 1];
      const int na = std::max(24, int(std::ceil(0.75 * bw * r_far * (a1 - a0))) + 24);
      const auto& ga = numerics::gauss_legendre(na);
      const double ahalf = 0.5 * (a1 - a0);
      for (std::size_t ia = 0; ia < ga.nodes.size(); ++ia) {
        const double phi = a0 + ahalf * (1.0 + ga.nodes[ia]);
        const double ex = std::cos(phi);
        const double ey = std::sin(phi);
        const double R = outer(ex, ey);
        if (!(R > k_cutoff)) continue;
        const int pieces = std::max(1, int(std::ceil((R - k_cutoff) / panel_max)));
        const double len = (R - k_cutoff) / pieces;
        for (int s = 0; s < pieces; ++s) {
          const double r_lo = k_cutoff + s * len;
          for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
            const double r = r_lo + 0.5 * len * (1.0 + gl.nodes[g]);
            nodes.add({z1[0] + r * ex, z1[1] + r * ey},
                      ahalf * ga.weights[ia] * 0.5 * len * gl.weights[g] *
                          kernel_factor(r, ex, ey, d, d2));
          }
        }
      }
    }
    out.i3 = nodes.integrate(theta);
  }
  return out;
}

KernelSplit kernel_split(const ScalarField& theta, const PointPair& pair, double k_cutoff) {
  const SpectralCoeffs c = to_spectral(theta);
  SplitResolution res;
  res.bandwidth = std::max(1, effective_bandwidth(c));
  const BatchDensity density = [&c](std::span<const Point> pts) {
    return evaluate_field_at(c, pts);
  };
  return kernel_split(density, pair, k_cutoff, res);
}

bool RegionBoundsReport::bounded(double factor) const {
  return std::all_of(growth.begin(), growth.end(), [&](double g) { return g <= factor; });
}

RegionBoundsReport verify_region_bounds(const ScalarField& theta, std::span<const double> taus,
                                        double k_cutoff, std::span<const Point> base_points,
                                        double angle) {
  if (taus.size() < 3) throw InvalidInput("verify_region_bounds: need at least 3 values of tau");
  const auto [lo, hi] = std::minmax_element(taus.begin(), taus.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw InvalidInput("verify_region_bounds: tau sweep must span at least two decades");
  }
  std::vector<Point> bases(base_points.begin(), base_points.end());
  if (bases.empty()) bases = {{1.0, 2.0}, {3.5, 0.8}, {5.2, 4.4}};

  const SpectralCoeffs c = to_spectral(theta);
  SplitResolution res;
  res.bandwidth = std::max(1, effective_bandwidth(c));
  const BatchDensity density = [&c](std::span<const Point> pts) {
    return evaluate_field_at(c, pts);
  };

  std::vector<double> sorted(taus.begin(), taus.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  RegionBoundsReport report;
  for (double tau : sorted) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    try {
      for (const Point& z1 : bases) {
        const PointPair pair{z1, {z1[0] + tau * std::cos(angle), z1[1] + tau * std::sin(angle)}, tau};
        const KernelSplit s = kernel_split(density, pair, k_cutoff, res);
        r[0] = std::max(r[0], std::abs(s.i1) / tau);
        r[1] = std::max(r[1], std::abs(s.i2) / (tau * std::abs(std::log(tau))));
        r[2] = std::max(r[2], std::abs(s.i3) / tau);
      }
    } catch (const Unresolvable&) {
      report.excluded_taus.push_back(tau);
      continue;
    }
    report.taus.push_back(tau);
    report.ratios.push_back(r);
  }
  if (report.taus.empty()) return report;
  report.constants = report.ratios.front();
  for (int i = 0; i < 3; ++i) {
    double peak = 0.0;
    for (const auto& r : report.ratios) peak = std::max(peak, r[i]);
    const double c0 = report.constants[i];
    if (c0 > 0.0) {
      report.growth[i] = peak / c0;
    } else {
      report.growth[i] = peak > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
  }
  return report;
}

}  // namespace frontlab::modulus

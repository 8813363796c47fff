#include "frontlab/front.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "frontlab/numerics.hpp"
#include "frontlab/parallel.hpp"

namespace frontlab::front {

NoCrossing::NoCrossing(double x1)
    : Error("no-crossing", "no level crossing in bracket at x1 = " + std::to_string(x1)),
      x1_(x1) {}

NonGraph::NonGraph(double x1, int crossings)
    : Error("non-graph", "level set is not a graph at x1 = " + std::to_string(x1) + " (" +
                             std::to_string(crossings) + " crossings)"),
      x1_(x1),
      crossings_(crossings) {}

namespace {

// q restricted to one column x1 = const, as a 1D trigonometric polynomial in
// x2 with the same Nyquist conventions as evaluate_field_at.
class ColumnPolynomial {
 public:
  ColumnPolynomial(const SpectralCoeffs& c, double x1) : d_(c.grid().n2_half()) {
    const Grid& g = c.grid();
    const int n1 = g.n1();
    nyq2_ = g.n2() / 2;
    for (int r1 = 0; r1 < n1; ++r1) {
      const int k1 = g.k1_of_row(r1);
      const std::complex<double> e1 = (r1 == n1 / 2) ? std::complex<double>(std::cos(k1 * x1), 0.0)
                                                     : std::polar(1.0, k1 * x1);
      const std::complex<double>* row = &c.at(r1, 0);
      for (std::size_t k2 = 0; k2 < d_.size(); ++k2) d_[k2] += e1 * row[k2];
    }
  }

  double value(double x2) const { return sum(x2, false); }
  double slope(double x2) const { return sum(x2, true); }

 private:
  double sum(double x2, bool derivative) const {
    double total = 0.0;
    const int nh = int(d_.size());
    for (int k2 = 0; k2 < nh; ++k2) {
      const double w = (k2 == 0 || k2 == nyq2_) ? 1.0 : 2.0;
      if (k2 == nyq2_) {
        total += derivative ? -w * d_[k2].real() * k2 * std::sin(k2 * x2)
                            : w * d_[k2].real() * std::cos(k2 * x2);
        continue;
      }
      std::complex<double> e = std::polar(1.0, k2 * x2);
      if (derivative) e *= std::complex<double>(0.0, k2);
      total += w * (d_[k2] * e).real();
    }
    return total;
  }

  std::vector<std::complex<double>> d_;
  int nyq2_ = 0;
};

double solve_column(const SpectralCoeffs& q, double x1, double level, Bracket bracket, double tol) {
  const ColumnPolynomial p(q, x1);
  const double h2 = q.grid().h2();
  std::vector<double> xs{bracket.lo};
  for (long m = long(std::floor(bracket.lo / h2)) + 1; m * h2 < bracket.hi; ++m) {
    if (m * h2 > bracket.lo) xs.push_back(m * h2);
  }
  xs.push_back(bracket.hi);

  int crossings = 0;
  double a = 0.0;
  double b = 0.0;
  double fa = 0.0;
  double prev_f = p.value(xs[0]) - level;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double f = p.value(xs[i]) - level;
    if ((prev_f > 0.0) != (f > 0.0)) {
      ++crossings;
      a = xs[i - 1];
      b = xs[i];
      fa = prev_f;
    }
    prev_f = f;
  }
  if (crossings == 0) throw NoCrossing(x1);
  if (crossings > 1) throw NonGraph(x1, crossings);

  // Invariant: (f(a) > 0) != (f(b) > 0).
  const bool a_positive = fa > 0.0;
  for (int it = 0; it < 200 && b - a > 1e-6 * h2; ++it) {
    const double m = 0.5 * (a + b);
    ((p.value(m) - level > 0.0) == a_positive ? a : b) = m;
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 8; ++it) {
    const double f = p.value(x) - level;
    if (std::abs(f) <= 1e-3 * tol) break;
    const double s = p.slope(x);
    if (s == 0.0) break;
    const double next = x - f / s;
    if (!(next >= a && next <= b)) break;
    x = next;
  }
  if (std::abs(p.value(x) - level) > tol) {
    for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::abs(b);
         ++it) {
      const double m = 0.5 * (a + b);
      ((p.value(m) - level > 0.0) == a_positive ? a : b) = m;
    }
    x = 0.5 * (a + b);
  }
  return x;
}

}  // namespace

std::vector<double> window_columns(const Grid& grid, Window window, bool* periodic) {
  if (!(std::isfinite(window.a) && std::isfinite(window.b)) || !(window.b > window.a)) {
    throw InvalidInput("window must satisfy a < b");
  }
  const double h1 = grid.h1();
  const double slack = 1e-9 * h1;
  const long first = long(std::ceil((window.a - slack) / h1));
  std::vector<double> cols;
  const bool full = window.b - window.a >= kTwoPi - slack;
  if (full) {
    for (int j = 0; j < grid.n1(); ++j) cols.push_back(double(first + j) * h1);
  } else {
    for (long m = first; m * h1 <= window.b + slack; ++m) cols.push_back(double(m) * h1);
  }
  if (cols.size() < 2) throw InvalidInput("window contains fewer than two grid columns");
  if (periodic) *periodic = full;
  return cols;
}

LevelCurve extract_level_curve(const SpectralCoeffs& q, double contour_value, Window window,
                               Bracket bracket, double rho_label, ExtractOptions options) {
  if (!(bracket.hi > bracket.lo) || bracket.hi - bracket.lo > kTwoPi) {
    throw InvalidInput("bracket must satisfy lo < hi with hi - lo <= 2π");
  }
  if (!std::isfinite(contour_value)) throw InvalidInput("contour value must be finite");
  bool periodic = false;
  const auto cols = window_columns(q.grid(), window, &periodic);

  LevelCurve curve;
  curve.rho_label = rho_label;
  curve.contour_value = contour_value;
  curve.bracket = bracket;
  curve.periodic = periodic;
  curve.window = periodic ? Window{cols.front(), cols.front() + kTwoPi}
                          : Window{cols.front(), cols.back()};
  const double qmax = from_spectral(q).max_abs();
  curve.contour_tol = options.contour_tol_rel * std::max(qmax, 1e-300);
  curve.samples.resize(cols.size());

  // Exceptions from workers are rethrown by parallel_for; report the
  // leftmost failing column so the result does not depend on scheduling.
  std::vector<int> failure(cols.size(), 0);
  std::vector<int> failure_crossings(cols.size(), 0);
  parallel_for(cols.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      curve.samples[i].x1 = cols[i];
      try {
        curve.samples[i].phi = solve_column(q, cols[i], contour_value, bracket, curve.contour_tol);
      } catch (const NoCrossing&) {
        failure[i] = 1;
      } catch (const NonGraph& e) {
        failure[i] = 2;
        failure_crossings[i] = e.crossings();
      }
    }
  });
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (failure[i] == 1) throw NoCrossing(cols[i]);
    if (failure[i] == 2) throw NonGraph(cols[i], failure_crossings[i]);
  }
  return curve;
}

double contour_residual(const SpectralCoeffs& q, const LevelCurve& curve) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(curve.samples.size());
  for (const auto& s : curve.samples) pts.push_back({s.x1, s.phi});
  const auto vals = evaluate_field_at(q, pts);
  double r = 0.0;
  for (double v : vals) r = std::max(r, std::abs(v - curve.contour_value));
  return r;
}

namespace {

void require_matching(const LevelCurve& c1, const LevelCurve& c2) {
  if (c1.samples.size() != c2.samples.size() || c1.periodic != c2.periodic) {
    throw InvalidInput("curves are sampled on different columns");
  }
  for (std::size_t i = 0; i < c1.samples.size(); ++i) {
    if (std::abs(c1.samples[i].x1 - c2.samples[i].x1) > 1e-12) {
      throw InvalidInput("curves are sampled on different columns");
    }
  }
}

}  // namespace

Thickness thickness(const LevelCurve& c1, const LevelCurve& c2) {
  require_matching(c1, c2);
  Thickness t;
  t.delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c1.samples.size(); ++i) {
    const double d = std::abs(c2.samples[i].phi - c1.samples[i].phi);
    t.delta_min = std::min(t.delta_min, d);
    t.delta_max = std::max(t.delta_max, d);
  }
  t.collapsed = t.delta_min == 0.0;
  t.semi_uniformity = t.delta_max > 0.0 ? t.delta_min / t.delta_max : 0.0;
  return t;
}

double area_between_curves(const LevelCurve& c1, const LevelCurve& c2) {
  require_matching(c1, c2);
  const auto& s1 = c1.samples;
  const auto& s2 = c2.samples;
  const std::size_t n = s1.size();
  if (c1.periodic) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += s2[i].phi - s1[i].phi;
    return sum / double(n);
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double dx = s1[i].x1 - s1[i - 1].x1;
    integral += 0.5 * dx * ((s2[i].phi - s1[i].phi) + (s2[i - 1].phi - s1[i - 1].phi));
  }
  return integral / (s1.back().x1 - s1.front().x1);
}

double flux_form_derivative(const SpectralCoeffs& psi, const LevelCurve& c1,
                            const LevelCurve& c2) {
  require_matching(c1, c2);
  if (c1.periodic) return 0.0;
  const double a = c1.samples.front().x1;
  const double b = c1.samples.back().x1;
  const std::array<std::array<double, 2>, 4> pts{{{b, c2.samples.back().phi},
                                                   {a, c2.samples.front().phi},
                                                   {a, c1.samples.front().phi},
                                                   {b, c1.samples.back().phi}}};
  const auto v = evaluate_field_at(psi, pts);
  return (v[0] - v[1] + v[2] - v[3]) / (b - a);
}

FrontDiagnostics diagnose(double t, const SpectralCoeffs& psi, const LevelCurve& c1,
                          const LevelCurve& c2, double u_sup_integral) {
  const Thickness th = thickness(c1, c2);
  FrontDiagnostics d;
  d.t = t;
  d.delta_min = th.delta_min;
  d.delta_max = th.delta_max;
  d.semi_uniformity_c = th.semi_uniformity;
  d.area_A = area_between_curves(c1, c2);
  d.flux_F = flux_form_derivative(psi, c1, c2);
  d.u_sup_integral = u_sup_integral;
  d.front_length = c1.length();
  return d;
}

namespace {

// Centred three-point derivative on a non-uniform mesh at index i.
double centred_difference(std::span<const double> t, std::span<const double> y, std::size_t i) {
  const double hm = t[i] - t[i - 1];
  const double hp = t[i + 1] - t[i];
  return (hm * hm * y[i + 1] - hp * hp * y[i - 1] + (hp * hp - hm * hm) * y[i]) /
         (hm * hp * (hm + hp));
}

}  // namespace

AreaFluxReport verify_area_flux(std::span<const double> t, std::span<const double> area,
                                std::span<const double> flux) {
  if (t.size() != area.size() || t.size() != flux.size()) {
    throw InvalidInput("verify_area_flux: series lengths differ");
  }
  if (t.size() < 3) throw InvalidInput("verify_area_flux: need at least 3 samples");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw InvalidInput("verify_area_flux: times must increase");
  }
  AreaFluxReport r;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double fd = centred_difference(t, area, i);
    r.t.push_back(t[i]);
    r.dA_dt.push_back(fd);
    r.flux.push_back(flux[i]);
    r.max_abs_mismatch = std::max(r.max_abs_mismatch, std::abs(fd - flux[i]));
    r.max_abs_flux = std::max(r.max_abs_flux, std::abs(flux[i]));
  }
  if (r.max_abs_flux > 0.0) {
    r.relative_mismatch = r.max_abs_mismatch / r.max_abs_flux;
  } else {
    // Zero flux: rounding in the differences of a flat A is not a mismatch.
    double scale = 0.0;
    for (double a : area) scale = std::max(scale, std::abs(a));
    const double span = t.back() - t.front();
    const bool noise = r.max_abs_mismatch <= 1e-13 * scale * double(t.size()) / span;
    r.relative_mismatch = noise ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

std::vector<double> composite_stream(const SpectralCoeffs& psi, const LevelCurve& curve) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(curve.samples.size());
  for (const auto& s : curve.samples) pts.push_back({s.x1, s.phi});
  return evaluate_field_at(psi, pts);
}

namespace {

bool same_columns(const LevelCurve& a, const LevelCurve& b) {
  if (a.samples.size() != b.samples.size() || a.periodic != b.periodic) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (std::abs(a.samples[i].x1 - b.samples[i].x1) > 1e-12) return false;
  }
  return true;
}

}  // namespace

GraphEvolutionReport verify_graph_evolution(std::span<const GraphSnapshot> snapshots,
                                            int stencil_width) {
  if (snapshots.size() < 3) throw InvalidInput("verify_graph_evolution: need at least 3 snapshots");
  GraphEvolutionReport r;
  for (std::size_t i = 1; i + 1 < snapshots.size(); ++i) {
    const auto& prev = snapshots[i - 1];
    const auto& cur = snapshots[i];
    const auto& next = snapshots[i + 1];
    if (!same_columns(prev.curve, cur.curve) || !same_columns(cur.curve, next.curve) ||
        cur.composite.size() != cur.curve.samples.size()) {
      r.partial = true;
      continue;
    }
    const std::size_t n = cur.curve.samples.size();
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = cur.curve.samples[j].x1;
    const auto rhs = numerics::differentiate_samples(x, cur.composite, stencil_width,
                                                     cur.curve.periodic, kTwoPi);
    const double ts[3] = {prev.t, cur.t, next.t};
    for (std::size_t j = 0; j < n; ++j) {
      const double ys[3] = {prev.curve.samples[j].phi, cur.curve.samples[j].phi,
                            next.curve.samples[j].phi};
      const double lhs = centred_difference(ts, ys, 1);
      r.max_mismatch = std::max(r.max_mismatch, std::abs(lhs - rhs[j]));
      r.max_dphi_dt = std::max(r.max_dphi_dt, std::abs(lhs));
    }
    ++r.snapshots_used;
  }
  if (r.max_dphi_dt > 0.0) {
    r.relative_mismatch = r.max_mismatch / r.max_dphi_dt;
  } else {
    r.relative_mismatch = r.max_mismatch > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return r;
}

}  // namespace frontlab::front

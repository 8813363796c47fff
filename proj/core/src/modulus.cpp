#include "frontlab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "frontlab/error.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::modulus {

namespace {

double wrap(double x) {
  x = std::fmod(x, kTwoPi);
  return x < 0.0 ? x + kTwoPi : x;
}

double min_image(double d) {
  d = std::remainder(d, kTwoPi);
  return d;
}

}  // namespace

Point torus_displacement(Point a, Point b) {
  return {min_image(b[0] - a[0]), min_image(b[1] - a[1])};
}

double torus_distance(Point a, Point b) {
  const Point d = torus_displacement(a, b);
  return std::hypot(d[0], d[1]);
}

PointPair PointPair::make(Point z1, Point z2) {
  if (!std::isfinite(z1[0]) || !std::isfinite(z1[1]) || !std::isfinite(z2[0]) ||
      !std::isfinite(z2[1])) {
    throw InvalidInput("point pair has non-finite coordinates");
  }
  PointPair p{z1, z2, torus_distance(z1, z2)};
  if (!(p.tau > 0.0) || !(p.tau < std::exp(-1.0))) {
    throw InvalidInput("point pair separation must lie in (0, 1/e)");
  }
  return p;
}

double psi_difference(const SpectralCoeffs& psi, const PointPair& pair) {
  const std::array<Point, 2> pts{pair.z1, pair.z2};
  const auto v = evaluate_field_at(psi, pts);
  return v[0] - v[1];
}

void SamplingPlan::validate() const {
  if (pair_count == 0) throw InvalidInput("sampling plan is empty");
  if (!(tau_floor > 0.0) || !(tau_max > tau_floor) || tau_max > std::exp(-1.0)) {
    throw InvalidInput("sampling plan needs 0 < tau_floor < tau_max <= 1/e");
  }
  if (!(focus_fraction >= 0.0 && focus_fraction <= 1.0)) {
    throw InvalidInput("focus_fraction must lie in [0, 1]");
  }
  if (focus && !(focus->x1_hi > focus->x1_lo && focus->x2_hi > focus->x2_lo)) {
    throw InvalidInput("focus box must have positive extent");
  }
  if (refine_top < 0) throw InvalidInput("refine_top must be non-negative");
}

namespace {

// 53-bit uniform in [0, 1) from the raw generator output; unlike
// std::uniform_real_distribution this is the same on every standard library.
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

PointPair pair_from(Point z1, double angle, double tau) {
  const Point z2{wrap(z1[0] + tau * std::cos(angle)), wrap(z1[1] + tau * std::sin(angle))};
  PointPair p{z1, z2, torus_distance(z1, z2)};
  return p;
}

}  // namespace

std::vector<PointPair> generate_pairs(const SamplingPlan& plan) {
  plan.validate();
  std::mt19937_64 rng(plan.seed);
  const double log_lo = std::log(plan.tau_floor);
  const double log_hi = std::log(plan.tau_max);
  std::vector<PointPair> pairs;
  pairs.reserve(plan.pair_count);
  while (pairs.size() < plan.pair_count) {
    const double u_focus = unit(rng);
    const double u1 = unit(rng);
    const double u2 = unit(rng);
    const double u_angle = unit(rng);
    const double u_tau = unit(rng);
    Point z1;
    if (plan.focus && u_focus < plan.focus_fraction) {
      const Box& b = *plan.focus;
      z1 = {wrap(b.x1_lo + u1 * (b.x1_hi - b.x1_lo)), wrap(b.x2_lo + u2 * (b.x2_hi - b.x2_lo))};
    } else {
      z1 = {u1 * kTwoPi, u2 * kTwoPi};
    }
    const double tau = std::exp(log_lo + u_tau * (log_hi - log_lo));
    PointPair p = pair_from(z1, u_angle * kTwoPi, tau);
    // Rounding in the wrap can push τ a hair outside the range; redraw then.
    if (p.tau > 0.0 && p.tau < plan.tau_max) pairs.push_back(p);
  }
  return pairs;
}

double modulus_ratio(FieldKind kind, double psi_diff, double tau) {
  if (kind == FieldKind::QgTheta) return std::abs(psi_diff) / (tau * std::abs(std::log(tau)));
  return std::abs(psi_diff) / tau;
}

namespace {

void accumulate(ModulusEstimate& est, std::map<int, DecadeBin>& bins, const PairSample& s,
                bool keep) {
  if (est.pair_count == 0 || s.ratio > est.M_hat) {
    est.M_hat = s.ratio;
    est.worst_pair = s.pair;
  }
  ++est.pair_count;
  const int decade = int(std::floor(std::log10(s.pair.tau)));
  DecadeBin& bin = bins[decade];
  bin.decade = decade;
  ++bin.count;
  bin.max_ratio = std::max(bin.max_ratio, s.ratio);
  if (keep) est.samples.push_back(s);
}

std::vector<PairSample> evaluate_pairs(const SpectralCoeffs& psi, FieldKind kind,
                                       std::span<const PointPair> pairs) {
  std::vector<Point> pts;
  pts.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    pts.push_back(p.z1);
    pts.push_back(p.z2);
  }
  const auto v = evaluate_field_at(psi, pts);
  std::vector<PairSample> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double diff = v[2 * i] - v[2 * i + 1];
    out[i] = {pairs[i], diff, modulus_ratio(kind, diff, pairs[i].tau)};
  }
  return out;
}

// Compass search over (z1, direction, log τ) starting from one pair.
std::vector<PairSample> refine(const SpectralCoeffs& psi, FieldKind kind, const PairSample& start,
                               const SamplingPlan& plan) {
  const double log_lo = std::log(plan.tau_floor);
  const double log_hi = std::log(plan.tau_max) - 1e-12;
  const Point d = torus_displacement(start.pair.z1, start.pair.z2);
  std::array<double, 4> x{start.pair.z1[0], start.pair.z1[1], std::atan2(d[1], d[0]),
                          std::log(start.pair.tau)};
  std::array<double, 4> step{0.05, 0.05, 0.05, 0.05};
  double best = start.ratio;
  std::vector<PairSample> probed;
  for (int it = 0; it < 400 && step[0] > 1e-7; ++it) {
    std::vector<PointPair> trial;
    for (int c = 0; c < 4; ++c) {
      for (int sgn : {1, -1}) {
        auto y = x;
        y[c] += sgn * step[c];
        y[3] = std::clamp(y[3], log_lo, log_hi);
        PointPair p = pair_from({wrap(y[0]), wrap(y[1])}, y[2], std::exp(y[3]));
        if (p.tau > 0.0 && p.tau < plan.tau_max) trial.push_back(p);
      }
    }
    const auto res = evaluate_pairs(psi, kind, trial);
    int arg = -1;
    for (std::size_t i = 0; i < res.size(); ++i) {
      probed.push_back(res[i]);
      if (res[i].ratio > best) {
        best = res[i].ratio;
        arg = int(i);
      }
    }
    if (arg >= 0) {
      const PointPair& p = res[arg].pair;
      const Point dd = torus_displacement(p.z1, p.z2);
      x = {p.z1[0], p.z1[1], std::atan2(dd[1], dd[0]), std::log(p.tau)};
    } else {
      for (double& s : step) s *= 0.5;
    }
  }
  return probed;
}

}  // namespace

ModulusEstimate estimate_modulus(const SpectralCoeffs& psi, FieldKind kind,
                                 std::span<const PointPair> pairs, bool keep_samples) {
  if (pairs.empty()) throw InvalidInput("estimate_modulus: empty pair plan");
  ModulusEstimate est;
  est.kind = kind;
  std::map<int, DecadeBin> bins;
  for (const auto& s : evaluate_pairs(psi, kind, pairs)) accumulate(est, bins, s, keep_samples);
  for (const auto& [d, bin] : bins) est.ratio_curve.push_back(bin);
  return est;
}

ModulusEstimate estimate_modulus(const SpectralCoeffs& psi, FieldKind kind,
                                 const SamplingPlan& plan, bool keep_samples) {
  const auto pairs = generate_pairs(plan);
  ModulusEstimate est;
  est.kind = kind;
  std::map<int, DecadeBin> bins;
  auto samples = evaluate_pairs(psi, kind, pairs);
  for (const auto& s : samples) accumulate(est, bins, s, keep_samples);

  if (plan.refine_top > 0) {
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t top = std::min<std::size_t>(std::size_t(plan.refine_top), order.size());
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return samples[a].ratio > samples[b].ratio ||
                               (samples[a].ratio == samples[b].ratio && a < b);
                      });
    for (std::size_t r = 0; r < top; ++r) {
      for (const auto& s : refine(psi, kind, samples[order[r]], plan)) {
        accumulate(est, bins, s, keep_samples);
      }
    }
  }
  for (const auto& [d, bin] : bins) est.ratio_curve.push_back(bin);
  return est;
}

}  // namespace frontlab::modulus

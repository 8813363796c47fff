#include "frontlab/bound_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "frontlab/numerics.hpp"

namespace frontlab::front {

std::string to_string(BoundModel model) {
  return model == BoundModel::DoubleExponential ? "double-exponential" : "exponential";
}

namespace {

double envelope_of(BoundModel model, double g) {
  return model == BoundModel::DoubleExponential ? std::exp(-std::exp(g)) : std::exp(-g);
}

}  // namespace

double BoundFit::envelope(double t) const { return envelope_of(model, A_hat * t + B_hat); }

std::optional<double> bound_transform(BoundModel model, double value) {
  if (model == BoundModel::DoubleExponential) {
    if (!(value < std::exp(-1.0))) return std::nullopt;
    return std::log(-std::log(value));
  }
  return -std::log(value);
}

BoundFit fit_bound_envelope(std::span<const double> t, std::span<const double> values,
                            BoundModel model, std::optional<double> slope_bound) {
  if (t.size() != values.size()) throw InvalidInput("fit_bound_envelope: series lengths differ");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]) || !std::isfinite(t[i])) {
      throw InvalidInput("fit_bound_envelope: series must be finite and positive");
    }
    if (i > 0 && !(t[i] > t[i - 1])) throw InvalidInput("fit_bound_envelope: times must increase");
  }

  BoundFit fit;
  fit.model = model;
  std::vector<double> tu;
  std::vector<double> gu;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (auto g = bound_transform(model, values[i])) {
      tu.push_back(t[i]);
      gu.push_back(*g);
    } else {
      ++fit.points_excluded;
    }
  }
  fit.points_used = tu.size();
  if (tu.size() < 2) {
    throw Unfittable("fewer than 2 usable points (" + std::to_string(tu.size()) + " used, " +
                     std::to_string(fit.points_excluded) + " excluded)");
  }

  const auto line = numerics::least_squares_line(tu, gu);
  fit.A_hat = line.slope;
  fit.B_ls = line.intercept;
  fit.B_hat = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool defined = model == BoundModel::Exponential || values[i] < 1.0;
    if (!defined) continue;
    const double g = model == BoundModel::DoubleExponential ? std::log(-std::log(values[i]))
                                                            : -std::log(values[i]);
    fit.B_hat = std::max(fit.B_hat, g - fit.A_hat * t[i]);
  }

  for (std::size_t i = 1; i < tu.size(); ++i) {
    fit.empirical_slope =
        std::max(fit.empirical_slope, std::abs((gu[i] - gu[i - 1]) / (tu[i] - tu[i - 1])));
  }

  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    fit.max_violation = std::max(fit.max_violation, fit.envelope(t[i]) - values[i]);
  }
  fit.max_violation_ls = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    fit.max_violation_ls = std::max(fit.max_violation_ls,
                                    envelope_of(model, fit.A_hat * t[i] + fit.B_ls) - values[i]);
  }

  if (slope_bound) {
    fit.slope_bound = *slope_bound;
    fit.theory_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tu.size(); ++i) {
      const double g = gu.front() + *slope_bound * (tu[i] - tu.front());
      const double v = model == BoundModel::DoubleExponential ? std::exp(-std::exp(gu[i]))
                                                              : std::exp(-gu[i]);
      fit.theory_violation = std::max(fit.theory_violation, envelope_of(model, g) - v);
    }
  } else {
    fit.slope_bound = std::numeric_limits<double>::quiet_NaN();
    fit.theory_violation = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

}  // namespace frontlab::front

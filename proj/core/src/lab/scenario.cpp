#include "frontlab/lab/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "frontlab/error.hpp"
#include "frontlab/evolve.hpp"

namespace frontlab::lab {

ParamMap Scenario::resolve(const ParamMap& overrides) const {
  ParamMap out;
  for (const auto& p : params) out[p.name] = p.default_value;
  for (const auto& [name, value] : overrides) {
    const auto it = std::find_if(params.begin(), params.end(),
                                 [&](const ScenarioParam& p) { return p.name == name; });
    if (it == params.end()) {
      throw InvalidInput("scenario '" + this->name + "' has no parameter '" + name + "'");
    }
    if (!std::isfinite(value)) throw InvalidInput("scenario parameter '" + name + "' must be finite");
    if (it->integer && value != std::round(value)) {
      throw InvalidInput("scenario parameter '" + name + "' must be an integer");
    }
    out[name] = value;
  }
  return out;
}

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> registry = [] {
    std::vector<Scenario> r;
    r.push_back(Scenario{
        "saddle",
        "sin(x1)*sin(x2) + b*cos(x2)",
        "Hyperbolic-saddle datum from the Constantin-Majda-Tabak QG studies (b = 1 there); "
        "level sets near the saddle close up into a front.",
        {{"b", 1.0, "weight of the cos(x2) term"}},
        [](double x1, double x2, const ParamMap& p) {
          return std::sin(x1) * std::sin(x2) + p.at("b") * std::cos(x2);
        }});
    r.push_back(Scenario{"shear",
                         "sin(k*x2)",
                         "Parallel shear; an exact steady state of both equations.",
                         {{"k", 1.0, "wavenumber", true}},
                         [](double, double x2, const ParamMap& p) { return std::sin(p.at("k") * x2); }});
    r.push_back(Scenario{"taylor-green",
                         "sin(x1)*sin(x2)",
                         "Taylor-Green cell; psi is proportional to q, so the flow is steady.",
                         {},
                         [](double x1, double x2, const ParamMap&) {
                           return std::sin(x1) * std::sin(x2);
                         }});
    r.push_back(Scenario{
        "two-band",
        "tanh((y-pi-d/2)/w) - tanh((y-pi+d/2)/w), y = x2 - eps*sin(x1)",
        "Band of width d with edge thickness w centred on x2 = pi; eps bends it so the band "
        "shears itself. Recentred to zero mean on the grid.",
        {{"d", 1.0, "band width"}, {"w", 0.2, "edge thickness"}, {"eps", 0.0, "sinusoidal displacement"}},
        [](double x1, double x2, const ParamMap& p) {
          constexpr double pi = 3.14159265358979323846;
          const double d = p.at("d");
          const double w = p.at("w");
          const double y = x2 - p.at("eps") * std::sin(x1);
          return std::tanh((y - pi - 0.5 * d) / w) - std::tanh((y - pi + 0.5 * d) / w);
        }});
    return r;
  }();
  return registry;
}

const Scenario* find_scenario(const std::string& name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

InitialField sample_scenario(const Scenario& scenario, const Grid& grid, FieldKind kind,
                             const ParamMap& overrides) {
  const ParamMap params = scenario.resolve(overrides);
  if (scenario.name == "two-band" && !(params.at("w") > 0.0)) {
    throw InvalidInput("two-band: w must be positive");
  }
  std::vector<double> v(grid.size());
  for (int j1 = 0; j1 < grid.n1(); ++j1) {
    for (int j2 = 0; j2 < grid.n2(); ++j2) {
      v[std::size_t(j1) * grid.n2() + j2] = scenario.q0(grid.x1(j1), grid.x2(j2), params);
    }
  }
  ScalarField q(grid, kind, std::move(v));
  const double mean = q.remove_mean();
  return {std::move(q), mean};
}

std::vector<SelfTestResult> scenario_self_test(int n) {
  const Grid grid(n);
  std::vector<SelfTestResult> out;
  for (FieldKind kind : {FieldKind::QgTheta, FieldKind::EulerVorticity}) {
    for (const char* name : {"shear", "taylor-green"}) {
      const auto init = sample_scenario(*find_scenario(name), grid, kind);
      const ScalarField r = evolve::rhs(init.q);
      out.push_back({std::string(name) + " rhs (" + to_string(kind) + ")", r.max_abs(), 1e-12});
    }
  }
  return out;
}

}  // namespace frontlab::lab

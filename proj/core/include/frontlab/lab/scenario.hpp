#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "frontlab/grid.hpp"

namespace frontlab::lab {

using ParamMap = std::map<std::string, double>;

struct ScenarioParam {
  std::string name;
  double default_value = 0.0;
  std::string doc;
  bool integer = false;
};

struct Scenario {
  std::string name;
  std::string formula;
  std::string doc;
  std::vector<ScenarioParam> params;
  std::function<double(double x1, double x2, const ParamMap& p)> q0;

  /// Defaults overlaid with `overrides`; unknown names or non-integer values
  /// for integer parameters throw InvalidInput.
  ParamMap resolve(const ParamMap& overrides) const;
};

const std::vector<Scenario>& builtin_scenarios();

/// nullptr when no scenario has this name.
const Scenario* find_scenario(const std::string& name);

struct InitialField {
  ScalarField q;
  /// Grid mean subtracted from the closed form.
  double removed_mean = 0.0;
};

InitialField sample_scenario(const Scenario& scenario, const Grid& grid, FieldKind kind,
                             const ParamMap& overrides = {});

struct SelfTestResult {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return value <= tolerance; }
};

/// Registration-time checks: the shear datum has zero tendency under both
/// equations, and the eigenfunction data are steady.
std::vector<SelfTestResult> scenario_self_test(int n = 32);

}  // namespace frontlab::lab

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frontlab/error.hpp"
#include "frontlab/evolve.hpp"
#include "frontlab/front.hpp"
#include "frontlab/grid.hpp"

namespace frontlab::lab {

inline constexpr int kFormatVersion = 1;

struct FrontConfig {
  double G1 = 0.0;
  double G2 = 0.0;
  front::Window window;
  front::Bracket bracket1;
  front::Bracket bracket2;
  /// Resolution exit: stop once δ_min < this many grid spacings.
  double min_thickness_cells = 4.0;
  bool dump_curves = false;

  friend bool operator==(const FrontConfig&, const FrontConfig&) = default;
};

struct ModulusConfig {
  std::size_t pair_count = 10000;
  double tau_floor = 1e-6;
  double tau_max = 0.36787944117144233;
  /// Estimate at snapshots that are multiples of this time.
  double interval = 0.5;
  int refine_top = 0;
  /// Put half the pairs in the box spanned by the front window and brackets.
  bool focus = true;
  bool dump_pairs = false;

  friend bool operator==(const ModulusConfig&, const ModulusConfig&) = default;
};

struct RunConfig {
  FieldKind equation = FieldKind::QgTheta;
  int n1 = 0;
  int n2 = 0;
  evolve::SolverConfig solver;
  std::string scenario;
  std::map<std::string, double> scenario_params;
  std::optional<FrontConfig> front;
  std::optional<ModulusConfig> modulus;
  std::string output_dir = "frontlab-out";
  std::uint64_t seed = 42;
  /// 0 writes only the final checkpoint.
  double checkpoint_interval = 0.0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Every problem found in a config document, in input order.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses the flat INI-like run format (see README). Throws ConfigError with
/// all problems at once.
RunConfig parse_config(std::string_view text);

/// Canonical text with every default written out; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace frontlab::lab

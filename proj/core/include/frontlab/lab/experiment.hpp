#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/bound_fit.hpp"
#include "frontlab/checkpoint.hpp"
#include "frontlab/front.hpp"
#include "frontlab/lab/config.hpp"
#include "frontlab/modulus.hpp"

namespace frontlab::lab {

enum class RunStatus {
  Completed,
  /// Thinnest front fell below min_thickness_cells grid spacings.
  ResolutionExit,
  SolverAbort,
  /// NonGraph or NoCrossing while tracking.
  AnsatzFailure,
  /// δ_min reached 0.
  Collapsed,
};

const char* to_string(RunStatus status) noexcept;

/// 0 for Completed/ResolutionExit, 3 for solver aborts, 4 for tracking failures.
int exit_code(RunStatus status) noexcept;

struct DiagnosticsRow {
  double t = 0.0;
  std::optional<front::FrontDiagnostics> front;
  std::optional<double> modulus;
  double u_sup_integral = 0.0;
  double l2_norm = 0.0;
  double linf_norm = 0.0;
  double max_grad = 0.0;
};

struct PairRecord {
  double t = 0.0;
  modulus::PairSample sample;
};

struct CurveRecord {
  double t = 0.0;
  int curve = 1;
  front::CurveSample sample;
};

struct ExperimentResult {
  ExperimentResult(RunConfig c, evolve::SimulationState initial)
      : config(std::move(c)), final_state(std::move(initial)) {}

  RunConfig config;
  RunStatus status = RunStatus::Completed;
  std::string detail;
  std::vector<DiagnosticsRow> rows;

  std::optional<front::BoundFit> fit;
  /// Why no fit was produced, when it was not.
  std::string fit_note;
  std::optional<front::AreaFluxReport> area_flux;
  std::optional<front::GraphEvolutionReport> graph_lower;
  std::optional<front::GraphEvolutionReport> graph_upper;

  /// Running minimum of δ_min/δ_max over tracked snapshots.
  double c_min = 0.0;
  /// Largest modulus estimate over the run.
  double M_max = 0.0;
  bool has_modulus = false;
  double front_length = 0.0;
  /// M_max / (c_min · front_length); NaN without modulus data.
  double slope_bound = 0.0;

  std::vector<PairRecord> pairs;
  std::vector<CurveRecord> curves;
  evolve::SimulationState final_state;
  double wall_seconds = 0.0;
};

struct ExperimentOptions {
  bool write_bundle = true;
  std::optional<std::filesystem::path> output_dir;
};

ExperimentResult run_experiment(const RunConfig& config, ExperimentOptions options = {});

/// Continues a checkpointed run to t_end (the stored one unless overridden).
/// The new bundle covers [t_checkpoint, t_end].
ExperimentResult resume_experiment(const Checkpoint& checkpoint, ExperimentOptions options = {},
                                   std::optional<double> t_end = std::nullopt);

/// Writes config.ini, diagnostics.csv, fit.json, verification.json,
/// checkpoint.bin, manifest.json and, when present, abort.json, pairs.csv
/// and curves.csv. Stale files from an earlier run are removed first.
void write_bundle(const std::filesystem::path& dir, const ExperimentResult& result);

/// diagnostics.csv contents.
std::string diagnostics_csv(const ExperimentResult& result);

}  // namespace frontlab::lab

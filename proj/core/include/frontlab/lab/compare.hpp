#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frontlab/grid.hpp"
#include "frontlab/lab/config.hpp"

namespace frontlab::lab {

struct BundleSummary {
  std::filesystem::path dir;
  RunConfig config;
  double final_t = 0.0;
  std::optional<double> final_area;
  std::optional<double> final_delta_min;
  std::optional<double> final_modulus;
  std::optional<double> A_hat;
  std::optional<double> B_hat;
  std::string diagnostics_text;
};

BundleSummary load_bundle(const std::filesystem::path& dir);

struct RichardsonEntry {
  std::array<std::size_t, 3> rows{};  // indices into CompareTable::rows, dt descending
  double ratio = 0.0;
};

struct ResolutionEntry {
  std::size_t coarse = 0;
  std::size_t fine = 0;
  std::size_t shared_times = 0;
  double max_relative_modulus_gap = 0.0;
};

struct CompareTable {
  std::vector<BundleSummary> rows;
  std::vector<RichardsonEntry> richardson;
  std::vector<ResolutionEntry> resolution;
  std::vector<std::pair<std::size_t, std::size_t>> identical;
};

/// ‖q_coarse − q_mid‖∞ / ‖q_mid − q_fine‖∞; 16 for a fourth-order scheme
/// with dt halved twice.
double richardson_ratio(const ScalarField& coarse, const ScalarField& mid, const ScalarField& fine);

/// Bundles must share scenario and equation.
CompareTable compare_runs(std::span<const std::filesystem::path> dirs);

std::string format_table(const CompareTable& table);

}  // namespace frontlab::lab

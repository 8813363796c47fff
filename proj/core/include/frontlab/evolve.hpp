#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/error.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::evolve {

enum class Dealias { TwoThirds, None };

/// ν(−Δ)^p damping added to the transport right-hand side.
struct Hyperviscosity {
  double nu = 0.0;
  int power = 4;

  friend bool operator==(const Hyperviscosity&, const Hyperviscosity&) = default;
};

struct SolverConfig {
  double dt_init = 1e-2;
  double cfl = 0.5;
  double t_end = 1.0;
  Dealias dealias = Dealias::TwoThirds;
  std::optional<Hyperviscosity> dissipation;
  double snapshot_interval = 0.1;
  /// Integrates q_t = +u·∇q instead of −u·∇q (time-reversal checks).
  bool reverse_velocity = false;

  /// Throws InvalidInput listing every violated constraint.
  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct SimulationState {
  double t = 0.0;
  ScalarField q;
  std::int64_t step_count = 0;
  /// Running trapezoid-rule ∫₀ᵗ ‖u‖_∞ ds.
  double u_sup_integral = 0.0;
};

enum class AbortReason { NonFinite, DtUnderflow };
const char* to_string(AbortReason reason) noexcept;

/// Raised when a step cannot be completed. Carries the last good state.
class SolverAbort : public Error {
 public:
  SolverAbort(AbortReason reason, SimulationState last_good, const std::string& message);

  AbortReason reason() const noexcept { return reason_; }
  const SimulationState& last_good() const noexcept { return last_good_; }

 private:
  AbortReason reason_;
  SimulationState last_good_;
};

/// Smallest allowed CFL step before the run is declared blown up.
inline constexpr double kDtFloor = 1e-10;
/// Velocity floor in the CFL division, for zero initial velocity.
inline constexpr double kVelocityFloor = 1e-8;

/// Pseudo-spectral RK4 integrator for (∂t + u·∇)q = 0 with u = ∇⊥ψ.
/// Holds FFT plans and scratch buffers; one instance per driving thread.
class Evolver {
 public:
  Evolver(const Grid& grid, FieldKind kind, SolverConfig config);
  ~Evolver();
  Evolver(const Evolver&) = delete;
  Evolver& operator=(const Evolver&) = delete;

  const SolverConfig& config() const noexcept { return config_; }
  const Grid& grid() const noexcept { return grid_; }
  FieldKind kind() const noexcept { return kind_; }

  /// −u·∇q (dealiased per config) minus the optional dissipation term.
  ScalarField rhs(const ScalarField& q);

  /// One RK4 step of size min(dt_init, cfl·h/max(‖u‖∞, ε), dt_cap).
  SimulationState step(const SimulationState& state,
                       double dt_cap = std::numeric_limits<double>::infinity());

  /// ‖u‖_∞ of the field's velocity (on grid samples).
  double velocity_sup_of(const ScalarField& q);

 private:
  struct Workspace;

  double compute_rhs(const std::complex<double>* q_hat, std::complex<double>* out);
  double velocity_sup_spectral(const std::complex<double>* q_hat);

  Grid grid_;
  FieldKind kind_;
  SolverConfig config_;
  std::unique_ptr<Workspace> ws_;
};

ScalarField rhs(const ScalarField& q, const SolverConfig& config = {});
SimulationState step(const SimulationState& state, const SolverConfig& config);

enum class ObserverAction { Continue, Stop };
using Observer = std::function<ObserverAction(const SimulationState&)>;

struct RunResult {
  SimulationState final_state;
  std::vector<double> snapshot_times;
  bool stopped_by_observer = false;
};

struct RunOptions {
  /// Emit the starting state as a snapshot (off when resuming: the
  /// checkpointed snapshot was already observed).
  bool emit_initial = true;
};

/// Integrates to config.t_end, landing exactly on every multiple of
/// snapshot_interval (and on t_end) and invoking each observer there.
/// Deterministic: the step sequence depends only on the state and config.
RunResult run(const SimulationState& initial, const SolverConfig& config,
              const std::vector<Observer>& observers, RunOptions options = {});
RunResult run(Evolver& evolver, const SimulationState& initial,
              const std::vector<Observer>& observers, RunOptions options = {});

}  // namespace frontlab::evolve

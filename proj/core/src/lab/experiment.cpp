#include "frontlab/lab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "frontlab/lab/scenario.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::lab {

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::ResolutionExit:
      return "resolution-exit";
    case RunStatus::SolverAbort:
      return "solver-abort";
    case RunStatus::AnsatzFailure:
      return "ansatz-failure";
    case RunStatus::Collapsed:
      return "collapsed";
  }
  return "unknown";
}

int exit_code(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Completed:
    case RunStatus::ResolutionExit:
      return 0;
    case RunStatus::SolverAbort:
      return 3;
    case RunStatus::AnsatzFailure:
    case RunStatus::Collapsed:
      return 4;
  }
  return 1;
}

namespace {

bool on_multiple(double t, double interval) {
  const double k = std::round(t / interval);
  return std::abs(t - k * interval) <= 1e-9 * std::max(1.0, std::abs(t));
}

class Tracker {
 public:
  Tracker(const RunConfig& config, ExperimentResult& result) : cfg_(config), res_(result) {}

  evolve::ObserverAction observe(const evolve::SimulationState& s) {
    DiagnosticsRow row;
    row.t = s.t;
    row.u_sup_integral = s.u_sup_integral;
    const Norms n = norms(s.q);
    row.l2_norm = n.l2;
    row.linf_norm = n.linf;
    row.max_grad = max_gradient_norm(s.q);

    const bool need_psi = cfg_.front.has_value() || cfg_.modulus.has_value();
    std::optional<SpectralCoeffs> q_hat;
    std::optional<SpectralCoeffs> psi;
    if (need_psi) {
      q_hat = to_spectral(s.q);
      psi = stream_function(s.q);
    }

    bool stop = false;
    if (cfg_.front) stop = track(s, *q_hat, *psi, row);
    if (cfg_.modulus && on_multiple(s.t, cfg_.modulus->interval)) estimate(s, *psi, row);
    res_.rows.push_back(row);
    return stop ? evolve::ObserverAction::Stop : evolve::ObserverAction::Continue;
  }

  std::vector<front::GraphSnapshot> lower_history;
  std::vector<front::GraphSnapshot> upper_history;

 private:
  bool track(const evolve::SimulationState& s, const SpectralCoeffs& q_hat, const SpectralCoeffs& psi,
             DiagnosticsRow& row) {
    const FrontConfig& f = *cfg_.front;
    front::LevelCurve c1;
    front::LevelCurve c2;
    try {
      c1 = front::extract_level_curve(q_hat, f.G1, f.window, f.bracket1, 1.0);
      c2 = front::extract_level_curve(q_hat, f.G2, f.window, f.bracket2, 2.0);
    } catch (const front::NonGraph& e) {
      fail(RunStatus::AnsatzFailure, s.t, e.what());
      return true;
    } catch (const front::NoCrossing& e) {
      fail(RunStatus::AnsatzFailure, s.t, e.what());
      return true;
    }
    // Keep φ₂ above φ₁ in the orientation seen at the first snapshot.
    if (!orientation_) orientation_ = front::area_between_curves(c1, c2) < 0.0 ? -1 : 1;
    const front::LevelCurve& lower = *orientation_ > 0 ? c1 : c2;
    const front::LevelCurve& upper = *orientation_ > 0 ? c2 : c1;

    const front::FrontDiagnostics d = front::diagnose(s.t, psi, lower, upper, s.u_sup_integral);
    row.front = d;
    res_.front_length = d.front_length;
    if (f.dump_curves) {
      for (const auto& p : lower.samples) res_.curves.push_back({s.t, 1, p});
      for (const auto& p : upper.samples) res_.curves.push_back({s.t, 2, p});
    }
    if (d.delta_min == 0.0) {
      fail(RunStatus::Collapsed, s.t, "fronts touch (delta_min = 0)");
      return true;
    }
    res_.c_min = tracked_ == 0 ? d.semi_uniformity_c : std::min(res_.c_min, d.semi_uniformity_c);
    ++tracked_;
    lower_history.push_back({s.t, lower, front::composite_stream(psi, lower)});
    upper_history.push_back({s.t, upper, front::composite_stream(psi, upper)});
    if (d.delta_min < f.min_thickness_cells * s.q.grid().min_spacing()) {
      res_.status = RunStatus::ResolutionExit;
      res_.detail = "delta_min " + format_double(d.delta_min) + " below " +
                    format_double(f.min_thickness_cells) + " grid spacings";
      return true;
    }
    return false;
  }

  void estimate(const evolve::SimulationState& s, const SpectralCoeffs& psi, DiagnosticsRow& row) {
    const ModulusConfig& m = *cfg_.modulus;
    modulus::SamplingPlan plan;
    plan.pair_count = m.pair_count;
    plan.tau_floor = m.tau_floor;
    plan.tau_max = m.tau_max;
    plan.seed = cfg_.seed;
    plan.refine_top = m.refine_top;
    if (m.focus && cfg_.front) {
      const FrontConfig& f = *cfg_.front;
      plan.focus = modulus::Box{f.window.a, f.window.b, std::min(f.bracket1.lo, f.bracket2.lo),
                                std::max(f.bracket1.hi, f.bracket2.hi)};
    }
    const auto est = modulus::estimate_modulus(psi, cfg_.equation, plan, m.dump_pairs);
    row.modulus = est.M_hat;
    res_.M_max = res_.has_modulus ? std::max(res_.M_max, est.M_hat) : est.M_hat;
    res_.has_modulus = true;
    for (const auto& sample : est.samples) res_.pairs.push_back({s.t, sample});
  }

  void fail(RunStatus status, double t, const std::string& what) {
    res_.status = status;
    res_.detail = "t = " + format_double(t) + ": " + what;
  }

  const RunConfig& cfg_;
  ExperimentResult& res_;
  std::optional<int> orientation_;
  std::size_t tracked_ = 0;
};

void finish(ExperimentResult& res, Tracker& tracker) {
  res.slope_bound = std::numeric_limits<double>::quiet_NaN();
  if (!res.config.front) {
    res.fit_note = "no front configured";
    return;
  }
  std::vector<double> t;
  std::vector<double> area;
  std::vector<double> flux;
  for (const auto& row : res.rows) {
    if (!row.front || row.front->delta_min == 0.0) continue;
    t.push_back(row.t);
    area.push_back(row.front->area_A);
    flux.push_back(row.front->flux_F);
  }
  const auto model = res.config.equation == FieldKind::QgTheta ? front::BoundModel::DoubleExponential
                                                                : front::BoundModel::Exponential;
  std::optional<double> bound;
  if (res.has_modulus && res.c_min > 0.0 && res.front_length > 0.0) {
    res.slope_bound = res.M_max / (res.c_min * res.front_length);
    bound = res.slope_bound;
  }
  try {
    res.fit = front::fit_bound_envelope(t, area, model, bound);
  } catch (const front::Unfittable& e) {
    res.fit_note = e.what();
  } catch (const InvalidInput& e) {
    res.fit_note = e.what();
  }
  if (t.size() >= 3) res.area_flux = front::verify_area_flux(t, area, flux);
  if (tracker.lower_history.size() >= 3) {
    res.graph_lower = front::verify_graph_evolution(tracker.lower_history);
    res.graph_upper = front::verify_graph_evolution(tracker.upper_history);
    if (res.status == RunStatus::AnsatzFailure) {
      res.graph_lower->partial = true;
      res.graph_upper->partial = true;
    }
  }
}

ExperimentResult execute(const RunConfig& config, const evolve::SimulationState& initial,
                         const ExperimentOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  config.solver.validate();
  ExperimentResult res(config, initial);
  if (options.output_dir) res.config.output_dir = options.output_dir->string();
  const std::filesystem::path dir = res.config.output_dir;
  const std::string config_text = dump_config(res.config);

  Tracker tracker(res.config, res);
  std::vector<evolve::Observer> observers;
  observers.push_back([&](const evolve::SimulationState& s) { return tracker.observe(s); });
  if (options.write_bundle && config.checkpoint_interval > 0.0) {
    std::filesystem::create_directories(dir);
    observers.push_back([&, interval = config.checkpoint_interval](const evolve::SimulationState& s) {
      if (on_multiple(s.t, interval)) save_checkpoint(dir / "checkpoint.bin", {s, config_text});
      return evolve::ObserverAction::Continue;
    });
  }

  evolve::Evolver evolver(initial.q.grid(), config.equation, config.solver);
  try {
    res.final_state = evolve::run(evolver, initial, observers).final_state;
  } catch (const evolve::SolverAbort& e) {
    res.status = RunStatus::SolverAbort;
    res.detail = std::string(evolve::to_string(e.reason())) + ": " + e.what();
    res.final_state = e.last_good();
  }
  finish(res, tracker);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (options.write_bundle) write_bundle(dir, res);
  return res;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, ExperimentOptions options) {
  const Scenario* scenario = find_scenario(config.scenario);
  if (!scenario) throw InvalidInput("unknown scenario '" + config.scenario + "'");
  const Grid grid(config.n1, config.n2);
  auto init = sample_scenario(*scenario, grid, config.equation, config.scenario_params);
  evolve::SimulationState state{0.0, std::move(init.q), 0, 0.0};
  return execute(config, state, options);
}

ExperimentResult resume_experiment(const Checkpoint& checkpoint, ExperimentOptions options,
                                   std::optional<double> t_end) {
  RunConfig config = parse_config(checkpoint.config_text);
  if (t_end) config.solver.t_end = *t_end;
  if (checkpoint.state.q.grid() != Grid(config.n1, config.n2) ||
      checkpoint.state.q.kind() != config.equation) {
    throw InvalidInput("checkpoint field does not match its stored config");
  }
  return execute(config, checkpoint.state, options);
}

}  // namespace frontlab::lab

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frontlab/bound_fit.hpp"
#include "frontlab/evolve.hpp"
#include "frontlab/front.hpp"
#include "frontlab/kernel_split.hpp"
#include "frontlab/lab/compare.hpp"
#include "frontlab/lab/config.hpp"
#include "frontlab/lab/experiment.hpp"
#include "frontlab/lab/scenario.hpp"
#include "frontlab/modulus.hpp"
#include "frontlab/spectral.hpp"

namespace fl = frontlab;
namespace lab = frontlab::lab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

fl::ScalarField sample(const fl::Grid& grid, fl::FieldKind kind,
                       const std::function<double(double, double)>& f) {
  fl::ScalarField q(grid, kind);
  for (int j1 = 0; j1 < grid.n1(); ++j1) {
    for (int j2 = 0; j2 < grid.n2(); ++j2) q(j1, j2) = f(grid.x1(j1), grid.x2(j2));
  }
  return q;
}

fl::ScalarField scenario_field(const std::string& name, int n, fl::FieldKind kind,
                               const lab::ParamMap& params = {}) {
  return lab::sample_scenario(*lab::find_scenario(name), fl::Grid(n), kind, params).q;
}

double max_diff(const fl::ScalarField& a, const fl::ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

// 1. Eigenfunction identities on 20 pure modes per order, divergence-free velocity.
Outcome operator_exactness() {
  const fl::Grid grid(32);
  const int modes[20][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {1, -2}, {3, 1}, {-2, 3}, {4, 4},
                            {5, 0}, {0, 7}, {3, -5}, {6, 2}, {-7, 1}, {8, 3}, {2, 9}, {10, -4},
                            {11, 5}, {-6, 12}, {13, 0}, {9, 9}};
  double worst = 0.0;
  for (auto order : {fl::RieszOrder::Half, fl::RieszOrder::One}) {
    const double a = order == fl::RieszOrder::Half ? 0.5 : 1.0;
    for (const auto& k : modes) {
      const auto q = sample(grid, fl::FieldKind::QgTheta, [&](double x1, double x2) {
        return std::cos(k[0] * x1 + k[1] * x2) + 0.5 * std::sin(k[0] * x1 + k[1] * x2);
      });
      const auto psi = fl::from_spectral(fl::invert_fractional_laplacian(fl::to_spectral(q), order));
      const double scale = std::pow(double(k[0] * k[0] + k[1] * k[1]), -a);
      for (std::size_t i = 0; i < q.values().size(); ++i) {
        worst = std::max(worst, std::abs(psi.values()[i] - scale * q.values()[i]) /
                                    (scale * q.max_abs()));
      }
    }
  }
  double div = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto kind : {fl::FieldKind::QgTheta, fl::FieldKind::EulerVorticity}) {
    for (int trial = 0; trial < 10; ++trial) {
      fl::SpectralCoeffs c(grid);
      for (int k1 = -6; k1 <= 6; ++k1) {
        for (int k2 = 0; k2 <= 6; ++k2) {
          if ((k2 == 0 && k1 <= 0)) continue;
          c.set_mode(k1, k2, {u(rng), u(rng)});
        }
      }
      div = std::max(div, fl::spectral_divergence(fl::velocity_from_scalar(fl::from_spectral(c, kind))));
    }
  }
  return {worst < 1e-12 && div < 1e-12,
          "max eigen error " + g(worst) + " (< 1e-12), divergence " + g(div) + " (< 1e-12)"};
}

// 2. Steady states over 100 RK4 steps at 64².
Outcome steady_states() {
  fl::evolve::SolverConfig cfg;
  cfg.dt_init = 1e-2;
  struct Case {
    std::string name;
    fl::ScalarField q;
  };
  std::vector<Case> cases;
  cases.push_back({"shear/qg", scenario_field("shear", 64, fl::FieldKind::QgTheta)});
  cases.push_back({"shear/euler", scenario_field("shear", 64, fl::FieldKind::EulerVorticity)});
  cases.push_back({"taylor-green/euler", scenario_field("taylor-green", 64, fl::FieldKind::EulerVorticity)});
  cases.push_back({"eigenfunction/qg", scenario_field("taylor-green", 64, fl::FieldKind::QgTheta)});
  double worst = 0.0;
  std::string detail;
  for (const auto& c : cases) {
    fl::evolve::Evolver ev(c.q.grid(), c.q.kind(), cfg);
    fl::evolve::SimulationState s{0.0, c.q, 0, 0.0};
    for (int i = 0; i < 100; ++i) s = ev.step(s);
    const double d = max_diff(s.q, c.q);
    worst = std::max(worst, d);
    detail += c.name + " " + g(d) + "; ";
  }
  return {worst < 1e-10, detail + "max " + g(worst) + " (< 1e-10)"};
}

// 3. L2 and L∞ conservation, 128² saddle, dt = 1e-3, t in [0, 1].
Outcome conservation() {
  const auto q0 = scenario_field("saddle", 128, fl::FieldKind::QgTheta);
  fl::evolve::SolverConfig cfg;
  cfg.dt_init = 1e-3;
  cfg.t_end = 1.0;
  cfg.snapshot_interval = 0.1;
  const auto n0 = fl::norms(q0);
  double l2_drift = 0.0;
  double linf_growth = 0.0;
  fl::evolve::run({0.0, q0, 0, 0.0}, cfg, {[&](const fl::evolve::SimulationState& s) {
                    const auto n = fl::norms(s.q);
                    l2_drift = std::max(l2_drift, std::abs(n.l2 - n0.l2) / n0.l2);
                    linf_growth = std::max(linf_growth, (n.linf - n0.linf) / n0.linf);
                    return fl::evolve::ObserverAction::Continue;
                  }});
  return {l2_drift < 1e-6 && linf_growth < 1e-6,
          "L2 drift " + g(l2_drift) + " (< 1e-6), Linf growth " + g(linf_growth) + " (< 1e-6)"};
}

lab::RunConfig saddle_config(int n, double t_end, double interval, const std::string& out) {
  lab::RunConfig c;
  c.equation = fl::FieldKind::QgTheta;
  c.n1 = c.n2 = n;
  c.scenario = "saddle";
  c.solver.t_end = t_end;
  c.solver.snapshot_interval = interval;
  lab::FrontConfig f;
  f.G1 = 0.4;
  f.G2 = 0.8;
  f.window = {2.6, 3.6};
  f.bracket1 = f.bracket2 = {0.3, 3.0};
  c.front = f;
  c.output_dir = out;
  return c;
}

// 4. Column-wise ∂φ/∂t against d/dx1 ψ(x1, φ) on the early window.
Outcome graph_evolution(const fs::path& work) {
  auto cfg = saddle_config(256, 0.5, 0.01, (work / "c4").string());
  const auto r = lab::run_experiment(cfg, {false, std::nullopt});
  if (!r.graph_lower || !r.graph_upper) return {false, "no report: " + r.detail};
  const double rel = std::max(r.graph_lower->relative_mismatch, r.graph_upper->relative_mismatch);
  return {rel < 0.01 && !r.graph_lower->partial,
          "relative mismatch " + g(rel) + " (< 0.01) over " +
              std::to_string(r.graph_lower->snapshots_used) + " snapshots"};
}

struct Shared {
  std::optional<lab::ExperimentResult> qg;
};

const lab::ExperimentResult& qg_run(Shared& shared, const fs::path& work) {
  if (!shared.qg) {
    auto cfg = saddle_config(256, 20.0, 0.05, (work / "c8").string());
    lab::ModulusConfig m;
    m.interval = 0.5;
    cfg.modulus = m;
    shared.qg = lab::run_experiment(cfg, {false, std::nullopt});
  }
  return *shared.qg;
}

// 5. Centred dA/dt against the corner flux over the tracked window. The
// O(Δt²) allowance is estimated from the second differences of the flux
// series: |F''|·Δt²/6, normalised like the mismatch.
Outcome area_flux(Shared& shared, const fs::path& work) {
  const auto& r = qg_run(shared, work);
  if (!r.area_flux) return {false, "no area-flux report: " + r.detail};
  const auto& a = *r.area_flux;
  double curvature = 0.0;
  for (std::size_t i = 1; i + 1 < a.flux.size(); ++i) {
    const double dt = a.t[i + 1] - a.t[i];
    curvature = std::max(curvature, std::abs(a.flux[i + 1] - 2 * a.flux[i] + a.flux[i - 1]) / (dt * dt));
  }
  const double dt = r.config.solver.snapshot_interval;
  const double allowance = curvature * dt * dt / 6.0 / a.max_abs_flux;
  return {a.relative_mismatch < 0.02 + allowance,
          "relative mismatch " + g(a.relative_mismatch) + " (< 0.02 + " + g(allowance) +
              ") over " + std::to_string(a.t.size()) + " snapshots to t = " + g(r.final_state.t)};
}

// 6. Modulus on the saddle datum at 256².
Outcome modulus_stability() {
  const auto q = scenario_field("saddle", 256, fl::FieldKind::QgTheta);
  const auto psi = fl::stream_function(q);
  fl::modulus::SamplingPlan plan;
  plan.pair_count = 10000;
  const auto e1 = fl::modulus::estimate_modulus(psi, fl::FieldKind::QgTheta, plan, true);
  plan.pair_count = 20000;
  const auto e2 = fl::modulus::estimate_modulus(psi, fl::FieldKind::QgTheta, plan);
  const double change = std::abs(e2.M_hat - e1.M_hat) / e1.M_hat;
  bool bounded = std::isfinite(e1.M_hat);
  for (const auto& s : e1.samples) {
    bounded = bounded && std::abs(s.psi_diff) <= e1.M_hat * s.pair.tau * std::abs(std::log(s.pair.tau));
  }
  // Decade maxima, from the largest τ down, must not rise.
  bool no_drift = true;
  const auto& curve = e1.ratio_curve;
  for (std::size_t i = curve.size() - 1; i > 0; --i) {
    if (curve[i - 1].max_ratio > curve[i].max_ratio) no_drift = false;
  }
  return {bounded && change < 0.05 && no_drift,
          "M_hat " + g(e1.M_hat) + " -> " + g(e2.M_hat) + " (change " + g(change) +
              " < 0.05), bound holds on all pairs: " + (bounded ? "yes" : "no") +
              ", decade maxima non-increasing toward tau_floor: " + (no_drift ? "yes" : "no")};
}

// 7. Kernel-split region shapes over τ ∈ {1e-2, 1e-3, 1e-4}.
Outcome kernel_regions() {
  const auto theta = scenario_field("saddle", 64, fl::FieldKind::QgTheta);
  const double taus[] = {1e-2, 1e-3, 1e-4};
  const auto rep = fl::modulus::verify_region_bounds(theta, taus, 1.0);
  std::string d = "growth I1 " + g(rep.growth[0]) + ", I2 " + g(rep.growth[1]) + ", I3 " +
                  g(rep.growth[2]) + " (<= 2); constants " + g(rep.constants[0]) + ", " +
                  g(rep.constants[1]) + ", " + g(rep.constants[2]);
  return {rep.excluded_taus.empty() && rep.taus.size() == 3 && rep.bounded(2.0), d};
}

// 8. Double-exponential lower bound on the QG saddle run.
Outcome theorem_qg(Shared& shared, const fs::path& work) {
  const auto& r = qg_run(shared, work);
  if (!r.fit) return {false, "no fit: " + r.fit_note};
  const auto& f = *r.fit;
  const double bound = r.M_max / (r.c_min * r.front_length);
  // max_violation is non-positive by construction of B_hat; the a-priori
  // envelope (slope bound from t0) is the substantive dip check.
  const bool ok = f.max_violation <= 1e-3 && f.theory_violation <= 1e-3 &&
                  f.empirical_slope <= bound * 1.2;
  return {ok, "stop " + std::string(lab::to_string(r.status)) + " at t = " + g(r.final_state.t) +
                  "; max_violation " + g(f.max_violation) + ", a-priori envelope violation " +
                  g(f.theory_violation) + " (<= 1e-3; least-squares intercept would give " +
                  g(f.max_violation_ls) + "); slope " +
                  g(f.empirical_slope) + " <= " + g(bound) + " x 1.2 (M " + g(r.M_max) +
                  ", c_min " + g(r.c_min) + ", b-a " + g(r.front_length) + "); " +
                  std::to_string(f.points_used) + " points used"};
}

// 9. Exponential lower bound on the sheared two-band Euler run.
Outcome theorem_euler(const fs::path& work) {
  lab::RunConfig c;
  c.equation = fl::FieldKind::EulerVorticity;
  c.n1 = c.n2 = 256;
  c.scenario = "two-band";
  c.scenario_params = {{"eps", 0.2}};
  c.solver.t_end = 20.0;
  c.solver.snapshot_interval = 0.05;
  lab::FrontConfig f;
  f.G1 = -0.5;
  f.G2 = -0.9;
  f.window = {2.74, 3.54};
  f.bracket1 = {1.5, 3.14159};
  f.bracket2 = {3.14159, 4.8};
  c.front = f;
  lab::ModulusConfig m;
  m.interval = 0.5;
  c.modulus = m;
  c.output_dir = (work / "c9").string();
  const auto r = lab::run_experiment(c, {false, std::nullopt});
  if (!r.fit) return {false, "no fit: " + r.fit_note};
  const double bound = r.M_max / (r.c_min * r.front_length);
  return {r.fit->empirical_slope <= bound * 1.2,
          "stop " + std::string(lab::to_string(r.status)) + " at t = " + g(r.final_state.t) +
              "; slope " + g(r.fit->empirical_slope) + " <= " + g(bound) + " x 1.2 (M_lip " +
              g(r.M_max) + ", c_min " + g(r.c_min) + ", b-a " + g(r.front_length) + ")"};
}

// 10. Richardson dt refinement on the saddle, t = 0.5 at 64².
Outcome richardson() {
  const auto q0 = scenario_field("saddle", 64, fl::FieldKind::QgTheta);
  std::vector<fl::ScalarField> finals;
  for (double dt : {0.05, 0.025, 0.0125}) {
    fl::evolve::SolverConfig cfg;
    cfg.dt_init = dt;
    cfg.cfl = 1.0;
    cfg.t_end = 0.5;
    cfg.snapshot_interval = 0.5;
    const auto r = fl::evolve::run({0.0, q0, 0, 0.0}, cfg, {});
    const auto expected = std::llround(0.5 / dt);
    if (r.final_state.step_count != expected) {
      return {false, "CFL limited the step at dt = " + g(dt)};
    }
    finals.push_back(r.final_state.q);
  }
  const double ratio = lab::richardson_ratio(finals[0], finals[1], finals[2]);
  return {ratio >= 12.0 && ratio <= 20.0, "ratio " + g(ratio) + " (in [12, 20])"};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 11. Two identical CLI runs give byte-identical diagnostics.
Outcome reproducibility(const std::string& cli, const fs::path& work) {
  const fs::path dir = work / "c11";
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "equation = qg\nresolution = 64\nscenario = saddle\n\n[solver]\nt_end = 1\n"
           "snapshot_interval = 0.1\n\n[front]\nG1 = 0.4\nG2 = 0.8\nwindow = 2.6, 3.6\n"
           "bracket = 0.3, 3.0\n\n[modulus]\npair_count = 2000\ninterval = 0.5\n";
  }
  std::string texts[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("out" + std::to_string(i));
    const std::string cmd = "\"" + cli + "\" run \"" + (dir / "run.ini").string() + "\" -o \"" +
                            out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "cli exited with status " + std::to_string(rc)};
    texts[i] = read_file(out / "diagnostics.csv");
  }
  const bool same = !texts[0].empty() && texts[0] == texts[1];
  return {same, same ? "diagnostics.csv identical (" + std::to_string(texts[0].size()) + " bytes)"
                     : "diagnostics.csv differs"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frontlab acceptance suite"};
  std::vector<int> only;
  std::string cli = FRONTLAB_CLI_PATH;
  std::string work = (fs::temp_directory_path() / "frontlab-acceptance").string();
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--cli", cli, "Path to the frontlab executable");
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  Shared shared;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator exactness", operator_exactness},
      {"steady states", steady_states},
      {"conservation", conservation},
      {"graph evolution identity", [&] { return graph_evolution(work); }},
      {"area flux identity", [&] { return area_flux(shared, work); }},
      {"log-Lipschitz modulus", modulus_stability},
      {"kernel split shapes", kernel_regions},
      {"QG double-exponential bound", [&] { return theorem_qg(shared, work); }},
      {"Euler exponential bound", [&] { return theorem_euler(work); }},
      {"order of accuracy", richardson},
      {"reproducibility", [&] { return reproducibility(cli, work); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "frontlab/lab/compare.hpp"
#include "frontlab/lab/config.hpp"
#include "frontlab/lab/experiment.hpp"
#include "frontlab/lab/scenario.hpp"

using namespace frontlab;
using namespace frontlab::lab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  fs::path p = fs::path(::testing::TempDir()) / ("frontlab-unit-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> problems_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Config, MinimalFillsDefaults) {
  auto c = parse_config("equation=qg\nresolution=128\nscenario=saddle\n[solver]\nt_end=1\n");
  EXPECT_EQ(c.equation, FieldKind::QgTheta);
  EXPECT_EQ(c.n1, 128);
  EXPECT_EQ(c.n2, 128);
  EXPECT_EQ(c.scenario, "saddle");
  EXPECT_EQ(c.solver.t_end, 1.0);
  EXPECT_EQ(c.solver.dt_init, 1e-2);
  EXPECT_EQ(c.solver.cfl, 0.5);
  EXPECT_EQ(c.solver.dealias, evolve::Dealias::TwoThirds);
  EXPECT_FALSE(c.solver.dissipation.has_value());
  EXPECT_FALSE(c.front.has_value());
  EXPECT_FALSE(c.modulus.has_value());
  EXPECT_EQ(c.seed, 42u);

  const std::string dumped = dump_config(c);
  for (const char* line : {"format_version = 1", "resolution = 128, 128", "dt_init = 0.01", "cfl = 0.5",
                           "dealias = two-thirds", "dissipation = none", "output_dir = frontlab-out"})
    EXPECT_NE(dumped.find(line), std::string::npos) << line;
}

TEST(Config, UnsupportedEquation) {
  auto p = problems_of("equation=mhd\nresolution=64\nscenario=saddle\n[solver]\nt_end=1\n");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_TRUE(mentions(p, "unsupported equation"));
}

TEST(Config, WindowOrderNamesField) {
  auto p = problems_of(
      "equation=qg\nresolution=64\nscenario=saddle\n[solver]\nt_end=1\n"
      "[front]\nG1=0.4\nG2=0.8\nwindow=3.6, 2.6\nbracket=0.3, 3\n");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_TRUE(mentions(p, "front.window"));
}

TEST(Config, AggregatesEveryError) {
  auto p = problems_of(
      "equation=qg\nresolution=63\nscenario=nowhere\nspeed=3\n[solver]\ncfl=abc\n"
      "[scenario]\nb=1\n[weird]\n");
  EXPECT_TRUE(mentions(p, "resolution"));
  EXPECT_TRUE(mentions(p, "speed"));
  EXPECT_TRUE(mentions(p, "cfl"));
  EXPECT_TRUE(mentions(p, "t_end"));
  EXPECT_TRUE(mentions(p, "weird"));
  EXPECT_TRUE(mentions(p, "nowhere"));
  EXPECT_GE(p.size(), 6u);
}

TEST(Config, DuplicateKeysRejected) {
  auto p = problems_of("equation=qg\nequation=euler\nresolution=64\nscenario=shear\n[solver]\nt_end=1\n");
  EXPECT_TRUE(mentions(p, "duplicate"));
}

TEST(Config, ScenarioParametersValidated) {
  auto p = problems_of("equation=qg\nresolution=64\nscenario=shear\n[solver]\nt_end=1\n[scenario]\nk=1.5\nz=2\n");
  EXPECT_TRUE(mentions(p, "k"));
  EXPECT_TRUE(mentions(p, "z"));
}

TEST(Config, RoundTripFullConfig) {
  const char* text =
      "# comment\n"
      "equation = euler\nresolution = 64, 32\nscenario = two-band\noutput_dir = out/x\n"
      "seed = 7\ncheckpoint_interval = 0.5\n"
      "[solver]\ndt_init = 0.003\ncfl = 0.25\nt_end = 2.5\nsnapshot_interval = 0.1\n"
      "dealias = none\ndissipation = hyperviscous\nnu = 1e-12\npower = 2\n"
      "[scenario]\nd = 1.2\neps = 0.1\n"
      "[front]\nG1 = -0.5\nG2 = -0.9\nwindow = 2.74, 3.54\nbracket1 = 1.5, 3.14159\n"
      "bracket2 = 3.14159, 4.8\nmin_thickness_cells = 3\ndump_curves = true\n"
      "[modulus]\npair_count = 123\ntau_floor = 1e-5\ninterval = 0.25\nrefine_top = 4\n"
      "focus = false\ndump_pairs = true\n";
  auto c = parse_config(text);
  EXPECT_EQ(c.n1, 64);
  EXPECT_EQ(c.n2, 32);
  ASSERT_TRUE(c.solver.dissipation);
  EXPECT_EQ(c.solver.dissipation->power, 2);
  ASSERT_TRUE(c.front);
  EXPECT_EQ(c.front->bracket2, (front::Bracket{3.14159, 4.8}));
  ASSERT_TRUE(c.modulus);
  EXPECT_EQ(c.modulus->pair_count, 123u);
  EXPECT_EQ(c.scenario_params.at("eps"), 0.1);
  EXPECT_EQ(parse_config(dump_config(c)), c);
}

TEST(Config, SingleBracketSetsBoth) {
  auto c = parse_config(
      "equation=qg\nresolution=64\nscenario=saddle\n[solver]\nt_end=1\n"
      "[front]\nG1=0.4\nG2=0.8\nwindow=2.6, 3.6\nbracket=0.3, 3\n");
  EXPECT_EQ(c.front->bracket1, c.front->bracket2);
}

TEST(Config, FormatDoubleIsShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.283185307179586, -0.0, 12345.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Scenario, RegistryContents) {
  for (const char* name : {"saddle", "shear", "taylor-green", "two-band"}) {
    ASSERT_NE(find_scenario(name), nullptr) << name;
  }
  EXPECT_EQ(find_scenario("vortex-sheet"), nullptr);
  const auto* s = find_scenario("saddle");
  EXPECT_NEAR(s->q0(0.3, 1.1, s->resolve({})), std::sin(0.3) * std::sin(1.1) + std::cos(1.1), 1e-15);
}

TEST(Scenario, SamplingRemovesMean) {
  Grid g(64);
  auto init = sample_scenario(*find_scenario("two-band"), g, FieldKind::EulerVorticity);
  EXPECT_LT(std::abs(init.q.mean()), 1e-14);
  EXPECT_NEAR(init.removed_mean, -1.0 / kPi, 1e-3);
  auto shear = sample_scenario(*find_scenario("shear"), g, FieldKind::QgTheta, {{"k", 3}});
  EXPECT_NEAR(shear.q(0, 5), std::sin(3 * g.x2(5)), 1e-15);
  EXPECT_THROW(sample_scenario(*find_scenario("shear"), g, FieldKind::QgTheta, {{"k", 0.5}}), InvalidInput);
}

TEST(Scenario, SelfTestPasses) {
  auto results = scenario_self_test();
  EXPECT_GE(results.size(), 4u);
  for (const auto& r : results) EXPECT_TRUE(r.passed()) << r.check << " = " << r.value;
}

TEST(Scenario, TaylorGreenSteadyOverHundredSteps) {
  Grid g(32);
  auto init = sample_scenario(*find_scenario("taylor-green"), g, FieldKind::EulerVorticity);
  evolve::SolverConfig cfg;
  cfg.dt_init = 0.01;
  evolve::Evolver ev(g, FieldKind::EulerVorticity, cfg);
  evolve::SimulationState s{0.0, init.q, 0, 0.0};
  for (int i = 0; i < 100; ++i) s = ev.step(s);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(s.q.values()[i] - init.q.values()[i]));
  EXPECT_LT(err, 1e-10);
}

namespace {

RunConfig shear_config() {
  return parse_config(
      "equation=qg\nresolution=32\nscenario=shear\n[solver]\nt_end=1\nsnapshot_interval=0.25\n"
      "[front]\nG1=0\nG2=0.5\nwindow=1, 2.5\nbracket1=2, 4\nbracket2=0, 1.5\n"
      "[modulus]\npair_count=500\ninterval=0.5\n");
}

}  // namespace

TEST(Experiment, ShearBundleIsFlat) {
  const auto dir = scratch("shear");
  auto r = run_experiment(shear_config(), {true, dir});
  EXPECT_EQ(r.status, RunStatus::Completed);
  ASSERT_EQ(r.rows.size(), 5u);
  const double a0 = r.rows.front().front->area_A;
  EXPECT_NEAR(a0, 5 * kPi / 6, 1e-9);  // curves at x2 = π and x2 = π/6
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.front);
    EXPECT_NEAR(row.front->area_A, a0, 1e-10);
    EXPECT_NEAR(row.front->semi_uniformity_c, 1.0, 1e-10);
    EXPECT_NEAR(row.front->flux_F, 0.0, 1e-12);
  }
  EXPECT_TRUE(r.rows[0].modulus && r.rows[2].modulus && r.rows[4].modulus);
  EXPECT_FALSE(r.rows[1].modulus);
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    EXPECT_GE(r.rows[i].u_sup_integral, r.rows[i - 1].u_sup_integral);

  for (const char* f : {"config.ini", "diagnostics.csv", "fit.json", "verification.json", "checkpoint.bin",
                        "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_FALSE(fs::exists(dir / "abort.json"));
  const auto csv = slurp(dir / "diagnostics.csv");
  EXPECT_EQ(csv.rfind("# format_version=1\n", 0), 0u);
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["status"], "completed");
  EXPECT_EQ(parse_config(slurp(dir / "config.ini")), r.config);
}

TEST(Experiment, TwoBandAreaMatchesClosedForm) {
  const double d = 1.0, w = 0.2, D = d / (2 * w);
  const double P = kPi / w;
  auto lc = [](double x) { return std::abs(x) + std::log1p(std::exp(-2 * std::abs(x))) - std::log(2.0); };
  const double mean = w / kPi * (lc(P - D) - lc(P + D));
  auto offset = [&](double G) {
    return 0.5 * std::acosh(-2.0 * std::sinh(2.0 * D) / (G + mean) - std::cosh(2.0 * D));
  };
  const double expect = w * (offset(-0.5) + offset(-0.9));

  auto cfg = parse_config(
      "equation=euler\nresolution=256\nscenario=two-band\n[solver]\nt_end=0.2\nsnapshot_interval=0.1\n"
      "[front]\nG1=-0.5\nG2=-0.9\nwindow=2.74, 3.54\nbracket1=1.5, 3.14159\nbracket2=3.14159, 4.8\n");
  auto r = run_experiment(cfg, {false, std::nullopt});
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.front->area_A, expect, 1e-8);
    EXPECT_LE(row.front->delta_min, row.front->area_A + 1e-15);
    EXPECT_LE(row.front->area_A, row.front->delta_max + 1e-15);
  }
}

TEST(Experiment, AnsatzFailureStillWritesBundle) {
  const auto dir = scratch("ansatz");
  auto cfg = parse_config(
      "equation=qg\nresolution=32\nscenario=shear\n[solver]\nt_end=1\n"
      "[front]\nG1=0\nG2=0.5\nwindow=1, 2.5\nbracket=0.2, 6\n");
  auto r = run_experiment(cfg, {true, dir});
  EXPECT_EQ(r.status, RunStatus::AnsatzFailure);
  EXPECT_EQ(exit_code(r.status), 4);
  auto abort = nlohmann::json::parse(slurp(dir / "abort.json"));
  EXPECT_EQ(abort["reason"], "ansatz-failure");
  EXPECT_NO_THROW(load_bundle(dir));
}

TEST(Experiment, SolverAbortStillWritesBundle) {
  const auto dir = scratch("blowup");
  auto cfg = parse_config(
      "equation=qg\nresolution=32\nscenario=saddle\n[solver]\nt_end=1\n"
      "dissipation=hyperviscous\nnu=1e300\n");
  auto r = run_experiment(cfg, {true, dir});
  EXPECT_EQ(r.status, RunStatus::SolverAbort);
  EXPECT_EQ(exit_code(r.status), 3);
  auto abort = nlohmann::json::parse(slurp(dir / "abort.json"));
  EXPECT_EQ(abort["reason"], to_string(RunStatus::SolverAbort));
  EXPECT_NE(abort["detail"].get<std::string>().find("non-finite"), std::string::npos);
  auto b = load_bundle(dir);
  EXPECT_GE(b.diagnostics_text.size(), 1u);
}

TEST(Experiment, RerunOverwritesIdentically) {
  const auto dir = scratch("rerun");
  run_experiment(shear_config(), {true, dir});
  const auto first = slurp(dir / "diagnostics.csv");
  const auto fit = slurp(dir / "fit.json");
  run_experiment(shear_config(), {true, dir});
  EXPECT_EQ(slurp(dir / "diagnostics.csv"), first);
  EXPECT_EQ(slurp(dir / "fit.json"), fit);
}

TEST(Experiment, ResumeMatchesUninterruptedRun) {
  auto cfg = parse_config(
      "equation=qg\nresolution=32\nscenario=saddle\ncheckpoint_interval=0.5\n"
      "[solver]\nt_end=1\nsnapshot_interval=0.25\n");
  const auto dir = scratch("resume");
  auto full = run_experiment(cfg, {true, dir});
  cfg.solver.t_end = 0.5;
  auto half = run_experiment(cfg, {false, std::nullopt});
  auto resumed = resume_experiment({half.final_state, dump_config(cfg)}, {false, std::nullopt}, 1.0);
  EXPECT_EQ(resumed.final_state.t, full.final_state.t);
  EXPECT_EQ(resumed.final_state.step_count, full.final_state.step_count);
  double err = 0.0;
  for (std::size_t i = 0; i < full.final_state.q.values().size(); ++i)
    err = std::max(err, std::abs(resumed.final_state.q.values()[i] - full.final_state.q.values()[i]));
  EXPECT_LT(err, 1e-13);
}

TEST(Compare, IdenticalAndMismatched) {
  const auto a = scratch("cmp-a"), b = scratch("cmp-b"), c = scratch("cmp-c");
  run_experiment(shear_config(), {true, a});
  run_experiment(shear_config(), {true, b});
  const fs::path same[] = {a, b};
  auto table = compare_runs(same);
  ASSERT_EQ(table.identical.size(), 1u);
  EXPECT_NE(format_table(table).find("identical"), std::string::npos);

  auto other = shear_config();
  other.scenario = "taylor-green";
  other.front.reset();
  run_experiment(other, {true, c});
  const fs::path mixed[] = {a, c};
  EXPECT_THROW(compare_runs(mixed), InvalidInput);
}

TEST(Compare, RichardsonFamilyIsFourthOrder) {
  std::vector<fs::path> dirs;
  for (double dt : {0.05, 0.025, 0.0125}) {
    auto cfg = parse_config(
        "equation=qg\nresolution=32\nscenario=saddle\n[solver]\nt_end=0.5\ncfl=1\nsnapshot_interval=0.5\n");
    cfg.solver.dt_init = dt;
    dirs.push_back(scratch("rich-" + format_double(dt)));
    run_experiment(cfg, {true, dirs.back()});
  }
  auto table = compare_runs(dirs);
  ASSERT_EQ(table.richardson.size(), 1u);
  EXPECT_NEAR(table.richardson[0].ratio, 16.0, 2.0);
}

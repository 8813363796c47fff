// Command-line driver: run, scenarios, compare, resume.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "frontlab/checkpoint.hpp"
#include "frontlab/lab/compare.hpp"
#include "frontlab/lab/config.hpp"
#include "frontlab/lab/experiment.hpp"
#include "frontlab/lab/scenario.hpp"

namespace {

namespace lab = frontlab::lab;

constexpr int kExitConfig = 2;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw frontlab::InvalidInput("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void report(const lab::ExperimentResult& r) {
  std::cout << "status: " << lab::to_string(r.status);
  if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
  std::cout << "\nfinal t: " << lab::format_double(r.final_state.t) << ", steps: " << r.final_state.step_count
            << ", snapshots: " << r.rows.size() << '\n';
  if (r.fit) {
    std::cout << "fit: " << frontlab::front::to_string(r.fit->model) << " A_hat=" << lab::format_double(r.fit->A_hat)
              << " B_hat=" << lab::format_double(r.fit->B_hat)
              << " max_violation=" << lab::format_double(r.fit->max_violation) << '\n';
  } else if (r.config.front) {
    std::cout << "fit: none (" << r.fit_note << ")\n";
  }
  std::cout << "bundle: " << r.config.output_dir << '\n';
}

int cmd_run(const std::string& config_path, const std::string& output) {
  const lab::RunConfig config = lab::parse_config(read_text(config_path));
  lab::ExperimentOptions opts;
  if (!output.empty()) opts.output_dir = output;
  const auto r = lab::run_experiment(config, opts);
  report(r);
  return lab::exit_code(r.status);
}

int cmd_resume(const std::string& ckpt_path, const std::string& output, double t_end) {
  const auto ckpt = frontlab::load_checkpoint(ckpt_path);
  lab::ExperimentOptions opts;
  if (!output.empty()) opts.output_dir = output;
  std::optional<double> t;
  if (t_end >= 0.0) t = t_end;
  const auto r = lab::resume_experiment(ckpt, opts, t);
  report(r);
  return lab::exit_code(r.status);
}

int cmd_scenarios(bool self_test) {
  for (const auto& s : lab::builtin_scenarios()) {
    std::cout << s.name << "\n  q0 = " << s.formula << "\n  " << s.doc << '\n';
    for (const auto& p : s.params) {
      std::cout << "  param " << p.name << " = " << lab::format_double(p.default_value) << "  (" << p.doc
                << (p.integer ? ", integer" : "") << ")\n";
    }
  }
  if (!self_test) return 0;
  bool ok = true;
  for (const auto& r : lab::scenario_self_test()) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.check << ": " << lab::format_double(r.value)
              << " <= " << lab::format_double(r.tolerance) << '\n';
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

int cmd_compare(const std::vector<std::string>& dirs) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  std::cout << lab::format_table(lab::compare_runs(paths));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frontlab: front-collapse experiments for QG and 2D Euler"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FRONTLAB_CLI_VERSION));

  std::string config_path;
  std::string output;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config_path, "Run config")->required();
  run->add_option("-o,--output", output, "Override output_dir");

  bool self_test = false;
  auto* scen = app.add_subcommand("scenarios", "List built-in scenarios");
  scen->add_flag("--self-test", self_test, "Run the registration self-test");

  std::vector<std::string> dirs;
  auto* cmp = app.add_subcommand("compare", "Summarise bundles side by side");
  cmp->add_option("dirs", dirs, "Bundle directories")->required();

  std::string ckpt;
  double t_end = -1.0;
  auto* res = app.add_subcommand("resume", "Continue a run from checkpoint.bin");
  res->add_option("checkpoint", ckpt, "Checkpoint file")->required();
  res->add_option("-o,--output", output, "Override output_dir");
  res->add_option("--t-end", t_end, "Override t_end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, output);
    if (*scen) return cmd_scenarios(self_test);
    if (*cmp) return cmd_compare(dirs);
    if (*res) return cmd_resume(ckpt, output, t_end);
  } catch (const lab::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const frontlab::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

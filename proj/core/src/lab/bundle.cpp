#include <cmath>
#include <fstream>
#include <sstream>

#include "frontlab/lab/experiment.hpp"
#include "json.hpp"

#ifndef FRONTLAB_VERSION
#define FRONTLAB_VERSION "unknown"
#endif

namespace frontlab::lab {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) { return format_double(v); }

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("io", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json fit_json(const ExperimentResult& r) {
  json j;
  j["format_version"] = kFormatVersion;
  j["series"] = "area_A";
  if (!r.fit) {
    j["status"] = "unfittable";
    j["reason"] = r.fit_note;
    return j;
  }
  const auto& f = *r.fit;
  j["status"] = "ok";
  j["model"] = front::to_string(f.model);
  j["A_hat"] = f.A_hat;
  j["B_hat"] = f.B_hat;
  j["B_ls"] = f.B_ls;
  j["slope_bound"] = num_or_null(f.slope_bound);
  j["empirical_slope"] = f.empirical_slope;
  j["max_violation"] = f.max_violation;
  j["max_violation_ls"] = f.max_violation_ls;
  j["theory_violation"] = num_or_null(f.theory_violation);
  j["points_used"] = f.points_used;
  j["points_excluded"] = f.points_excluded;
  j["c_min"] = r.c_min;
  j["M"] = r.has_modulus ? json(r.M_max) : json(nullptr);
  j["front_length"] = r.front_length;
  j["collapsed"] = r.status == RunStatus::Collapsed;
  return j;
}

json graph_json(const std::optional<front::GraphEvolutionReport>& g) {
  if (!g) return nullptr;
  json j;
  j["snapshots_used"] = g->snapshots_used;
  j["max_mismatch"] = g->max_mismatch;
  j["max_dphi_dt"] = g->max_dphi_dt;
  j["relative_mismatch"] = num_or_null(g->relative_mismatch);
  j["partial"] = g->partial;
  return j;
}

json verification_json(const ExperimentResult& r) {
  json j;
  j["format_version"] = kFormatVersion;
  if (r.area_flux) {
    const auto& a = *r.area_flux;
    j["area_flux"] = {{"points", a.t.size()},
                      {"max_abs_mismatch", a.max_abs_mismatch},
                      {"max_abs_flux", a.max_abs_flux},
                      {"relative_mismatch", num_or_null(a.relative_mismatch)}};
  } else {
    j["area_flux"] = nullptr;
  }
  j["graph_evolution"] = {{"lower", graph_json(r.graph_lower)}, {"upper", graph_json(r.graph_upper)}};
  return j;
}

}  // namespace

std::string diagnostics_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "# format_version=" << kFormatVersion << '\n';
  os << "t,delta_min,delta_max,c,area_A,flux_F,u_sup_integral,loglog_A,"
     << (r.config.equation == FieldKind::QgTheta ? "M_hat" : "M_lip")
     << ",l2_norm,linf_norm,max_grad\n";
  for (const auto& row : r.rows) {
    os << num(row.t) << ',';
    if (row.front) {
      const auto& f = *row.front;
      os << num(f.delta_min) << ',' << num(f.delta_max) << ',' << num(f.semi_uniformity_c) << ','
         << num(f.area_A) << ',' << num(f.flux_F) << ',';
    } else {
      os << ",,,,,";
    }
    os << num(row.u_sup_integral) << ',';
    if (row.front && row.front->area_A > 0.0 && row.front->area_A < std::exp(-1.0)) {
      os << num(std::log(-std::log(row.front->area_A)));
    }
    os << ',' << opt(row.modulus) << ',' << num(row.l2_norm) << ',' << num(row.linf_norm) << ','
       << num(row.max_grad) << '\n';
  }
  return os.str();
}

void write_bundle(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  for (const char* stale : {"abort.json", "pairs.csv", "curves.csv"}) {
    std::filesystem::remove(dir / stale);
  }
  const std::string config_text = dump_config(r.config);
  write_text(dir / "config.ini", config_text);
  write_text(dir / "diagnostics.csv", diagnostics_csv(r));
  write_text(dir / "fit.json", fit_json(r).dump(2) + "\n");
  write_text(dir / "verification.json", verification_json(r).dump(2) + "\n");
  save_checkpoint(dir / "checkpoint.bin", {r.final_state, config_text});

  std::vector<std::string> files{"config.ini", "diagnostics.csv", "fit.json", "verification.json",
                                 "checkpoint.bin"};
  if (!r.pairs.empty()) {
    std::ostringstream os;
    os << "# format_version=" << kFormatVersion << '\n';
    os << "t,z1_x1,z1_x2,z2_x1,z2_x2,tau,psi_diff,ratio\n";
    for (const auto& p : r.pairs) {
      const auto& s = p.sample;
      os << num(p.t) << ',' << num(s.pair.z1[0]) << ',' << num(s.pair.z1[1]) << ','
         << num(s.pair.z2[0]) << ',' << num(s.pair.z2[1]) << ',' << num(s.pair.tau) << ','
         << num(s.psi_diff) << ',' << num(s.ratio) << '\n';
    }
    write_text(dir / "pairs.csv", os.str());
    files.push_back("pairs.csv");
  }
  if (!r.curves.empty()) {
    std::ostringstream os;
    os << "# format_version=" << kFormatVersion << '\n';
    os << "t,curve,x1,phi\n";
    for (const auto& c : r.curves) {
      os << num(c.t) << ',' << c.curve << ',' << num(c.sample.x1) << ',' << num(c.sample.phi) << '\n';
    }
    write_text(dir / "curves.csv", os.str());
    files.push_back("curves.csv");
  }
  if (r.status != RunStatus::Completed && r.status != RunStatus::ResolutionExit) {
    json a;
    a["format_version"] = kFormatVersion;
    a["reason"] = to_string(r.status);
    a["detail"] = r.detail;
    a["t"] = r.final_state.t;
    a["step_count"] = r.final_state.step_count;
    write_text(dir / "abort.json", a.dump(2) + "\n");
    files.push_back("abort.json");
  }

  json m;
  m["format_version"] = kFormatVersion;
  m["code_version"] = FRONTLAB_VERSION;
  m["equation"] = to_string(r.config.equation);
  m["scenario"] = r.config.scenario;
  m["grid"] = {r.config.n1, r.config.n2};
  m["status"] = to_string(r.status);
  m["detail"] = r.detail;
  m["final_t"] = r.final_state.t;
  m["step_count"] = r.final_state.step_count;
  m["snapshots"] = r.rows.size();
  m["files"] = files;
  m["wall_clock_seconds"] = r.wall_seconds;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace frontlab::lab

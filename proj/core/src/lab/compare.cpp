#include "frontlab/lab/compare.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "frontlab/checkpoint.hpp"
#include "json.hpp"

namespace frontlab::lab {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw InvalidInput("malformed number '" + s + "' in diagnostics");
  }
  return v;
}

// Column name → values, one per row.
std::map<std::string, std::vector<std::optional<double>>> parse_diagnostics(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::optional<double>>> cols;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != header.size()) throw InvalidInput("diagnostics row has the wrong width");
    for (std::size_t i = 0; i < cells.size(); ++i) cols[header[i]].push_back(cell(cells[i]));
  }
  if (header.empty()) throw InvalidInput("diagnostics file has no header");
  return cols;
}

std::optional<double> last_value(const std::vector<std::optional<double>>& col) {
  for (auto it = col.rbegin(); it != col.rend(); ++it) {
    if (*it) return *it;
  }
  return std::nullopt;
}

}  // namespace

BundleSummary load_bundle(const std::filesystem::path& dir) {
  BundleSummary b;
  b.dir = dir;
  b.config = parse_config(read_file(dir / "config.ini"));
  b.diagnostics_text = read_file(dir / "diagnostics.csv");
  auto cols = parse_diagnostics(b.diagnostics_text);
  if (!cols["t"].empty()) b.final_t = cols["t"].back().value_or(0.0);
  b.final_area = last_value(cols["area_A"]);
  b.final_delta_min = last_value(cols["delta_min"]);
  const char* mcol = b.config.equation == FieldKind::QgTheta ? "M_hat" : "M_lip";
  b.final_modulus = last_value(cols[mcol]);
  const auto fit = nlohmann::json::parse(read_file(dir / "fit.json"));
  if (fit.value("status", "") == "ok") {
    b.A_hat = fit.at("A_hat").get<double>();
    b.B_hat = fit.at("B_hat").get<double>();
  }
  return b;
}

double richardson_ratio(const ScalarField& coarse, const ScalarField& mid, const ScalarField& fine) {
  if (coarse.grid() != mid.grid() || mid.grid() != fine.grid()) {
    throw InvalidInput("richardson_ratio: fields live on different grids");
  }
  double e1 = 0.0;
  double e2 = 0.0;
  for (std::size_t i = 0; i < coarse.values().size(); ++i) {
    e1 = std::max(e1, std::abs(coarse.values()[i] - mid.values()[i]));
    e2 = std::max(e2, std::abs(mid.values()[i] - fine.values()[i]));
  }
  if (e2 == 0.0) return e1 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return e1 / e2;
}

namespace {

// Everything that should match for rows to form a dt-refinement family.
bool same_except_dt(const RunConfig& a, const RunConfig& b) {
  RunConfig x = a;
  RunConfig y = b;
  x.output_dir = y.output_dir;
  x.solver.dt_init = y.solver.dt_init;
  return x == y;
}

bool same_except_grid(const RunConfig& a, const RunConfig& b) {
  RunConfig x = a;
  RunConfig y = b;
  x.output_dir = y.output_dir;
  x.n1 = y.n1;
  x.n2 = y.n2;
  return x == y && (a.n1 != b.n1 || a.n2 != b.n2);
}

}  // namespace

CompareTable compare_runs(std::span<const std::filesystem::path> dirs) {
  if (dirs.empty()) throw InvalidInput("compare_runs: no bundles given");
  CompareTable table;
  for (const auto& d : dirs) table.rows.push_back(load_bundle(d));
  const auto& ref = table.rows.front().config;
  for (const auto& r : table.rows) {
    if (r.config.scenario != ref.scenario || r.config.equation != ref.equation) {
      throw InvalidInput("compare_runs: bundles differ in scenario or equation (" + r.dir.string() + ")");
    }
  }
  const std::size_t n = table.rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (table.rows[i].diagnostics_text == table.rows[j].diagnostics_text) {
        table.identical.emplace_back(i, j);
      }
    }
  }

  // dt families: group rows that differ only in dt, take consecutive triples
  // in decreasing dt.
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> fam{i};
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!used[j] && same_except_dt(table.rows[i].config, table.rows[j].config) &&
          table.rows[j].config.solver.dt_init != table.rows[i].config.solver.dt_init) {
        fam.push_back(j);
      }
    }
    if (fam.size() < 3) continue;
    for (std::size_t k : fam) used[k] = true;
    std::sort(fam.begin(), fam.end(), [&](std::size_t a, std::size_t b) {
      return table.rows[a].config.solver.dt_init > table.rows[b].config.solver.dt_init;
    });
    std::vector<ScalarField> finals;
    for (std::size_t k : fam) finals.push_back(load_checkpoint(table.rows[k].dir / "checkpoint.bin").state.q);
    for (std::size_t k = 0; k + 2 < fam.size(); ++k) {
      table.richardson.push_back(
          {{fam[k], fam[k + 1], fam[k + 2]}, richardson_ratio(finals[k], finals[k + 1], finals[k + 2])});
    }
  }

  const char* mcol = ref.equation == FieldKind::QgTheta ? "M_hat" : "M_lip";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!same_except_grid(table.rows[i].config, table.rows[j].config)) continue;
      std::size_t coarse = i;
      std::size_t fine = j;
      if (std::size_t(table.rows[i].config.n1) * table.rows[i].config.n2 >
          std::size_t(table.rows[j].config.n1) * table.rows[j].config.n2) {
        std::swap(coarse, fine);
      }
      auto a = parse_diagnostics(table.rows[coarse].diagnostics_text);
      auto b = parse_diagnostics(table.rows[fine].diagnostics_text);
      ResolutionEntry e{coarse, fine, 0, 0.0};
      for (std::size_t p = 0; p < a["t"].size(); ++p) {
        for (std::size_t q = 0; q < b["t"].size(); ++q) {
          if (std::abs(*a["t"][p] - *b["t"][q]) > 1e-9) continue;
          const auto ma = a[mcol][p];
          const auto mb = b[mcol][q];
          if (!ma || !mb) continue;
          ++e.shared_times;
          const double scale = std::max(std::abs(*ma), std::abs(*mb));
          if (scale > 0.0) e.max_relative_modulus_gap = std::max(e.max_relative_modulus_gap, std::abs(*ma - *mb) / scale);
        }
      }
      if (e.shared_times > 0) table.resolution.push_back(e);
    }
  }
  return table;
}

std::string format_table(const CompareTable& table) {
  std::ostringstream os;
  auto val = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); };
  const char* mname = table.rows.empty() || table.rows.front().config.equation == FieldKind::QgTheta
                          ? "M_hat"
                          : "M_lip";
  os << std::left << std::setw(4) << "#" << std::setw(12) << "grid" << std::setw(12) << "dt_init"
     << std::setw(10) << "t_final" << std::setw(24) << "area_A" << std::setw(24) << "delta_min"
     << std::setw(24) << mname << std::setw(24) << "A_hat" << std::setw(24) << "B_hat" << "bundle\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    os << std::setw(4) << i << std::setw(12)
       << (std::to_string(r.config.n1) + "x" + std::to_string(r.config.n2)) << std::setw(12)
       << format_double(r.config.solver.dt_init) << std::setw(10) << format_double(r.final_t)
       << std::setw(24) << val(r.final_area) << std::setw(24) << val(r.final_delta_min)
       << std::setw(24) << val(r.final_modulus) << std::setw(24) << val(r.A_hat) << std::setw(24)
       << val(r.B_hat) << r.dir.string() << '\n';
  }
  for (const auto& e : table.richardson) {
    os << "richardson rows " << e.rows[0] << "," << e.rows[1] << "," << e.rows[2]
       << ": ratio " << format_double(e.ratio) << " (fourth order: 16)\n";
  }
  for (const auto& e : table.resolution) {
    os << "resolution rows " << e.coarse << " vs " << e.fine << ": " << mname
       << " max relative gap " << format_double(e.max_relative_modulus_gap) << " over "
       << e.shared_times << " shared times\n";
  }
  for (const auto& [a, b] : table.identical) {
    os << "rows " << a << " and " << b << ": identical diagnostics\n";
  }
  return os.str();
}

}  // namespace frontlab::lab

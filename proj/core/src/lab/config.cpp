#include "frontlab/lab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "frontlab/lab/scenario.hpp"

namespace frontlab::lab {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string s = "invalid config:";
  for (const auto& p : problems) s += "\n  " + p;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("config", join(problems)), problems_(std::move(problems)) {}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

// Section name → key → entry. Top-level keys and [run] share "run".
using Document = std::map<std::string, std::map<std::string, Entry>>;

class Reader {
 public:
  Reader(Document doc, std::vector<std::string>& problems)
      : doc_(std::move(doc)), problems_(problems) {}

  bool has_section(const std::string& s) const { return doc_.count(s) != 0; }

  bool present(const std::string& section, const std::string& key) const {
    auto sit = doc_.find(section);
    return sit != doc_.end() && sit->second.count(key) != 0;
  }

  std::optional<Entry> take(const std::string& section, const std::string& key) {
    auto sit = doc_.find(section);
    if (sit == doc_.end()) return std::nullopt;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    Entry e = kit->second;
    sit->second.erase(kit);
    return e;
  }

  std::map<std::string, Entry> take_all(const std::string& section) {
    auto sit = doc_.find(section);
    if (sit == doc_.end()) return {};
    auto out = std::move(sit->second);
    sit->second.clear();
    return out;
  }

  void error(const Entry& e, const std::string& section, const std::string& key,
             const std::string& what) {
    problems_.push_back("line " + std::to_string(e.line) + ": " + qualified(section, key) + ": " + what);
  }

  void missing(const std::string& section, const std::string& key) {
    problems_.push_back("missing required key " + qualified(section, key));
  }

  void problem(std::string p) { problems_.push_back(std::move(p)); }

  std::optional<double> number(const std::string& section, const std::string& key) {
    auto e = take(section, key);
    if (!e) return std::nullopt;
    double v = 0.0;
    if (!parse_number(e->value, v)) {
      error(*e, section, key, "expected a number, got '" + e->value + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer(const std::string& section, const std::string& key) {
    auto e = take(section, key);
    if (!e) return std::nullopt;
    long long v = 0;
    const auto* end = e->value.data() + e->value.size();
    const auto r = std::from_chars(e->value.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) {
      error(*e, section, key, "expected an integer, got '" + e->value + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& section, const std::string& key) {
    auto e = take(section, key);
    if (!e) return std::nullopt;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    error(*e, section, key, "expected true or false, got '" + e->value + "'");
    return std::nullopt;
  }

  std::optional<std::pair<double, double>> pair(const std::string& section, const std::string& key) {
    auto e = take(section, key);
    if (!e) return std::nullopt;
    const auto comma = e->value.find(',');
    double a = 0.0;
    double b = 0.0;
    if (comma == std::string::npos || !parse_number(trim(e->value.substr(0, comma)), a) ||
        !parse_number(trim(e->value.substr(comma + 1)), b)) {
      error(*e, section, key, "expected two numbers 'lo, hi', got '" + e->value + "'");
      return std::nullopt;
    }
    return std::pair{a, b};
  }

  void report_leftovers() {
    for (const auto& [section, keys] : doc_) {
      for (const auto& [key, e] : keys) error(e, section, key, "unknown key");
    }
  }

  static bool parse_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    return r.ec == std::errc() && r.ptr == end && std::isfinite(v);
  }

  static std::string qualified(const std::string& section, const std::string& key) {
    return section == "run" ? key : section + "." + key;
  }

 private:
  Document doc_;
  std::vector<std::string>& problems_;
};

const std::set<std::string> kSections{"run", "solver", "scenario", "front", "modulus"};

Document tokenize(std::string_view text, std::vector<std::string>& problems) {
  Document doc;
  doc["run"];
  std::string section = "run";
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.count(section)) {
        problems.push_back("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      problems.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (!kSections.count(section)) continue;
    auto& keys = doc[section];
    if (keys.count(key)) {
      problems.push_back("line " + std::to_string(line_no) + ": duplicate key " +
                         Reader::qualified(section, key));
      continue;
    }
    keys[key] = Entry{value, line_no};
  }
  return doc;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::vector<std::string> problems;
  Reader rd(tokenize(text, problems), problems);
  RunConfig c;

  if (auto e = rd.take("run", "format_version")) {
    if (e->value != std::to_string(kFormatVersion)) {
      rd.error(*e, "run", "format_version", "unsupported format version '" + e->value + "'");
    }
  }
  if (auto e = rd.take("run", "equation")) {
    if (e->value == "qg") {
      c.equation = FieldKind::QgTheta;
    } else if (e->value == "euler") {
      c.equation = FieldKind::EulerVorticity;
    } else {
      rd.error(*e, "run", "equation", "unsupported equation '" + e->value + "' (expected qg or euler)");
    }
  } else {
    rd.missing("run", "equation");
  }
  if (auto e = rd.take("run", "resolution")) {
    std::string v = e->value;
    const auto comma = v.find(',');
    double a = 0.0;
    double b = 0.0;
    bool ok = false;
    if (comma == std::string::npos) {
      ok = Reader::parse_number(v, a);
      b = a;
    } else {
      ok = Reader::parse_number(trim(v.substr(0, comma)), a) &&
           Reader::parse_number(trim(v.substr(comma + 1)), b);
    }
    if (!ok || a != std::floor(a) || b != std::floor(b) || a < 8 || b < 8 || a > 65536 ||
        b > 65536 || int(a) % 2 || int(b) % 2) {
      rd.error(*e, "run", "resolution", "expected even integers >= 8, got '" + v + "'");
    } else {
      c.n1 = int(a);
      c.n2 = int(b);
    }
  } else {
    rd.missing("run", "resolution");
  }
  const Scenario* scenario = nullptr;
  if (auto e = rd.take("run", "scenario")) {
    scenario = find_scenario(e->value);
    if (!scenario) {
      rd.error(*e, "run", "scenario", "unknown scenario '" + e->value + "'");
    } else {
      c.scenario = e->value;
    }
  } else {
    rd.missing("run", "scenario");
  }
  if (auto e = rd.take("run", "output_dir")) {
    if (e->value.empty()) {
      rd.error(*e, "run", "output_dir", "must not be empty");
    } else {
      c.output_dir = e->value;
    }
  }
  if (auto v = rd.integer("run", "seed")) {
    if (*v < 0) {
      rd.problem("seed must be non-negative");
    } else {
      c.seed = std::uint64_t(*v);
    }
  }
  if (auto v = rd.number("run", "checkpoint_interval")) {
    if (*v < 0.0) rd.problem("checkpoint_interval must be >= 0");
    c.checkpoint_interval = *v;
  }

  // [solver]
  auto& s = c.solver;
  if (auto v = rd.number("solver", "dt_init")) {
    if (!(*v > 0.0)) rd.problem("solver.dt_init must be > 0");
    s.dt_init = *v;
  }
  if (auto v = rd.number("solver", "cfl")) {
    if (!(*v > 0.0 && *v <= 1.0)) rd.problem("solver.cfl must lie in (0, 1]");
    s.cfl = *v;
  }
  const bool has_t_end = rd.present("solver", "t_end");
  if (auto v = rd.number("solver", "t_end")) {
    if (!(*v >= 0.0)) rd.problem("solver.t_end must be >= 0");
    s.t_end = *v;
  } else if (!has_t_end) {
    rd.missing("solver", "t_end");
  }
  if (auto v = rd.number("solver", "snapshot_interval")) {
    if (!(*v > 0.0)) rd.problem("solver.snapshot_interval must be > 0");
    s.snapshot_interval = *v;
  }
  if (auto e = rd.take("solver", "dealias")) {
    if (e->value == "two-thirds") {
      s.dealias = evolve::Dealias::TwoThirds;
    } else if (e->value == "none") {
      s.dealias = evolve::Dealias::None;
    } else {
      rd.error(*e, "solver", "dealias", "expected two-thirds or none, got '" + e->value + "'");
    }
  }
  bool hyper = false;
  if (auto e = rd.take("solver", "dissipation")) {
    if (e->value == "hyperviscous") {
      hyper = true;
    } else if (e->value != "none") {
      rd.error(*e, "solver", "dissipation", "expected none or hyperviscous, got '" + e->value + "'");
    }
  }
  const auto nu = rd.number("solver", "nu");
  const auto power = rd.integer("solver", "power");
  if (hyper) {
    evolve::Hyperviscosity h;
    if (nu) {
      if (!(*nu >= 0.0)) rd.problem("solver.nu must be >= 0");
      h.nu = *nu;
    }
    if (power) {
      if (*power < 1) rd.problem("solver.power must be a positive integer");
      h.power = int(*power);
    }
    s.dissipation = h;
  } else if (nu || power) {
    rd.problem("solver.nu and solver.power require dissipation = hyperviscous");
  }

  // [scenario]
  for (const auto& [key, e] : rd.take_all("scenario")) {
    double v = 0.0;
    if (!Reader::parse_number(e.value, v)) {
      rd.error(e, "scenario", key, "expected a number, got '" + e.value + "'");
      continue;
    }
    if (scenario) {
      try {
        (void)scenario->resolve({{key, v}});
      } catch (const InvalidInput& ex) {
        rd.error(e, "scenario", key, ex.what());
        continue;
      }
    }
    c.scenario_params[key] = v;
  }

  // [front]
  if (rd.has_section("front")) {
    FrontConfig f;
    const auto g1 = rd.number("front", "G1");
    const auto g2 = rd.number("front", "G2");
    if (!g1) rd.missing("front", "G1");
    if (!g2) rd.missing("front", "G2");
    if (g1) f.G1 = *g1;
    if (g2) f.G2 = *g2;
    if (g1 && g2 && *g1 == *g2) rd.problem("front: contour values G1 and G2 must differ");
    if (auto w = rd.pair("front", "window")) {
      f.window = {w->first, w->second};
      if (!(w->first < w->second)) rd.problem("front.window: a must be < b");
    } else {
      rd.missing("front", "window");
    }
    const auto both = rd.pair("front", "bracket");
    const auto b1 = rd.pair("front", "bracket1");
    const auto b2 = rd.pair("front", "bracket2");
    if (both && (b1 || b2)) rd.problem("front: give either bracket or bracket1/bracket2, not both");
    auto set_bracket = [&](front::Bracket& dst, const std::optional<std::pair<double, double>>& src,
                           const char* name) {
      if (!src) {
        rd.missing("front", name);
        return;
      }
      dst = {src->first, src->second};
      if (!(src->first < src->second)) rd.problem(std::string("front.") + name + ": lo must be < hi");
    };
    if (both) {
      set_bracket(f.bracket1, both, "bracket");
      f.bracket2 = f.bracket1;
    } else {
      set_bracket(f.bracket1, b1, "bracket1");
      set_bracket(f.bracket2, b2, "bracket2");
    }
    if (auto v = rd.number("front", "min_thickness_cells")) {
      if (!(*v >= 0.0)) rd.problem("front.min_thickness_cells must be >= 0");
      f.min_thickness_cells = *v;
    }
    if (auto v = rd.boolean("front", "dump_curves")) f.dump_curves = *v;
    c.front = f;
  }

  // [modulus]
  if (rd.has_section("modulus")) {
    ModulusConfig m;
    if (auto v = rd.integer("modulus", "pair_count")) {
      if (*v < 1) rd.problem("modulus.pair_count must be >= 1");
      m.pair_count = std::size_t(std::max<long long>(*v, 0));
    }
    if (auto v = rd.number("modulus", "tau_floor")) m.tau_floor = *v;
    if (auto v = rd.number("modulus", "tau_max")) m.tau_max = *v;
    if (!(m.tau_floor > 0.0 && m.tau_floor < m.tau_max && m.tau_max <= std::exp(-1.0))) {
      rd.problem("modulus: need 0 < tau_floor < tau_max <= 1/e");
    }
    if (auto v = rd.number("modulus", "interval")) {
      if (!(*v > 0.0)) rd.problem("modulus.interval must be > 0");
      m.interval = *v;
    }
    if (auto v = rd.integer("modulus", "refine_top")) {
      if (*v < 0) rd.problem("modulus.refine_top must be >= 0");
      m.refine_top = int(*v);
    }
    if (auto v = rd.boolean("modulus", "focus")) m.focus = *v;
    if (auto v = rd.boolean("modulus", "dump_pairs")) m.dump_pairs = *v;
    c.modulus = m;
  }

  rd.report_leftovers();
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  auto pair = [](double a, double b) { return format_double(a) + ", " + format_double(b); };
  os << "format_version = " << kFormatVersion << '\n';
  os << "equation = " << to_string(c.equation) << '\n';
  os << "resolution = " << c.n1 << ", " << c.n2 << '\n';
  os << "scenario = " << c.scenario << '\n';
  os << "output_dir = " << c.output_dir << '\n';
  os << "seed = " << c.seed << '\n';
  os << "checkpoint_interval = " << format_double(c.checkpoint_interval) << '\n';
  os << "\n[solver]\n";
  os << "dt_init = " << format_double(c.solver.dt_init) << '\n';
  os << "cfl = " << format_double(c.solver.cfl) << '\n';
  os << "t_end = " << format_double(c.solver.t_end) << '\n';
  os << "snapshot_interval = " << format_double(c.solver.snapshot_interval) << '\n';
  os << "dealias = " << (c.solver.dealias == evolve::Dealias::TwoThirds ? "two-thirds" : "none") << '\n';
  if (c.solver.dissipation) {
    os << "dissipation = hyperviscous\n";
    os << "nu = " << format_double(c.solver.dissipation->nu) << '\n';
    os << "power = " << c.solver.dissipation->power << '\n';
  } else {
    os << "dissipation = none\n";
  }
  os << "\n[scenario]\n";
  for (const auto& [k, v] : c.scenario_params) os << k << " = " << format_double(v) << '\n';
  if (c.front) {
    const auto& f = *c.front;
    os << "\n[front]\n";
    os << "G1 = " << format_double(f.G1) << '\n';
    os << "G2 = " << format_double(f.G2) << '\n';
    os << "window = " << pair(f.window.a, f.window.b) << '\n';
    os << "bracket1 = " << pair(f.bracket1.lo, f.bracket1.hi) << '\n';
    os << "bracket2 = " << pair(f.bracket2.lo, f.bracket2.hi) << '\n';
    os << "min_thickness_cells = " << format_double(f.min_thickness_cells) << '\n';
    os << "dump_curves = " << (f.dump_curves ? "true" : "false") << '\n';
  }
  if (c.modulus) {
    const auto& m = *c.modulus;
    os << "\n[modulus]\n";
    os << "pair_count = " << m.pair_count << '\n';
    os << "tau_floor = " << format_double(m.tau_floor) << '\n';
    os << "tau_max = " << format_double(m.tau_max) << '\n';
    os << "interval = " << format_double(m.interval) << '\n';
    os << "refine_top = " << m.refine_top << '\n';
    os << "focus = " << (m.focus ? "true" : "false") << '\n';
    os << "dump_pairs = " << (m.dump_pairs ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace frontlab::lab

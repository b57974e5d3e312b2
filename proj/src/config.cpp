#include "gbhe/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gbhe/errors.hpp"

namespace gbhe {

const char* to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::TypeI:
      return "TypeI";
    case CaseKind::TypeII:
      return "TypeII";
    case CaseKind::TravelingWave:
      return "TravelingWave";
    case CaseKind::Spiral:
      return "Spiral";
    case CaseKind::Zero:
      return "Zero";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int RunConfig::steps() const {
  if (n_steps) return *n_steps;
  if (dt) return std::max(1, static_cast<int>(std::lround(t_final / *dt)));
  return std::max(1, static_cast<int>(std::lround(t_final / (dt_ratio * domain.width() / mesh_n))));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Table = std::map<std::string, Entry>;  // "section.key" -> value

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"run", {"scheme", "case", "reynolds", "mesh_n", "domain", "t_final", "n_steps", "dt"}},
      {"model", {"nu", "alpha", "beta", "gamma", "delta", "eta", "penalty"}},
      {"kernel", {"kind", "mu", "value", "times", "values", "caputo_order"}},
      {"convergence", {"levels", "dt_ratio"}},
      {"newton", {"tolerance", "max_iterations", "linear_solver"}},
      {"fhn", {"eps", "rho", "v_initial"}},
      {"output", {"snapshot_interval", "vtk"}},
  };
  return k;
}

double to_double(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
  }
  return v;
}

int to_int(const Entry& e, const std::string& key) {
  int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
  return v;
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
  std::string s = e.value;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(Entry{tok, e.line}, key));
  if (out.empty()) throw ConfigError("'" + key + "' expects a list of numbers", e.line);
  return out;
}

bool to_bool(const Entry& e, const std::string& key) {
  const std::string v = lower(e.value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true or false", e.line);
}

Table tokenize(const std::string& text, std::string& normalized) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (!known_keys().count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + s + "'", line);
    if (section.empty()) throw ConfigError("key outside of any section", line);
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string value = trim(s.substr(eq + 1));
    if (!known_keys().at(section).count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    const std::string full = section + "." + key;
    if (table.count(full)) throw ConfigError("duplicate key '" + full + "'", line);
    table[full] = Entry{value, line};
  }
  for (const auto& [k, e] : table) normalized += k + "=" + e.value + "\n";
  return table;
}

}  // namespace

RunConfig parse_config_string(const std::string& text) {
  RunConfig c;
  const Table t = tokenize(text, c.source);
  c.hash = fnv1a(c.source);
  auto has = [&](const std::string& k) { return t.count(k) > 0; };
  auto num = [&](const std::string& k) { return to_double(t.at(k), k); };
  auto integer = [&](const std::string& k) { return to_int(t.at(k), k); };
  auto fail = [&](const std::string& k, const std::string& msg) { throw ConfigError(msg, has(k) ? t.at(k).line : 0); };

  if (has("run.scheme")) {
    const std::string v = lower(t.at("run.scheme").value);
    if (v == "cr") c.scheme = SpaceKind::CR;
    else if (v == "dg") c.scheme = SpaceKind::DG;
    else fail("run.scheme", "scheme must be CR or DG");
  }
  if (has("run.case")) {
    const std::string v = lower(t.at("run.case").value);
    if (v == "typei") c.case_kind = CaseKind::TypeI;
    else if (v == "typeii") c.case_kind = CaseKind::TypeII;
    else if (v == "travelingwave") c.case_kind = CaseKind::TravelingWave;
    else if (v == "spiral") c.case_kind = CaseKind::Spiral;
    else if (v == "zero") c.case_kind = CaseKind::Zero;
    else fail("run.case", "case must be TypeI, TypeII, TravelingWave, Spiral or Zero");
  }
  if (has("run.reynolds")) c.reynolds = num("run.reynolds");
  if (!(c.reynolds > 0.0)) fail("run.reynolds", "reynolds must be positive");
  if (has("run.mesh_n")) c.mesh_n = integer("run.mesh_n");
  if (c.mesh_n < 1) fail("run.mesh_n", "mesh_n must be >= 1");
  if (has("run.domain")) {
    const auto d = to_list(t.at("run.domain"), "run.domain");
    if (d.size() != 4 || !(d[2] > d[0]) || !(d[3] > d[1])) fail("run.domain", "domain expects 'xmin ymin xmax ymax'");
    c.domain = Box{d[0], d[1], d[2], d[3]};
  }
  if (has("run.t_final")) c.t_final = num("run.t_final");
  if (!(c.t_final > 0.0)) fail("run.t_final", "t_final must be positive");
  if (has("run.n_steps") && has("run.dt")) fail("run.dt", "give either n_steps or dt, not both");
  if (has("run.n_steps")) {
    c.n_steps = integer("run.n_steps");
    if (*c.n_steps < 1) fail("run.n_steps", "n_steps must be >= 1");
  }
  if (has("run.dt")) {
    c.dt = num("run.dt");
    if (!(*c.dt > 0.0)) fail("run.dt", "dt must be positive");
  }

  auto& p = c.params;
  p.eta = 0.0;
  if (c.case_kind == CaseKind::TravelingWave) p.nu = 1.0 / c.reynolds;
  if (has("model.nu")) p.nu = num("model.nu");
  if (has("model.alpha")) p.alpha = num("model.alpha");
  if (has("model.beta")) p.beta = num("model.beta");
  if (has("model.gamma")) p.reaction_gamma = num("model.gamma");
  if (has("model.delta")) p.delta = integer("model.delta");
  if (has("model.eta")) p.eta = num("model.eta");
  if (has("model.penalty")) p.penalty_gamma = num("model.penalty");
  if (!(p.nu > 0.0)) fail("model.nu", "nu must be positive");
  if (!(p.alpha >= 0.0)) fail("model.alpha", "alpha must be >= 0");
  if (!(p.beta >= 0.0)) fail("model.beta", "beta must be >= 0");
  if (!(p.reaction_gamma > 0.0 && p.reaction_gamma < 1.0)) fail("model.gamma", "gamma must lie in (0,1)");
  if (p.delta < 1) fail("model.delta", "delta must be an integer >= 1");
  if (!(p.eta >= 0.0)) fail("model.eta", "eta must be >= 0");
  if (!(p.penalty_gamma > 0.0)) fail("model.penalty", "penalty must be positive");

  std::string kind = has("kernel.kind") ? lower(t.at("kernel.kind").value) : "power";
  try {
    if (kind == "power") {
      const double mu = has("kernel.mu") ? num("kernel.mu") : 0.5;
      if (!(mu >= 0.0 && mu < 1.0)) fail("kernel.mu", "kernel exponent mu must lie in [0,1)");
      c.kernel = KernelSpec::power_law(mu);
    } else if (kind == "constant") {
      c.kernel = KernelSpec::constant(has("kernel.value") ? num("kernel.value") : 1.0);
    } else if (kind == "tabulated") {
      if (!has("kernel.times") || !has("kernel.values")) fail("kernel.kind", "tabulated kernel needs times and values");
      c.kernel = KernelSpec::tabulated(to_list(t.at("kernel.times"), "kernel.times"),
                                       to_list(t.at("kernel.values"), "kernel.values"));
    } else {
      fail("kernel.kind", "kernel kind must be power, constant or tabulated");
    }
  } catch (const std::invalid_argument& e) {
    fail("kernel.kind", e.what());
  }
  if (has("kernel.caputo_order")) {
    const double mc = num("kernel.caputo_order");
    if (!(mc > 0.0 && mc < 1.0)) fail("kernel.caputo_order", "caputo_order must lie in (0,1)");
    c.caputo_order = mc;
  }

  if (has("convergence.levels")) {
    c.levels.clear();
    for (double v : to_list(t.at("convergence.levels"), "convergence.levels")) {
      if (v < 1 || v != std::floor(v)) fail("convergence.levels", "levels must be positive integers");
      c.levels.push_back(static_cast<int>(v));
    }
    if (c.levels.size() < 3) fail("convergence.levels", "a convergence study needs at least three levels");
  }
  if (has("convergence.dt_ratio")) c.dt_ratio = num("convergence.dt_ratio");
  if (!(c.dt_ratio > 0.0)) fail("convergence.dt_ratio", "dt_ratio must be positive");

  if (has("newton.tolerance")) c.newton.tolerance = num("newton.tolerance");
  if (!(c.newton.tolerance > 0.0)) fail("newton.tolerance", "tolerance must be positive");
  if (has("newton.max_iterations")) c.newton.max_iterations = integer("newton.max_iterations");
  if (c.newton.max_iterations < 1) fail("newton.max_iterations", "max_iterations must be >= 1");
  if (has("newton.linear_solver")) {
    const std::string v = lower(t.at("newton.linear_solver").value);
    if (v == "lu") c.newton.linear_solver = LinearSolverKind::SparseLU;
    else if (v == "gmres") c.newton.linear_solver = LinearSolverKind::Gmres;
    else fail("newton.linear_solver", "linear_solver must be lu or gmres");
  }

  if (has("fhn.eps")) c.fhn_eps = num("fhn.eps");
  if (has("fhn.rho")) c.fhn_rho = num("fhn.rho");
  if (has("fhn.v_initial")) c.fhn_v_initial = num("fhn.v_initial");
  if (c.fhn_eps && !(*c.fhn_eps >= 0.0)) fail("fhn.eps", "eps must be >= 0");
  if (c.fhn_rho && !(*c.fhn_rho >= 0.0)) fail("fhn.rho", "rho must be >= 0");
  if (c.case_kind == CaseKind::Spiral && (!c.fhn_eps || !c.fhn_rho)) {
    throw ConfigError("the Spiral case needs [fhn] eps and rho (no defaults)");
  }

  if (has("output.snapshot_interval")) c.snapshot_interval = num("output.snapshot_interval");
  if (!(c.snapshot_interval >= 0.0)) fail("output.snapshot_interval", "snapshot_interval must be >= 0");
  if (has("output.vtk")) c.write_vtk = to_bool(t.at("output.vtk"), "output.vtk");
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

}  // namespace gbhe

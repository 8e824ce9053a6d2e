#include "bohmium/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>

#include "bohmium/csv.hpp"
#include "bohmium/entanglement.hpp"
#include "bohmium/nodal.hpp"
#include "bohmium/spectral.hpp"

#ifndef BOHMIUM_VERSION
#define BOHMIUM_VERSION "0.0.0"
#endif

namespace bohmium {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RuntimeClass r) noexcept {
  switch (r) {
    case RuntimeClass::Short: return "short";
    case RuntimeClass::Medium: return "medium";
    case RuntimeClass::Long: return "long";
  }
  return "?";
}

std::string_view to_string(ScenarioKind k) noexcept {
  switch (k) {
    case ScenarioKind::Run: return "run";
    case ScenarioKind::Sweep: return "sweep";
    case ScenarioKind::EntanglementCurve: return "entanglement-curve";
  }
  return "?";
}

std::string code_version() { return BOHMIUM_VERSION; }

SystemConfig Scenario::system() const {
  if (!(std::abs(model.c2) <= 1)) throw Error(ErrorKind::DomainError, "scenarios", "c2 must lie in [-1, 1]");
  const double c1 = std::sqrt(std::max(0.0, 1 - model.c2 * model.c2));
  return SystemConfig(OscillatorParams(model.omega_x, model.a0, model.sigma_x),
                      OscillatorParams(model.omega_y, model.a0, model.sigma_y), c1, model.c2, model.state);
}

PhasePoint Scenario::initial() const { return {model.x0, model.y0, model.t0}; }

std::vector<std::string> Scenario::analyses() const {
  std::vector<std::string> out;
  if (chaos.enabled) out.emplace_back("chaos");
  if (nodal.enabled) out.emplace_back("nodal");
  if (spectral.enabled) out.emplace_back("spectral");
  if (entanglement.enabled) out.emplace_back("entanglement");
  return out;
}

// ---------------------------------------------------------------------------
// Configuration binding

namespace {

std::string_view to_string(StateKind k) noexcept { return k == StateKind::Psi ? "psi" : "phi"; }

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ConfigParse, "scenarios", what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) parse_fail(key + ": not a number: '" + raw + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) parse_fail(key + ": not an integer: '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  parse_fail(key + ": not a boolean: '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real(key, item));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_real(v[i]);
  return s;
}

struct Binding {
  std::string section;
  std::string key;
  std::function<std::string(const Scenario&)> get;
  std::function<void(Scenario&, const std::string&)> set;
};

template <class Acc>
Binding real_key(const char* sec, const char* key, Acc acc) {
  return {sec, key, [acc](const Scenario& s) { return fmt_real(acc(const_cast<Scenario&>(s))); },
          [acc, k = std::string(sec) + "." + key](Scenario& s, const std::string& v) { acc(s) = parse_real(k, v); }};
}

template <class Acc>
Binding int_key(const char* sec, const char* key, Acc acc) {
  return {sec, key, [acc](const Scenario& s) { return std::to_string(acc(const_cast<Scenario&>(s))); },
          [acc, k = std::string(sec) + "." + key](Scenario& s, const std::string& v) {
            using T = std::remove_reference_t<decltype(acc(s))>;
            acc(s) = static_cast<T>(parse_int(k, v));
          }};
}

template <class Acc>
Binding bool_key(const char* sec, const char* key, Acc acc) {
  return {sec, key, [acc](const Scenario& s) { return std::string(acc(const_cast<Scenario&>(s)) ? "true" : "false"); },
          [acc, k = std::string(sec) + "." + key](Scenario& s, const std::string& v) { acc(s) = parse_bool(k, v); }};
}

template <class Acc>
Binding string_key(const char* sec, const char* key, Acc acc) {
  return {sec, key, [acc](const Scenario& s) { return acc(const_cast<Scenario&>(s)); },
          [acc](Scenario& s, const std::string& v) { acc(s) = trim(v); }};
}

template <class E, class Acc, class Parse>
Binding enum_key(const char* sec, const char* key, Acc acc, Parse parse) {
  return {sec, key, [acc](const Scenario& s) { return std::string(to_string(acc(const_cast<Scenario&>(s)))); },
          [acc, parse](Scenario& s, const std::string& v) { acc(s) = parse(trim(v)); }};
}

StateKind parse_state(const std::string& s) {
  if (s == "psi" || s == "Psi") return StateKind::Psi;
  if (s == "phi" || s == "Phi") return StateKind::Phi;
  parse_fail("model.state: expected psi or phi, got '" + s + "'");
}

RuntimeClass parse_runtime(const std::string& s) {
  for (RuntimeClass r : {RuntimeClass::Short, RuntimeClass::Medium, RuntimeClass::Long})
    if (s == to_string(r)) return r;
  parse_fail("scenario.runtime: expected short, medium or long, got '" + s + "'");
}

ScenarioKind parse_kind(const std::string& s) {
  for (ScenarioKind k : {ScenarioKind::Run, ScenarioKind::Sweep, ScenarioKind::EntanglementCurve})
    if (s == to_string(k)) return k;
  parse_fail("scenario.kind: expected run, sweep or entanglement-curve, got '" + s + "'");
}

Method parse_method_cfg(const std::string& s) {
  try {
    return parse_method(s);
  } catch (const Error& e) {
    parse_fail("integrate.method: " + std::string(e.what()));
  }
}

Precision parse_precision_cfg(const std::string& s) {
  try {
    return parse_precision(s);
  } catch (const Error& e) {
    parse_fail("integrate.precision: " + std::string(e.what()));
  }
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    using S = Scenario;
    std::vector<Binding> b;
    b.push_back(string_key("scenario", "name", [](S& s) -> std::string& { return s.name; }));
    b.push_back(string_key("scenario", "figure", [](S& s) -> std::string& { return s.figure; }));
    b.push_back(string_key("scenario", "description", [](S& s) -> std::string& { return s.description; }));
    b.push_back(enum_key<RuntimeClass>("scenario", "runtime", [](S& s) -> RuntimeClass& { return s.runtime; },
                                       parse_runtime));
    b.push_back(enum_key<ScenarioKind>("scenario", "kind", [](S& s) -> ScenarioKind& { return s.kind; }, parse_kind));
    b.push_back(int_key("scenario", "seed", [](S& s) -> std::uint64_t& { return s.seed; }));
    b.push_back(real_key("scenario", "t_end", [](S& s) -> double& { return s.t_end; }));
    b.push_back(real_key("scenario", "sample_dt", [](S& s) -> double& { return s.sample_dt; }));

    b.push_back(real_key("model", "omega_x", [](S& s) -> double& { return s.model.omega_x; }));
    b.push_back(real_key("model", "omega_y", [](S& s) -> double& { return s.model.omega_y; }));
    b.push_back(real_key("model", "a0", [](S& s) -> double& { return s.model.a0; }));
    b.push_back(real_key("model", "sigma_x", [](S& s) -> double& { return s.model.sigma_x; }));
    b.push_back(real_key("model", "sigma_y", [](S& s) -> double& { return s.model.sigma_y; }));
    b.push_back(real_key("model", "c2", [](S& s) -> double& { return s.model.c2; }));
    b.push_back(enum_key<StateKind>("model", "state", [](S& s) -> StateKind& { return s.model.state; }, parse_state));
    b.push_back(real_key("model", "x0", [](S& s) -> double& { return s.model.x0; }));
    b.push_back(real_key("model", "y0", [](S& s) -> double& { return s.model.y0; }));
    b.push_back(real_key("model", "t0", [](S& s) -> double& { return s.model.t0; }));

    b.push_back(enum_key<Method>("integrate", "method", [](S& s) -> Method& { return s.integrator.method; },
                                 parse_method_cfg));
    b.push_back(enum_key<Precision>("integrate", "precision",
                                    [](S& s) -> Precision& { return s.integrator.precision; }, parse_precision_cfg));
    b.push_back(real_key("integrate", "atol", [](S& s) -> double& { return s.integrator.atol; }));
    b.push_back(real_key("integrate", "rtol", [](S& s) -> double& { return s.integrator.rtol; }));
    b.push_back(real_key("integrate", "h_init", [](S& s) -> double& { return s.integrator.h_init; }));
    b.push_back(real_key("integrate", "h_min", [](S& s) -> double& { return s.integrator.h_min; }));
    b.push_back(real_key("integrate", "h_max", [](S& s) -> double& { return s.integrator.h_max; }));
    b.push_back(int_key("integrate", "max_steps", [](S& s) -> long& { return s.integrator.max_steps; }));

    b.push_back(bool_key("chaos", "enabled", [](S& s) -> bool& { return s.chaos.enabled; }));
    b.push_back(real_key("chaos", "renorm_dt", [](S& s) -> double& { return s.chaos.renorm_dt; }));
    b.push_back(real_key("chaos", "alpha_threshold", [](S& s) -> double& { return s.chaos.alpha_threshold; }));
    b.push_back(real_key("chaos", "dev_x", [](S& s) -> double& { return s.chaos.dev_x; }));
    b.push_back(real_key("chaos", "dev_y", [](S& s) -> double& { return s.chaos.dev_y; }));
    b.push_back(real_key("chaos", "inflate", [](S& s) -> double& { return s.chaos.inflate; }));
    b.push_back(bool_key("chaos", "classify", [](S& s) -> bool& { return s.chaos.classify; }));
    b.push_back(string_key("chaos", "estimator", [](S& s) -> std::string& { return s.chaos.estimator; }));
    b.push_back(real_key("chaos", "separation", [](S& s) -> double& { return s.chaos.separation; }));

    b.push_back(bool_key("nodal", "enabled", [](S& s) -> bool& { return s.nodal.enabled; }));
    b.push_back(int_key("nodal", "k_min", [](S& s) -> int& { return s.nodal.k_min; }));
    b.push_back(int_key("nodal", "k_max", [](S& s) -> int& { return s.nodal.k_max; }));
    b.push_back(real_key("nodal", "dt", [](S& s) -> double& { return s.nodal.dt; }));
    b.push_back(bool_key("nodal", "x_points", [](S& s) -> bool& { return s.nodal.x_points; }));
    b.push_back(bool_key("nodal", "encounters", [](S& s) -> bool& { return s.nodal.encounters; }));
    b.push_back(real_key("nodal", "radius", [](S& s) -> double& { return s.nodal.radius; }));

    b.push_back(bool_key("spectral", "enabled", [](S& s) -> bool& { return s.spectral.enabled; }));
    b.push_back(real_key("spectral", "base_omega", [](S& s) -> double& { return s.spectral.base_omega; }));
    b.push_back(int_key("spectral", "m_max", [](S& s) -> int& { return s.spectral.m_max; }));
    b.push_back(bool_key("spectral", "period", [](S& s) -> bool& { return s.spectral.period; }));
    b.push_back(real_key("spectral", "period_tol", [](S& s) -> double& { return s.spectral.period_tol; }));

    b.push_back(bool_key("entanglement", "enabled", [](S& s) -> bool& { return s.entanglement.enabled; }));
    b.push_back(int_key("entanglement", "samples", [](S& s) -> std::int64_t& { return s.entanglement.samples; }));
    b.push_back(real_key("entanglement", "c2_min", [](S& s) -> double& { return s.entanglement.c2_min; }));
    b.push_back(real_key("entanglement", "c2_max", [](S& s) -> double& { return s.entanglement.c2_max; }));
    b.push_back(int_key("entanglement", "points", [](S& s) -> int& { return s.entanglement.points; }));

    b.push_back(string_key("sweep", "parameter", [](S& s) -> std::string& { return s.sweep.parameter; }));
    b.push_back({"sweep", "values", [](const S& s) { return join(s.sweep.values); },
                 [](S& s, const std::string& v) { s.sweep.values = parse_list("sweep.values", v); }});
    return b;
  }();
  return table;
}

const Binding* find_binding(const std::string& section, const std::string& key) {
  for (const auto& b : bindings())
    if (b.section == section && b.key == key) return &b;
  return nullptr;
}

}  // namespace

void apply_config(Scenario& sc, const boost::property_tree::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) parse_fail("key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      if (section == "scenario" && key == "base") continue;
      const Binding* b = find_binding(section, key);
      if (!b) parse_fail("unknown key '" + section + "." + key + "'");
      b->set(sc, node.data());
    }
  }
}

Scenario scenario_from_ini(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    parse_fail(e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Scenario sc;
  if (auto base = tree.get_optional<std::string>("scenario.base")) {
    try {
      sc = find_scenario(trim(*base));
    } catch (const Error& e) {
      parse_fail("scenario.base: " + std::string(e.what()));
    }
  }
  apply_config(sc, tree);
  return sc;
}

Scenario load_scenario_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "scenarios", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_ini(ss.str());
}

std::string to_ini(const Scenario& sc) {
  std::string out, section;
  for (const auto& b : bindings()) {
    if (b.section != section) {
      out += (section.empty() ? "[" : "\n[") + b.section + "]\n";
      section = b.section;
    }
    out += b.key + " = " + b.get(sc) + "\n";
  }
  return out;
}

void set_option(Scenario& sc, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) parse_fail("expected section.key, got '" + dotted_key + "'");
  const Binding* b = find_binding(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  if (!b) parse_fail("unknown key '" + dotted_key + "'");
  b->set(sc, value);
}

// ---------------------------------------------------------------------------
// Registry

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kBell = 0.70710678118654757;
constexpr double kPi = std::numbers::pi;

Scenario base(std::string name, std::string figure, std::string description, RuntimeClass rc) {
  Scenario s;
  s.name = std::move(name);
  s.figure = std::move(figure);
  s.description = std::move(description);
  s.runtime = rc;
  return s;
}

Scenario incommensurable_psi(const char* name, const char* tag, double c2) {
  Scenario s = base(name, "Fig. 5" + std::string(tag),
                    "Psi trajectory with stretching numbers, nodes and NPXPC encounters", RuntimeClass::Medium);
  s.model.c2 = c2;
  s.integrator.atol = s.integrator.rtol = 1e-13;
  s.chaos.enabled = true;
  s.nodal.enabled = true;
  s.entanglement.enabled = true;
  return s;
}

Scenario commensurable(const char* name, const char* tag, double c2) {
  Scenario s = base(name, "Fig. 7" + std::string(tag), "periodic Psi trajectory for omega_x = 2, omega_y = 1",
                    RuntimeClass::Short);
  s.model.omega_x = 2;
  s.model.omega_y = 1;
  s.model.x0 = s.model.y0 = 2;
  s.model.c2 = c2;
  s.t_end = 32 * kPi;
  s.sample_dt = kPi / 300;
  s.spectral.enabled = true;
  return s;
}

Scenario isotropic(const char* name, const char* figure, const char* description) {
  Scenario s = base(name, figure, description, RuntimeClass::Medium);
  s.kind = ScenarioKind::Sweep;
  s.model.omega_x = s.model.omega_y = 1;
  s.model.a0 = 2;
  s.model.x0 = 3;
  s.model.y0 = 2;
  s.t_end = 20 * kPi;
  s.sample_dt = kPi / 100;
  s.integrator.precision = Precision::Extended;
  s.integrator.atol = 1e-18;
  s.integrator.rtol = 1e-17;
  s.spectral.enabled = true;
  s.sweep.parameter = "c2";
  return s;
}

std::vector<Scenario> make_registry() {
  std::vector<Scenario> r;

  Scenario fig3 = base("fig3-lissajous", "Fig. 3", "product state Lissajous curve", RuntimeClass::Short);
  r.push_back(fig3);

  Scenario fig4 = base("fig4-nodal-k13", "Fig. 4", "nodal trajectories k = 1, 3 of Psi", RuntimeClass::Short);
  fig4.model.c2 = 2e-5;
  fig4.nodal.enabled = true;
  fig4.nodal.k_min = 1;
  fig4.nodal.k_max = 3;
  fig4.nodal.dt = 0.01;
  fig4.nodal.x_points = false;
  fig4.nodal.encounters = false;
  r.push_back(fig4);

  r.push_back(incommensurable_psi("fig5a-psi", "a", 2e-6));
  r.push_back(incommensurable_psi("fig5b-psi", "b", 2e-5));
  r.push_back(incommensurable_psi("fig5c-psi", "c", kBell));

  Scenario fig6 = base("fig6-flcn", "Fig. 6", "finite-time LCN for the Fig. 5 states up to t = 2e4", RuntimeClass::Long);
  fig6.kind = ScenarioKind::Sweep;
  fig6.t_end = 2e4;
  fig6.sample_dt = 0.1;
  fig6.integrator.atol = fig6.integrator.rtol = 1e-10;
  fig6.integrator.max_steps = 200'000'000;
  fig6.chaos.enabled = true;
  fig6.chaos.classify = true;
  fig6.sweep = {"c2", {2e-6, 2e-5, kBell}};
  r.push_back(fig6);

  r.push_back(commensurable("fig7a-commensurable", "a", 2e-6));
  r.push_back(commensurable("fig7b-commensurable", "b", 2e-5));
  r.push_back(commensurable("fig7c-commensurable", "c", kBell));

  Scenario fig8 = commensurable("fig8-flcn-ordered", "", 2e-5);
  fig8.figure = "Fig. 8";
  fig8.description = "finite-time LCN of the commensurable trajectories";
  fig8.runtime = RuntimeClass::Medium;
  fig8.kind = ScenarioKind::Sweep;
  fig8.t_end = 5e3;
  fig8.sample_dt = 0.1;
  fig8.integrator.atol = fig8.integrator.rtol = 1e-10;
  fig8.spectral.enabled = false;
  fig8.chaos.enabled = true;
  fig8.chaos.classify = true;
  fig8.sweep = {"c2", {2e-6, 2e-5, kBell}};
  r.push_back(fig8);

  Scenario fig9 = isotropic("fig9-isotropic-sweep", "Fig. 9", "isotropic Psi trajectories over ten cycles");
  fig9.sweep.values = {0, 2e-5, 2e-2, 0.4, 0.701, kBell};
  r.push_back(fig9);

  Scenario fig10 = isotropic("fig10-range-sweep", "Fig. 10", "range of motion against c2, isotropic Psi");
  fig10.spectral.period = false;
  for (int i = 0; i <= 14; ++i) fig10.sweep.values.push_back(0.05 * i);
  fig10.sweep.values.push_back(kBell);
  r.push_back(fig10);

  Scenario speed = base("nodal-speed", "nodal speed", "position and velocity of the k = 1 node", RuntimeClass::Short);
  speed.model.c2 = 2e-5;
  speed.nodal.enabled = true;
  speed.nodal.k_min = speed.nodal.k_max = 1;
  speed.nodal.dt = 0.01;
  speed.nodal.x_points = false;
  speed.nodal.encounters = false;
  r.push_back(speed);

  Scenario ent = base("entanglement-curve", "Fig. 2", "entanglement and linear entropy against c2", RuntimeClass::Short);
  ent.kind = ScenarioKind::EntanglementCurve;
  r.push_back(ent);
  return r;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> r = make_registry();
  return r;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : scenario_registry())
    if (s.name == name) return s;
  throw Error(ErrorKind::UnknownScenario, "scenarios", "no scenario named '" + name + "'");
}

Scenario sweep_member(const Scenario& b, const std::string& parameter, double value) {
  Scenario s = b;
  s.kind = ScenarioKind::Run;
  s.sweep = {};
  if (parameter == "c2") {
    s.model.c2 = value;
  } else if (parameter == "omega_ratio") {
    s.model.omega_y = value * s.model.omega_x;
  } else if (parameter == "ic") {
    s.model.x0 = s.model.y0 = value;
  } else if (parameter == "x0") {
    s.model.x0 = value;
  } else if (parameter == "y0") {
    s.model.y0 = value;
  } else {
    parse_fail("sweep.parameter: expected c2, omega_ratio, ic, x0 or y0, got '" + parameter + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Running

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "scenarios", "cannot write " + p.string());
  return f;
}

void write_text(const fs::path& p, const std::string& text) {
  auto f = open_out(p);
  f << text;
  if (!f) throw Error(ErrorKind::Io, "scenarios", "write failed: " + p.string());
}

json real_or_null(std::optional<double> v) { return v && std::isfinite(*v) ? json(*v) : json(nullptr); }

void write_trajectory_csv(const fs::path& p, const Trajectory& tr) {
  auto f = open_out(p);
  f << "t,x,y,vx,vy\n";
  for (const auto& s : tr.samples) {
    f << fmt_real(s.t) << ',' << fmt_real(s.x) << ',' << fmt_real(s.y) << ',' << fmt_real(s.vx) << ','
      << fmt_real(s.vy) << '\n';
  }
}

json common_summary(const Scenario& sc) {
  json j;
  j["scenario"] = sc.name;
  j["figure"] = sc.figure;
  j["kind"] = std::string(to_string(sc.kind));
  j["seed"] = sc.seed;
  j["code_version"] = code_version();
  j["config"] = to_ini(sc);
  j["tolerances"] = {{"method", std::string(to_string(sc.integrator.method))},
                     {"precision", std::string(to_string(sc.integrator.precision))},
                     {"atol", sc.integrator.atol},
                     {"rtol", sc.integrator.rtol},
                     {"sample_dt", sc.sample_dt}};
  return j;
}

int worker_count(const RunOptions& opt) { return opt.threads > 0 ? opt.threads : default_thread_count(); }

json run_single(const Scenario& sc, const fs::path& out, const RunOptions& opt) {
  const SystemConfig cfg = sc.system();
  const PhasePoint ic = sc.initial();
  const IntegratorConfig& icfg = sc.integrator;
  json j = common_summary(sc);
  j["analyses"] = sc.analyses();

  Trajectory traj;
  DeviationLog log;
  const std::array<double, 2> dev{sc.chaos.dev_x, sc.chaos.dev_y};
  if (sc.chaos.enabled && sc.chaos.estimator == "variational") {
    DeviationResult d = integrate_with_deviation(cfg, ic, dev, sc.t_end, icfg, sc.chaos.renorm_dt, sc.sample_dt);
    traj = std::move(d.trajectory);
    log = std::move(d.log);
  } else if (sc.chaos.enabled && sc.chaos.estimator == "shadow") {
    traj = integrate(cfg, ic, sc.t_end, icfg, sc.sample_dt);
    log = shadow_deviation_log(cfg, ic, dev, sc.t_end, icfg, sc.chaos.renorm_dt, sc.chaos.separation);
  } else if (sc.chaos.enabled) {
    parse_fail("chaos.estimator: expected variational or shadow, got '" + sc.chaos.estimator + "'");
  } else {
    traj = integrate(cfg, ic, sc.t_end, icfg, sc.sample_dt);
  }
  write_trajectory_csv(out / "trajectory.csv", traj);

  json flags = json::array();
  for (const auto& f : traj.flags) flags.push_back({{"kind", std::string(to_string(f.kind))}, {"t", f.t}, {"detail", f.detail}});
  j["trajectory"] = {{"samples", traj.samples.size()},
                     {"complete", traj.complete},
                     {"t_reached", traj.t_reached},
                     {"steps", traj.stats.steps},
                     {"rejected", traj.stats.rejected},
                     {"flags", flags}};
  j["tolerances"]["effective_atol"] = traj.effective_atol;
  j["tolerances"]["effective_rtol"] = traj.effective_rtol;

  j["derailment_time"] = nullptr;
  j["classification"] = nullptr;
  if (sc.chaos.enabled) {
    ChaosRecord rec = stretching_series(log, ic.t);
    rec.events = detect_events(rec, sc.chaos.alpha_threshold);
    DerailmentOptions dopt;
    dopt.inflate = sc.chaos.inflate;
    rec.derailment_time = derailment_time(traj, rec, cfg, dopt);
    {
      auto f = open_out(out / "chaos.csv");
      f << "t,alpha,chi\n";
      for (std::size_t i = 0; i < rec.alpha.size(); ++i)
        f << fmt_real(rec.times[i]) << ',' << fmt_real(rec.alpha[i]) << ',' << fmt_real(rec.chi[i]) << '\n';
    }
    {
      auto f = open_out(out / "events.csv");
      f << "t,alpha,x,y\n";
      for (const auto& e : rec.events)
        f << fmt_real(e.t) << ',' << fmt_real(e.alpha) << ',' << fmt_real(e.x) << ',' << fmt_real(e.y) << '\n';
    }
    j["derailment_time"] = real_or_null(rec.derailment_time);
    j["chaos"] = {{"renorm_dt", rec.t0},
                  {"alpha_threshold", sc.chaos.alpha_threshold},
                  {"estimator", sc.chaos.estimator},
                  {"events", rec.events.size()},
                  {"chi_final", rec.chi.empty() ? json(nullptr) : json(rec.chi.back())}};
    if (sc.chaos.classify) {
      const LcnClassification c = lcn_classification(rec.chi, rec.times);
      j["classification"] = {{"kind", std::string(to_string(c.kind))}, {"slope", c.slope}, {"chi_final", c.chi_final}};
    }
  }

  if (sc.nodal.enabled) {
    std::vector<double> times;
    const long n = static_cast<long>(std::floor((sc.t_end - ic.t) / sc.nodal.dt + 1e-9));
    for (long i = 0; i <= n; ++i) times.push_back(ic.t + sc.nodal.dt * static_cast<double>(i));
    const KRange kr{sc.nodal.k_min, sc.nodal.k_max};
    {
      auto f = open_out(out / "nodal.csv");
      write_nodal_csv(f, times, kr, cfg, sc.nodal.x_points);
    }
    json nodal = {{"k_min", kr.lo}, {"k_max", kr.hi}, {"snapshots", times.size()}, {"encounters", nullptr}};
    if (sc.nodal.encounters) {
      EncounterOptions eopt;
      eopt.radius = sc.nodal.radius;
      const auto enc = npxpc_encounters(traj, cfg, kr, eopt);
      auto f = open_out(out / "encounters.csv");
      f << "t,k,distance\n";
      std::set<double> distinct;
      for (const auto& e : enc) {
        f << fmt_real(e.t) << ',' << e.k << ',' << fmt_real(e.distance) << '\n';
        distinct.insert(e.t);
      }
      nodal["encounters"] = enc.size();
      nodal["encounter_times"] = distinct.size();
    }
    j["nodal"] = nodal;
  }

  j["delta_x"] = nullptr;
  j["delta_y"] = nullptr;
  j["period"] = nullptr;
  if (!traj.samples.empty()) {
    j["delta_x"] = range_of_motion(traj, Coordinate::X);
    j["delta_y"] = range_of_motion(traj, Coordinate::Y);
  }
  if (sc.spectral.enabled) {
    const SpectrumReport sx = harmonic_spectrum(traj, Coordinate::X, sc.spectral.base_omega, sc.spectral.m_max);
    const SpectrumReport sy = harmonic_spectrum(traj, Coordinate::Y, sc.spectral.base_omega, sc.spectral.m_max);
    auto f = open_out(out / "spectrum.csv");
    f << "m,amplitude_x,amplitude_y\n";
    for (std::size_t i = 0; i < sx.harmonics.size(); ++i)
      f << sx.harmonics[i].m << ',' << fmt_real(sx.harmonics[i].amplitude) << ',' << fmt_real(sy.harmonics[i].amplitude)
        << '\n';
    j["spectral"] = {{"base_omega", sc.spectral.base_omega}, {"leading_m_x", sx.leading_m}, {"leading_m_y", sy.leading_m}};
    if (sc.spectral.period) {
      try {
        j["period"] = period_estimate(traj, sc.spectral.period_tol);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoPeriodFound) throw;
        j["spectral"]["period_error"] = e.what();
      }
    }
  }

  j["entanglement"] = nullptr;
  if (sc.entanglement.enabled) {
    MonteCarloOptions mc;
    mc.threads = worker_count(opt);
    const EntanglementReport e = entanglement_report(cfg, ic.t, sc.entanglement.samples, sc.seed, mc);
    j["entanglement"] = {{"t", ic.t},
                         {"ee_nats", e.ee_nats},
                         {"le_analytic", e.le_analytic},
                         {"le_qubit", e.le_qubit},
                         {"le_numeric", e.le_numeric},
                         {"le_numeric_stderr", e.le_numeric_stderr},
                         {"le_phase", e.le_phase},
                         {"samples", e.samples}};
  }
  return j;
}

json run_entanglement_curve(const Scenario& sc, const fs::path& out) {
  const auto& e = sc.entanglement;
  if (e.points < 1 || !(e.c2_min >= 0) || !(e.c2_max <= 1) || e.c2_min > e.c2_max) {
    throw Error(ErrorKind::DomainError, "scenarios", "entanglement curve needs 0 <= c2_min <= c2_max <= 1, points >= 1");
  }
  auto f = open_out(out / "entanglement.csv");
  f << "c2,ee,le,le_exact_overlap\n";
  double ee_max = 0, c2_at_max = 0;
  for (int i = 0; i < e.points; ++i) {
    const double c2 = e.points == 1 ? e.c2_min : e.c2_min + (e.c2_max - e.c2_min) * i / (e.points - 1);
    const double c1 = std::sqrt(std::max(0.0, 1 - c2 * c2));
    const double ee = entanglement_entropy(c2);
    f << fmt_real(c2) << ',' << fmt_real(ee) << ',' << fmt_real(linear_entropy_qubit(c2)) << ','
      << fmt_real(linear_entropy_psi(c1, c2, sc.model.a0)) << '\n';
    if (ee > ee_max) {
      ee_max = ee;
      c2_at_max = c2;
    }
  }
  json j = common_summary(sc);
  j["points"] = e.points;
  j["ee_max"] = ee_max;
  j["c2_at_ee_max"] = c2_at_max;
  j["le_max_qubit"] = linear_entropy_qubit(std::sqrt(0.5));
  return j;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_float()) return fmt_real(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json run_sweep(const Scenario& sc, const fs::path& out, const RunOptions& opt) {
  const auto& values = sc.sweep.values;
  // validate the parameter before starting workers
  if (!values.empty()) sweep_member(sc, sc.sweep.parameter, values.front());
  else sweep_member(sc, sc.sweep.parameter, 0.0);

  std::vector<json> results(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  const int workers = std::max(1, std::min<int>(worker_count(opt), static_cast<int>(values.size())));
  RunOptions inner = opt;
  if (workers > 1) inner.threads = 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        char dir[32];
        std::snprintf(dir, sizeof dir, "run_%03zu", i);
        const fs::path sub = out / dir;
        fs::create_directories(sub);
        const Scenario member = sweep_member(sc, sc.sweep.parameter, values[i]);
        results[i] = run_single(member, sub, inner);
        write_text(sub / "summary.json", results[i].dump(2) + "\n");
        write_text(sub / "config.ini", to_ini(member));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  auto f = open_out(out / "sweep.csv");
  f << "index,value,delta_x,delta_y,leading_m_x,leading_m_y,period,derailment_time,classification,slope,chi_final,"
       "events,encounters,complete\n";
  json runs = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const json& r = results[i];
    const json spectral = r.value("spectral", json::object());
    const json chaos = r.value("chaos", json::object());
    const json cls = r["classification"];
    const json nodal = r.value("nodal", json::object());
    json row = {{"index", i},
                {"value", values[i]},
                {"delta_x", r["delta_x"]},
                {"delta_y", r["delta_y"]},
                {"leading_m_x", spectral.value("leading_m_x", json(nullptr))},
                {"leading_m_y", spectral.value("leading_m_y", json(nullptr))},
                {"period", r["period"]},
                {"derailment_time", r["derailment_time"]},
                {"classification", cls.is_null() ? json(nullptr) : cls["kind"]},
                {"slope", cls.is_null() ? json(nullptr) : cls["slope"]},
                {"chi_final", chaos.value("chi_final", json(nullptr))},
                {"events", chaos.value("events", json(nullptr))},
                {"encounters", nodal.value("encounters", json(nullptr))},
                {"complete", r["trajectory"]["complete"]}};
    f << i;
    for (const char* key : {"value", "delta_x", "delta_y", "leading_m_x", "leading_m_y", "period", "derailment_time",
                            "classification", "slope", "chi_final", "events", "encounters", "complete"})
      f << ',' << csv_cell(row[key]);
    f << '\n';
    runs.push_back(row);
  }
  json j = common_summary(sc);
  j["parameter"] = sc.sweep.parameter;
  j["values"] = values;
  j["runs"] = runs;
  return j;
}

}  // namespace

json run_scenario(const Scenario& sc, const fs::path& out, RunOptions opt) {
  sc.integrator.validate();
  if (!(sc.sample_dt > 0)) throw Error(ErrorKind::DomainError, "scenarios", "sample_dt must be positive");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::Io, "scenarios", "cannot create " + out.string() + ": " + ec.message());
  json j;
  switch (sc.kind) {
    case ScenarioKind::Run: j = run_single(sc, out, opt); break;
    case ScenarioKind::Sweep: j = run_sweep(sc, out, opt); break;
    case ScenarioKind::EntanglementCurve: j = run_entanglement_curve(sc, out); break;
  }
  write_text(out / "config.ini", to_ini(sc));
  write_text(out / "summary.json", j.dump(2) + "\n");
  return j;
}

json error_json(const Error& e, const std::string& scenario) {
  return {{"error", {{"kind", std::string(to_string(e.kind()))}, {"module", e.module()}, {"message", e.what()}}},
          {"scenario", scenario},
          {"code_version", code_version()}};
}

}  // namespace bohmium

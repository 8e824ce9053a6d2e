#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bohmium/scenarios.hpp"

using namespace bohmium;
namespace fs = std::filesystem;

namespace {

struct Selection {
  std::string scenario;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> precision;
  std::optional<double> tol;
  std::optional<double> t_end;
  std::vector<std::string> sets;
};

void add_selection(CLI::App* cmd, Selection& s) {
  cmd->add_option("--scenario,-s", s.scenario, "preset name (see `bohmium list`)");
  cmd->add_option("--config,-c", s.config, "INI file; `[scenario] base = <preset>` starts from a preset");
  cmd->add_option("--out,-o", s.out, "output directory (default out/<scenario>)");
  cmd->add_option("--seed", s.seed, "Monte-Carlo seed");
  cmd->add_option("--precision", s.precision, "standard or extended");
  cmd->add_option("--tol", s.tol, "sets atol and rtol");
  cmd->add_option("--t-end", s.t_end, "final time");
  cmd->add_option("--set", s.sets, "section.key=value override, repeatable");
}

Scenario resolve(const Selection& s) {
  if (s.scenario.empty() == s.config.empty()) {
    throw Error(ErrorKind::ConfigParse, "cli", "give exactly one of --scenario and --config");
  }
  Scenario sc = s.config.empty() ? find_scenario(s.scenario) : load_scenario_file(s.config);
  if (s.seed) sc.seed = *s.seed;
  if (s.precision) set_option(sc, "integrate.precision", *s.precision);
  if (s.tol) sc.integrator.atol = sc.integrator.rtol = *s.tol;
  if (s.t_end) sc.t_end = *s.t_end;
  for (const auto& kv : s.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigParse, "cli", "--set expects section.key=value");
    set_option(sc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return sc;
}

fs::path out_dir(const Selection& s, const Scenario& sc) {
  if (!s.out.empty()) return s.out;
  return fs::path("out") / (sc.name.empty() ? "custom" : sc.name);
}

int fail(const Error& e, const std::string& name, const std::optional<fs::path>& out) {
  const std::string text = error_json(e, name).dump(2) + "\n";
  std::cerr << text;
  if (out) {
    std::error_code ec;
    fs::create_directories(*out, ec);
    std::ofstream(*out / "error.json") << text;
  }
  return 2;
}

int execute(const Selection& sel, int threads, const std::function<void(Scenario&)>& adjust) {
  std::string name = sel.scenario;
  std::optional<fs::path> out;
  if (!sel.out.empty()) out = fs::path(sel.out);
  try {
    Scenario sc = resolve(sel);
    adjust(sc);
    name = sc.name;
    out = out_dir(sel, sc);
    const auto summary = run_scenario(sc, *out, {threads});
    std::cout << "wrote " << out->string() << "\n";
    if (summary.contains("derailment_time") && !summary["derailment_time"].is_null())
      std::cout << "derailment_time " << summary["derailment_time"].get<double>() << "\n";
    return 0;
  } catch (const Error& e) {
    return fail(e, name, out);
  } catch (const std::exception& e) {
    return fail(Error(ErrorKind::Io, "cli", e.what()), name, out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectories of entangled coherent states"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads,-j", threads, "worker threads (default BOHMIUM_THREADS or all cores)");

  app.add_subcommand("list", "list the preset scenarios");

  Selection show_sel;
  auto* show = app.add_subcommand("show", "print the resolved configuration");
  add_selection(show, show_sel);

  Selection run_sel;
  auto* run = app.add_subcommand("run", "run one scenario and write its artifacts");
  add_selection(run, run_sel);

  Selection sweep_sel;
  std::string parameter;
  std::vector<double> values;
  bool have_values = false;
  auto* sweep = app.add_subcommand("sweep", "run a scenario once per parameter value");
  add_selection(sweep, sweep_sel);
  sweep->add_option("--parameter,-p", parameter, "c2, omega_ratio, ic, x0 or y0");
  auto* vopt = sweep->add_option("--values,-v", values, "comma separated values")->delimiter(',');
  sweep->add_flag("--empty", have_values, "run with an empty value list");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) {
    for (const auto& s : scenario_registry()) {
      std::printf("%-24s %-14s %-7s %s\n", s.name.c_str(), s.figure.c_str(), std::string(to_string(s.runtime)).c_str(),
                  s.description.c_str());
    }
    return 0;
  }
  if (app.got_subcommand("show")) {
    try {
      std::cout << to_ini(resolve(show_sel));
      return 0;
    } catch (const Error& e) {
      return fail(e, show_sel.scenario, std::nullopt);
    }
  }
  if (app.got_subcommand("run")) return execute(run_sel, threads, [](Scenario&) {});

  const bool explicit_values = vopt->count() > 0 || have_values;
  return execute(sweep_sel, threads, [&](Scenario& sc) {
    sc.kind = ScenarioKind::Sweep;
    if (!parameter.empty()) sc.sweep.parameter = parameter;
    if (explicit_values) sc.sweep.values = values;
  });
}

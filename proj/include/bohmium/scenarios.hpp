#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include "bohmium/chaos.hpp"
#include "bohmium/integrate.hpp"
#include "bohmium/model.hpp"

// Named presets, INI configuration and the artifact writer behind the CLI.

namespace bohmium {

enum class RuntimeClass { Short, Medium, Long };
std::string_view to_string(RuntimeClass r) noexcept;

enum class ScenarioKind { Run, Sweep, EntanglementCurve };
std::string_view to_string(ScenarioKind k) noexcept;

struct ModelSettings {
  double omega_x = 1;
  double omega_y = 1.7320508075688772;
  double a0 = 2.5;
  double sigma_x = 0;
  double sigma_y = 0;
  double c2 = 0;
  StateKind state = StateKind::Psi;
  double x0 = -2;
  double y0 = 2;
  double t0 = 0;
};

struct ChaosSettings {
  bool enabled = false;
  double renorm_dt = 0.05;
  double alpha_threshold = kDefaultAlphaThreshold;
  double dev_x = 1;
  double dev_y = 0;
  double inflate = 1.5;
  bool classify = false;
  std::string estimator = "variational";  // or "shadow"
  double separation = 1e-8;               // shadow estimator only
};

struct NodalSettings {
  bool enabled = false;
  int k_min = -9;
  int k_max = 9;
  double dt = 0.1;  // snapshot spacing of the nodal CSV
  bool x_points = true;
  bool encounters = true;
  double radius = 0.5;
};

struct SpectralSettings {
  bool enabled = false;
  double base_omega = 1;
  int m_max = 8;
  bool period = true;
  double period_tol = 1e-5;
};

struct EntanglementSettings {
  bool enabled = false;
  std::int64_t samples = 100'000;
  // entanglement-curve grid
  double c2_min = 0;
  double c2_max = 1;
  int points = 101;
};

struct SweepSettings {
  std::string parameter;  // c2, omega_ratio, ic, x0 or y0
  std::vector<double> values;
};

struct Scenario {
  std::string name;
  std::string figure;
  std::string description;
  RuntimeClass runtime = RuntimeClass::Short;
  ScenarioKind kind = ScenarioKind::Run;
  std::uint64_t seed = 1;
  double t_end = 100;
  double sample_dt = 0.01;
  ModelSettings model;
  IntegratorConfig integrator;
  ChaosSettings chaos;
  NodalSettings nodal;
  SpectralSettings spectral;
  EntanglementSettings entanglement;
  SweepSettings sweep;

  SystemConfig system() const;
  PhasePoint initial() const;
  std::vector<std::string> analyses() const;
};

/// Presets in registry order; names are unique.
const std::vector<Scenario>& scenario_registry();
/// Throws UnknownScenario.
const Scenario& find_scenario(const std::string& name);

/// Applies every key of the tree; unknown sections or keys and unparsable
/// values throw ConfigParse. A `[scenario] base = <preset>` key is ignored here.
void apply_config(Scenario& sc, const boost::property_tree::ptree& tree);
/// Parses INI text. When it names a base preset the result starts from it.
Scenario scenario_from_ini(const std::string& text);
Scenario load_scenario_file(const std::filesystem::path& path);
/// Resolved configuration with every key; scenario_from_ini reproduces it.
std::string to_ini(const Scenario& sc);
/// Sets one `section.key` to value, as in a config file.
void set_option(Scenario& sc, const std::string& dotted_key, const std::string& value);

/// Copy of the base with one sweep value applied (kind becomes Run).
Scenario sweep_member(const Scenario& base, const std::string& parameter, double value);

struct RunOptions {
  /// Sweep workers and Monte-Carlo threads; 0 picks BOHMIUM_THREADS or the hardware.
  int threads = 0;
};

/// Runs a scenario of any kind into `out` and returns the summary written to
/// out/summary.json. Library errors propagate as Error.
nlohmann::json run_scenario(const Scenario& sc, const std::filesystem::path& out, RunOptions opt = {});

/// Machine-readable description of a failure.
nlohmann::json error_json(const Error& e, const std::string& scenario);

std::string code_version();

}  // namespace bohmium

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "bohmium/scenarios.hpp"
#include "doctest.h"

using namespace bohmium;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("bohmium_test_" + std::to_string(::getpid())) / tag;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      row.push_back(end == cell.c_str() ? std::nan("") : v);
    }
    rows.push_back(row);
  }
  return rows;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("registry holds every figure preset once") {
  const auto& reg = scenario_registry();
  CHECK(reg.size() >= 10);
  std::set<std::string> names;
  for (const auto& s : reg) names.insert(s.name);
  CHECK(names.size() == reg.size());
  for (const char* n : {"fig3-lissajous", "fig4-nodal-k13", "fig5a-psi", "fig5b-psi", "fig5c-psi", "fig6-flcn",
                        "fig7a-commensurable", "fig7b-commensurable", "fig7c-commensurable", "fig8-flcn-ordered",
                        "fig9-isotropic-sweep", "fig10-range-sweep", "nodal-speed", "entanglement-curve"}) {
    CHECK_MESSAGE(names.count(n) == 1, n);
  }
  CHECK(kind_of([] { find_scenario("fig11"); }) == ErrorKind::UnknownScenario);
}

TEST_CASE("preset parameters follow the figure captions") {
  for (const char* n : {"fig5a-psi", "fig5b-psi", "fig5c-psi"}) {
    const Scenario& s = find_scenario(n);
    CHECK(s.model.x0 == -2);
    CHECK(s.model.y0 == 2);
    CHECK(s.model.omega_x == 1);
    CHECK(s.model.omega_y == doctest::Approx(std::sqrt(3.0)).epsilon(1e-16));
    CHECK(s.model.state == StateKind::Psi);
  }
  CHECK(find_scenario("fig5a-psi").model.c2 == 2e-6);
  CHECK(find_scenario("fig5b-psi").model.c2 == 2e-5);
  CHECK(find_scenario("fig5c-psi").model.c2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-16));
  for (const char* n : {"fig7a-commensurable", "fig7b-commensurable", "fig7c-commensurable"}) {
    const Scenario& s = find_scenario(n);
    CHECK(s.model.x0 == 2);
    CHECK(s.model.y0 == 2);
    CHECK(s.model.omega_x == 2);
    CHECK(s.model.omega_y == 1);
  }
  const Scenario& f9 = find_scenario("fig9-isotropic-sweep");
  CHECK(f9.model.omega_x == f9.model.omega_y);
  CHECK(f9.sweep.values.size() == 6);
  CHECK(f9.integrator.precision == Precision::Extended);
}

TEST_CASE("ini round trip reproduces every preset") {
  for (const auto& s : scenario_registry()) {
    const std::string ini = to_ini(s);
    CHECK(to_ini(scenario_from_ini(ini)) == ini);
  }
}

TEST_CASE("config parsing") {
  const Scenario s = scenario_from_ini("[scenario]\nbase = fig5b-psi\nt_end = 30\n[model]\nstate = phi\n");
  CHECK(s.name == "fig5b-psi");
  CHECK(s.t_end == 30);
  CHECK(s.model.state == StateKind::Phi);
  CHECK(s.model.c2 == 2e-5);

  Scenario t = find_scenario("fig3-lissajous");
  set_option(t, "integrate.method", "RKF45");
  set_option(t, "sweep.values", "0.1, 0.2,0.3");
  CHECK(t.integrator.method == Method::RKF45);
  CHECK(t.sweep.values == std::vector<double>{0.1, 0.2, 0.3});

  CHECK(kind_of([] { scenario_from_ini("[model]\nc3 = 1\n"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { scenario_from_ini("[colour]\nc2 = 1\n"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { scenario_from_ini("[model]\nc2 = abc\n"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { scenario_from_ini("[chaos]\nenabled = maybe\n"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { scenario_from_ini("[scenario]\nbase = nothing\n"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { scenario_from_ini("[model\nc2 = 1\n"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { load_scenario_file("/nonexistent/x.ini"); }) == ErrorKind::Io);
  CHECK(kind_of([&] { set_option(t, "c2", "1"); }) == ErrorKind::ConfigParse);
  CHECK(kind_of([] { sweep_member(find_scenario("fig3-lissajous"), "mass", 1.0); }) == ErrorKind::ConfigParse);
}

TEST_CASE("fig3 trajectory csv follows the closed-form lissajous curve") {
  const fs::path out = scratch("fig3");
  const auto summary = run_scenario(find_scenario("fig3-lissajous"), out);
  std::string header;
  const auto rows = read_csv(out / "trajectory.csv", &header);
  CHECK(header == "t,x,y,vx,vy");
  REQUIRE(rows.size() == 10001);
  const double a0 = 2.5, wy = std::sqrt(3.0);
  double worst = 0;
  for (const auto& r : rows) {
    const double t = r[0];
    const double x = -2 + std::sqrt(2.0) * a0 * (std::cos(t) - 1);
    const double y = 2 - std::sqrt(2 / wy) * a0 * (std::cos(wy * t) - 1);
    worst = std::max({worst, std::abs(r[1] - x), std::abs(r[2] - y)});
  }
  CHECK(worst < 1e-8);
  CHECK(rows.back()[0] == doctest::Approx(100.0));
  CHECK(summary["trajectory"]["complete"] == true);
  CHECK(summary["derailment_time"].is_null());
  // the embedded configuration reproduces the run
  CHECK(to_ini(scenario_from_ini(summary["config"].get<std::string>())) == to_ini(find_scenario("fig3-lissajous")));
}

TEST_CASE("runs are byte-identical for the same seed") {
  Scenario s = find_scenario("fig5b-psi");
  s.t_end = 12;
  s.entanglement.samples = 20000;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_scenario(s, a, {1});
  run_scenario(s, b, {2});
  for (const char* f : {"trajectory.csv", "chaos.csv", "events.csv", "nodal.csv", "encounters.csv", "summary.json",
                        "config.ini"}) {
    CHECK_MESSAGE(fs::exists(a / f), f);
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  std::string header;
  read_csv(a / "chaos.csv", &header);
  CHECK(header == "t,alpha,chi");
  std::ifstream nodal(a / "nodal.csv");
  std::getline(nodal, header);
  CHECK(header == "t,k,x_nod,y_nod,vx_nod,vy_nod,x_X,y_X,residual");
  std::ifstream enc(a / "encounters.csv");
  std::getline(enc, header);
  CHECK(header == "t,k,distance");
}

TEST_CASE("sweeps write one directory per value and an aggregate table") {
  Scenario s = find_scenario("fig9-isotropic-sweep");
  s.sweep.values = {0.0, 0.4, 0.2};
  s.integrator.precision = Precision::Standard;
  s.integrator.atol = s.integrator.rtol = 1e-12;
  const fs::path one = scratch("sweep1"), two = scratch("sweep2");
  const auto summary = run_scenario(s, one, {1});
  run_scenario(s, two, {3});
  CHECK(slurp(one / "sweep.csv") == slurp(two / "sweep.csv"));
  std::string header;
  const auto rows = read_csv(one / "sweep.csv", &header);
  CHECK(header.rfind("index,value,delta_x,", 0) == 0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][1] == 0.0);
  CHECK(rows[1][1] == 0.4);
  CHECK(rows[0][2] == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-8));
  CHECK(rows[1][2] < rows[2][2]);
  CHECK(fs::exists(one / "run_002" / "spectrum.csv"));
  CHECK(summary["runs"].size() == 3);

  std::ifstream spectrum(one / "run_000" / "spectrum.csv");
  std::getline(spectrum, header);
  CHECK(header == "m,amplitude_x,amplitude_y");

  s.sweep.values.clear();
  const fs::path empty = scratch("sweep_empty");
  run_scenario(s, empty);
  CHECK(read_csv(empty / "sweep.csv", &header).empty());
  CHECK(header.rfind("index,value", 0) == 0);
}

TEST_CASE("entanglement curve") {
  const fs::path out = scratch("ent");
  const auto summary = run_scenario(find_scenario("entanglement-curve"), out);
  std::string header;
  const auto rows = read_csv(out / "entanglement.csv", &header);
  CHECK(header == "c2,ee,le,le_exact_overlap");
  REQUIRE(rows.size() == 101);
  CHECK(rows.front()[1] == 0.0);
  CHECK(rows.back()[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rows.front()[2] == 0.0);
  CHECK(std::abs(rows.back()[2]) < 1e-12);
  CHECK(summary["c2_at_ee_max"].get<double>() == doctest::Approx(0.71));
  CHECK(summary["le_max_qubit"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("errors carry their module") {
  Scenario s = find_scenario("fig7a-commensurable");
  s.t_end = 5.0;  // not a whole number of periods
  const fs::path out = scratch("err");
  try {
    run_scenario(s, out);
    FAIL("expected IncompleteWindow");
  } catch (const Error& e) {
    const auto j = error_json(e, s.name);
    CHECK(j["error"]["kind"] == "IncompleteWindow");
    CHECK(j["error"]["module"] == "spectral");
    CHECK(j["scenario"] == "fig7a-commensurable");
  }
}

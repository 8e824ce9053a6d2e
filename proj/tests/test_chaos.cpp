#include <cmath>
#include <numbers>
#include <random>

#include "bohmium/chaos.hpp"
#include "doctest.h"

using namespace bohmium;

namespace {

DeviationLog make_log(const std::vector<double>& growth, double t0 = 0.05) {
  DeviationLog log;
  log.renorm_dt = t0;
  for (std::size_t i = 0; i < growth.size(); ++i) {
    log.times.push_back(t0 * static_cast<double>(i + 1));
    log.growth.push_back(growth[i]);
    log.x.push_back(0);
    log.y.push_back(0);
  }
  return log;
}

}  // namespace

TEST_CASE("stretching numbers of a constant deviation vanish") {
  const ChaosRecord r = stretching_series(make_log(std::vector<double>(100, 1.0)));
  REQUIRE(r.alpha.size() == 100);
  REQUIRE(r.chi.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(r.alpha[i] == 0.0);
    CHECK(r.chi[i] == 0.0);
  }
  CHECK(detect_events(r).empty());
}

TEST_CASE("chi is the running mean of alpha over elapsed time") {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> g(0.0, 0.3);
  std::vector<double> growth(5000);
  for (auto& v : growth) v = g(rng);
  const ChaosRecord r = stretching_series(make_log(growth, 0.1));
  double sum = 0;
  for (std::size_t n = 0; n < growth.size(); ++n) {
    sum += std::log(growth[n]);
    CHECK(r.alpha[n] == doctest::Approx(std::log(growth[n])).epsilon(1e-15));
    CHECK(std::abs(r.chi[n] - sum / (0.1 * static_cast<double>(n + 1))) <= 1e-14);
  }
}

TEST_CASE("non-positive growth is rejected") {
  CHECK_THROWS_AS(stretching_series(make_log({1.0, 0.0})), Error);
  CHECK_THROWS_AS(stretching_series(make_log({-1.0})), Error);
}

TEST_CASE("events merge within two intervals and keep the largest spike") {
  std::vector<double> growth(40, 1.0);
  growth[9] = std::exp(0.6);
  growth[10] = std::exp(1.4);  // merges with the previous one
  growth[13] = std::exp(0.9);  // three intervals later: separate
  const ChaosRecord r = stretching_series(make_log(growth));
  const auto ev = detect_events(r);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].t == doctest::Approx(0.55));
  CHECK(ev[0].alpha == doctest::Approx(1.4));
  CHECK(ev[1].t == doctest::Approx(0.70));
  CHECK(detect_events(r, 1.0).size() == 1);
  CHECK(detect_events(r, 5.0).empty());
}

TEST_CASE("raising the threshold never adds events") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> e(2.0);
  std::vector<double> growth(3000);
  for (auto& v : growth) v = std::exp(e(rng) - 0.3);
  const ChaosRecord r = stretching_series(make_log(growth));
  std::size_t prev = detect_events(r, 0.0).size();
  for (double th = 0.1; th < 4.0; th += 0.1) {
    const std::size_t n = detect_events(r, th).size();
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("product state has no exponential divergence") {
  const SystemConfig cfg = SystemConfig::with_c2(1.0, std::sqrt(3.0), 0.0);
  IntegratorConfig ic;
  const DeviationResult d = integrate_with_deviation(cfg, {-2.0, 2.0, 0.0}, {0.6, 0.8}, 50.0, ic);
  const ChaosRecord r = stretching_series(d.log);
  for (double c : r.chi) CHECK(std::abs(c) < 1e-8);
  CHECK(detect_events(r).empty());
  CHECK_FALSE(derailment_time(d.trajectory, r, cfg).has_value());
}

TEST_CASE("power-law decay is ordered") {
  std::vector<double> t, chi;
  for (int i = 1; i <= 100000; ++i) {
    t.push_back(0.05 * i);
    chi.push_back(0.3 / t.back());
  }
  const auto c = lcn_classification(chi, t);
  CHECK(c.kind == ChaosClass::Ordered);
  CHECK(c.slope == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("a positive plateau is chaotic") {
  std::vector<double> t, chi;
  for (int i = 1; i <= 100000; ++i) {
    t.push_back(0.05 * i);
    chi.push_back(0.01 * (1 + 0.1 * std::sin(t.back() / 50)));
  }
  const auto c = lcn_classification(chi, t);
  CHECK(c.kind == ChaosClass::Chaotic);
  CHECK(std::abs(c.slope) < 0.2);
}

TEST_CASE("zero crossings alone do not make an ordered verdict") {
  // oscillates through zero but the envelope does not decay
  std::vector<double> t, chi;
  for (int i = 1; i <= 100000; ++i) {
    t.push_back(0.05 * i);
    chi.push_back(0.01 * std::sin(t.back() / 30));
  }
  CHECK(lcn_classification(chi, t).kind != ChaosClass::Ordered);
}

TEST_CASE("classification needs two decades") {
  std::vector<double> t{1, 2, 5, 10, 50}, chi{1, 1, 1, 1, 1};
  CHECK_THROWS_AS(lcn_classification(chi, t), Error);
  CHECK_THROWS_AS(lcn_classification({1.0}, {1.0}), Error);
}

TEST_CASE("derailment needs an exit that stays out") {
  Trajectory tr;
  ChaosRecord rec;
  rec.t0 = 0.05;
  const double w = 2 * std::numbers::pi;
  for (int i = 0; i <= 10000; ++i) {
    const double t = 0.01 * i;
    double x = std::cos(t), y = std::sin(t);
    if (t > 50.0) x += 10.0;  // jumps away and stays
    tr.samples.push_back({t, x, y, 0, 0});
  }
  rec.events = {{20.0, 1.0, 0, 0}, {49.9, 2.0, 0, 0}, {49.95, 0.7, 0, 0}};
  auto td = derailment_time(tr, rec, w);
  REQUIRE(td.has_value());
  CHECK(*td == doctest::Approx(49.95));

  // leaves briefly, then returns within one period: not a derailment
  Trajectory back = tr;
  for (auto& s : back.samples)
    if (s.t > 53.0) s.x -= 10.0;
  CHECK_FALSE(derailment_time(back, rec, w).has_value());

  // events during the warm-up window are ignored
  Trajectory early;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 0.01 * i;
    early.samples.push_back({t, t > 3.0 ? 50.0 : std::cos(t), 0.0, 0, 0});
  }
  ChaosRecord er;
  er.events = {{2.9, 3.0, 0, 0}};
  CHECK_FALSE(derailment_time(early, er, w).has_value());
}

TEST_CASE("shadow trajectory estimate tracks the variational one") {
  const SystemConfig cfg = SystemConfig::with_c2(1.0, std::sqrt(3.0), 0.3);
  IntegratorConfig ic;
  ic.atol = ic.rtol = 1e-13;
  const DeviationResult v = integrate_with_deviation(cfg, {-1.0, 1.0, 0.0}, {1.0, 0.0}, 10.0, ic);
  const DeviationLog s = shadow_deviation_log(cfg, {-1.0, 1.0, 0.0}, {1.0, 0.0}, 10.0, ic);
  REQUIRE(s.growth.size() == v.log.growth.size());
  const ChaosRecord a = stretching_series(v.log), b = stretching_series(s);
  for (std::size_t i = 0; i < a.chi.size(); ++i) CHECK(b.chi[i] == doctest::Approx(a.chi[i]).epsilon(1e-4));
}

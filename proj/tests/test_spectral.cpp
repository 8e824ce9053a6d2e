#include <cmath>
#include <numbers>
#include <random>

#include "bohmium/spectral.hpp"
#include "doctest.h"

using namespace bohmium;

namespace {

const double kPi = std::numbers::pi;

template <class F>
Trajectory synthetic(double t_end, double dt, F f) {
  Trajectory tr;
  const long n = std::lround(t_end / dt);
  for (long i = 0; i <= n; ++i) {
    const double t = dt * static_cast<double>(i);
    const auto [x, y, vx, vy] = f(t);
    tr.samples.push_back({t, x, y, vx, vy});
  }
  return tr;
}

}  // namespace

TEST_CASE("pure tone") {
  const Trajectory tr = synthetic(4 * kPi, kPi / 200, [](double t) {
    return std::array<double, 4>{std::sin(t), 0.0, std::cos(t), 0.0};
  });
  const auto s = harmonic_spectrum(tr, Coordinate::X, 1.0);
  CHECK(s.leading_m == 1);
  CHECK(s.harmonics.size() == 8);
  CHECK(s.harmonics[0].amplitude == doctest::Approx(1.0).epsilon(1e-10));
  for (int m = 2; m <= 8; ++m) CHECK(s.harmonics[m - 1].amplitude < 1e-12);
  CHECK(s.delta_x == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("mixed harmonics around an offset") {
  const Trajectory tr = synthetic(6 * kPi, kPi / 300, [](double t) {
    return std::array<double, 4>{3.0 + 0.2 * std::sin(t) + 0.5 * std::cos(2 * t - 0.3) + 0.05 * std::sin(5 * t),
                                 0.0, 0.0, 0.0};
  });
  const auto s = harmonic_spectrum(tr, Coordinate::X, 1.0);
  CHECK(s.leading_m == 2);
  CHECK(s.harmonics[0].amplitude == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(s.harmonics[1].amplitude == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.harmonics[4].amplitude == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("projected power never exceeds the signal power") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Trajectory tr;
    const int n = 400;
    for (int i = 0; i <= n; ++i) tr.samples.push_back({2 * kPi * i / n, nd(rng), nd(rng), 0, 0});
    const auto s = harmonic_spectrum(tr, Coordinate::Y, 1.0, 8);
    double mean = 0, ms = 0, power = 0;
    for (int i = 0; i < n; ++i) mean += tr.samples[i].y / n;
    for (int i = 0; i < n; ++i) ms += (tr.samples[i].y - mean) * (tr.samples[i].y - mean) / n;
    for (const auto& h : s.harmonics) power += h.amplitude * h.amplitude / 2;
    CHECK(power <= ms * (1 + 1e-12));
  }
}

TEST_CASE("spectrum input checks") {
  Trajectory bad = synthetic(2 * kPi, kPi / 100, [](double t) { return std::array<double, 4>{t, 0, 1, 0}; });
  bad.samples[10].t += 1e-4;
  CHECK_THROWS_AS(harmonic_spectrum(bad, Coordinate::X, 1.0), Error);
  const Trajectory partial = synthetic(5.0, 0.01, [](double t) { return std::array<double, 4>{t, 0, 1, 0}; });
  try {
    harmonic_spectrum(partial, Coordinate::X, 1.0);
    FAIL("expected IncompleteWindow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompleteWindow);
  }
}

TEST_CASE("range of motion") {
  const Trajectory flat = synthetic(3.0, 0.1, [](double) { return std::array<double, 4>{1.5, -2.0, 0, 0}; });
  CHECK(range_of_motion(flat, Coordinate::X) == 0.0);
  CHECK(range_of_motion(flat, Coordinate::Y) == 0.0);
  CHECK_THROWS_AS(range_of_motion(Trajectory{}, Coordinate::X), Error);
}

TEST_CASE("period of a sampled orbit") {
  // the sample grid does not divide the period
  const Trajectory tr = synthetic(12.0, 0.01, [](double t) {
    return std::array<double, 4>{std::cos(2 * t) + 0.3 * std::cos(4 * t), std::sin(2 * t), -2 * std::sin(2 * t) - 1.2 * std::sin(4 * t),
                                 2 * std::cos(2 * t)};
  });
  CHECK(period_estimate(tr) == doctest::Approx(kPi).epsilon(1e-8));
  const Trajectory drift = synthetic(12.0, 0.01, [](double t) { return std::array<double, 4>{t, 0, 1, 0}; });
  try {
    period_estimate(drift);
    FAIL("expected NoPeriodFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoPeriodFound);
  }
}

TEST_CASE("isotropic orbits: fundamental for weak entanglement, second harmonic at maximal") {
  IntegratorConfig ic;
  ic.atol = ic.rtol = 1e-13;
  const SystemConfig weak = SystemConfig::with_c2(1.0, 1.0, 2e-5, StateKind::Psi, 2.0);
  const Trajectory a = integrate(weak, {3.0, 2.0, 0.0}, 20 * kPi, ic, kPi / 100);
  CHECK(harmonic_spectrum(a, Coordinate::X, 1.0).leading_m == 1);
  CHECK(period_estimate(a) == doctest::Approx(2 * kPi).epsilon(1e-5));
  CHECK(range_of_motion(a, Coordinate::X) == doctest::Approx(range_of_motion(a, Coordinate::Y)).epsilon(1e-10));

  IntegratorConfig ext;
  ext.atol = 1e-18;
  ext.rtol = 1e-17;
  ext.precision = Precision::Extended;
  const SystemConfig bell = SystemConfig::with_c2(1.0, 1.0, std::sqrt(0.5), StateKind::Psi, 2.0);
  const Trajectory b = integrate(bell, {3.0, 2.0, 0.0}, 20 * kPi, ext, kPi / 100);
  CHECK(harmonic_spectrum(b, Coordinate::X, 1.0).leading_m == 2);
  CHECK(period_estimate(b) == doctest::Approx(kPi).epsilon(1e-5));
}

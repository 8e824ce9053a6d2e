#include <cmath>
#include <numbers>
#include <random>

#include "bohmium/model.hpp"
#include "doctest.h"

using namespace bohmium;

namespace {

double simpson(auto f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

SystemConfig bell(double wx, double wy, StateKind kind, double a0 = 2.5) {
  return SystemConfig::with_c2(wx, wy, std::sqrt(0.5), kind, a0);
}

}  // namespace

TEST_CASE("oscillator parameters validate and wrap") {
  CHECK_THROWS_AS(OscillatorParams(0.0, 1.0), Error);
  CHECK_THROWS_AS(OscillatorParams(1.0, -1.0), Error);
  const OscillatorParams o(1.0, 2.5, -std::numbers::pi / 2);
  CHECK(o.sigma() == doctest::Approx(1.5 * std::numbers::pi));
  CHECK(o.shifted_by_pi().sigma() == doctest::Approx(0.5 * std::numbers::pi));
  try {
    OscillatorParams(-1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainError);
    CHECK(e.module() == "model");
  }
}

TEST_CASE("system config normalizes coefficients") {
  const SystemConfig c(OscillatorParams(1, 2.5), OscillatorParams(1, 2.5), 3.0, 4.0, StateKind::Psi);
  CHECK(c.c1() * c.c1() + c.c2() * c.c2() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.c1() == doctest::Approx(0.6));
  CHECK_THROWS_AS(SystemConfig(OscillatorParams(1, 1), OscillatorParams(1, 1), 0, 0, StateKind::Phi), Error);
}

TEST_CASE("phase convention at t = 0") {
  const OscillatorParams o(1.7, 2.5);
  const ComplexValue a = coherent_amplitude(0.0, o);
  CHECK(a.re == doctest::Approx(2.5));
  CHECK(a.im == 0.0);
  CHECK(coherent_phase(0.0, o) == 0.0);
}

TEST_CASE("coherent state is normalized and peaked at its centre") {
  const OscillatorParams o(1.0, 2.5);
  for (double t : {0.0, 0.7, 3.0}) {
    const double n = simpson([&](double x) { return coherent_value(x, t, o).norm2(); }, -20, 20, 4000);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-10));
  }
  const double centre = std::sqrt(2.0) * 2.5;
  CHECK(coherent_value(centre, 0.0, o).abs() == doctest::Approx(std::pow(1.0 / std::numbers::pi, 0.25)));
  CHECK(coherent_value(centre, 0.0, o).abs() == doctest::Approx(0.75113).epsilon(1e-5));
  CHECK(coherent_value(1e3, 0.0, o).abs() == 0.0);
  CHECK(coherent_value(-1e3, 0.0, o).abs() == 0.0);
}

TEST_CASE("overlap") {
  CHECK(overlap({1.3, -0.2}, {1.3, -0.2}) == 1.0);
  const double rl = overlap({2.5, 0}, {-2.5, 0});
  CHECK(rl == doctest::Approx(1.3887943864964021e-11).epsilon(1e-12));
  CHECK(std::sqrt(rl) == doctest::Approx(3.726653172078671e-06).epsilon(1e-12));
  CHECK(overlap({0.6, 0.0}, {0.0, 0.8}) == doctest::Approx(0.36787944117144233));
}

TEST_CASE("aux terms examples") {
  const SystemConfig cfg = bell(1.0, std::sqrt(3.0), StateKind::Psi);
  const SystemConfig phi = bell(1.0, std::sqrt(3.0), StateKind::Phi);
  for (double x : {-3.0, 0.2, 4.0}) {
    CHECK(aux_terms({x, 1.0, 0.0}, cfg).a == 0.0);
    CHECK(aux_terms({x, 1.0, 0.0}, phi).a == 0.0);
  }
  const SystemConfig prod = SystemConfig::with_c2(1.0, std::sqrt(3.0), 0.0);
  for (double t : {0.3, 2.0, 11.0}) {
    const AuxTerms s = aux_terms({-1.2, 0.7, t}, prod);
    CHECK(s.a == 0.0);
    CHECK(s.b / s.g == doctest::Approx(1.0).epsilon(1e-15));
  }
  const SystemConfig iso = bell(1.0, 1.0, StateKind::Psi);
  const AuxTerms s = aux_terms({1.1, 1.1, 0.4}, iso);
  CHECK(s.f_x == s.f_y);
  CHECK(s.g_x == s.g_y);
}

TEST_CASE("aux term ratios agree with unscaled evaluation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3), ut(0, 20);
  for (StateKind kind : {StateKind::Psi, StateKind::Phi}) {
    const SystemConfig cfg = SystemConfig::with_c2(1.0, std::sqrt(3.0), 0.3, kind);
    const double c1 = cfg.c1(), c2 = cfg.c2();
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng), y = u(rng), t = ut(rng);
      const AuxTerms s = aux_terms({x, y, t}, cfg);
      const double kx = std::sqrt(2.0) * 2.5, ky = std::sqrt(2.0 * std::sqrt(3.0)) * 2.5;
      const double fx = kx * std::cos(t) * x, gx = kx * std::sin(t) * x;
      const double fy = ky * std::cos(std::sqrt(3.0) * t) * y, gy = ky * std::sin(std::sqrt(3.0) * t) * y;
      double a, b, g;
      if (kind == StateKind::Psi) {
        a = 2 * c1 * c2 * std::exp(2 * fx + 2 * fy) * std::sin(2 * gx - 2 * gy);
        b = c1 * c1 * std::exp(4 * fx) - c2 * c2 * std::exp(4 * fy);
        g = 2 * c1 * c2 * std::exp(2 * fx + 2 * fy) * std::cos(2 * gx - 2 * gy) + c2 * c2 * std::exp(4 * fy) +
            c1 * c1 * std::exp(4 * fx);
      } else {
        a = 2 * c1 * c2 * std::exp(2 * fx + 2 * fy) * std::sin(2 * gx + 2 * gy);
        b = c1 * c1 * std::exp(4 * fx + 4 * fy) - c2 * c2;
        g = c1 * c1 * std::exp(4 * fx + 4 * fy) + 2 * c1 * c2 * std::exp(2 * fx + 2 * fy) * std::cos(2 * gx + 2 * gy) +
            c2 * c2;
      }
      CHECK(s.a / s.g == doctest::Approx(a / g).epsilon(1e-12));
      CHECK(s.b / s.g == doctest::Approx(b / g).epsilon(1e-12));
    }
  }
}

TEST_CASE("aux terms stay finite far from the origin") {
  const SystemConfig cfg = bell(1.0, std::sqrt(3.0), StateKind::Psi);
  const AuxTerms s = aux_terms({400.0, -350.0, 0.2}, cfg);
  CHECK(std::isfinite(s.a / s.g));
  CHECK(std::isfinite(s.b / s.g));
  CHECK_THROWS_AS(aux_terms({1e308, 1.0, 0.0}, cfg), Error);
}

TEST_CASE("state value examples") {
  const SystemConfig prod = SystemConfig::with_c2(1.0, std::sqrt(3.0), 0.0);
  const PhasePoint p{1.3, -0.4, 2.1};
  const ComplexValue v = state_value(p, prod);
  const ComplexValue e = coherent_value(p.x, p.t, prod.osc_x()) * coherent_value(p.y, p.t, prod.osc_y().shifted_by_pi());
  CHECK(v.re == doctest::Approx(e.re).epsilon(1e-14));
  CHECK(v.im == doctest::Approx(e.im).epsilon(1e-14));

  const SystemConfig b = bell(1.0, 1.0, StateKind::Psi);
  const ComplexValue o = state_value({0.0, 0.0, 0.0}, b);
  CHECK(o.re == doctest::Approx((b.c1() + b.c2()) / std::sqrt(std::numbers::pi) * std::exp(-12.5)).epsilon(1e-13));
  CHECK(std::abs(o.im) < 1e-12 * o.re);
}

TEST_CASE("two-dimensional normalization") {
  for (StateKind kind : {StateKind::Psi, StateKind::Phi}) {
    const SystemConfig cfg = SystemConfig::with_c2(1.0, std::sqrt(3.0), 0.6, kind);
    for (double t : {0.0, 1.3}) {
      const double n = simpson(
          [&](double x) { return simpson([&](double y) { return state_value({x, y, t}, cfg).norm2(); }, -8, 8, 400); },
          -8, 8, 400);
      // <R|L> ~ 1e-11 cross term is below the tolerance
      CHECK(n == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

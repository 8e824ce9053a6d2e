#pragma once

#include <vector>

#include "bohmium/integrate.hpp"

namespace bohmium {

enum class Coordinate { X, Y };

struct Harmonic {
  int m;
  double amplitude;
};

struct SpectrumReport {
  double base_omega = 1;
  std::vector<Harmonic> harmonics;  // m = 1..m_max
  int leading_m = 0;
  double delta_x = 0;  // range of the analysed coordinate
};

/// Amplitudes of sin/cos(m base_omega t) in the mean-removed coordinate by
/// direct projection over the sampled window, which must be uniform and span
/// a whole number of base periods.
/// Throws NonUniformSampling or IncompleteWindow.
SpectrumReport harmonic_spectrum(const Trajectory& traj, Coordinate coord, double base_omega, int m_max = 8);

/// max - min of the coordinate over all samples.
double range_of_motion(const Trajectory& traj, Coordinate coord);

/// Smallest T > 0 with |r(t + T) - r(t)| < tol for every sample t in the
/// first period. Scans integer sample lags, then refines T between samples
/// with cubic Hermite interpolation. Needs a uniform grid covering three
/// periods; throws NoPeriodFound otherwise.
double period_estimate(const Trajectory& traj, double tol = 1e-5);

}  // namespace bohmium

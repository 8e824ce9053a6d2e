#pragma once

#include <cstdint>

#include "bohmium/model.hpp"

namespace bohmium {

/// Von Neumann entropy (nats) of the reduced two-level state,
/// -(c1^2 ln c1^2 + c2^2 ln c2^2) with c1^2 = 1 - c2^2.
double entanglement_entropy(double c2);

/// Linear entropy 1 - tr(rho_A^2) of the reduced state of Psi (or Phi, which
/// has the same reduced state) including the finite packet overlap
/// s = <L|R> = exp(-2 a0^2). Requires c1^2 + c2^2 = 1.
double linear_entropy_psi(double c1, double c2, double a0);

/// Same with distinct amplitudes on the two axes.
double linear_entropy_two_mode(double c1, double c2, double a0_x, double a0_y);

/// Large-a0 limit: 2 c2^2 (1 - c2^2).
double linear_entropy_qubit(double c2);

struct MonteCarloEstimate {
  double estimate{0};
  double stderr_{0};
  std::int64_t samples{0};
};

struct MonteCarloOptions {
  int batches = 100;
  /// 0 picks BOHMIUM_THREADS or the hardware concurrency.
  int threads = 0;
};

/// Monte-Carlo estimate of 1 - purity of the reduced state at time t.
///
/// Proposal: the product over the four coordinates (x, y, x', y') of the
/// equal-weight R/L Gaussian packet mixture, sampled with its 16 components
/// in fixed proportion inside every batch. Weights are self-normalized, so
/// the estimate refers to the normalized state. Batch b draws from its own
/// stream seeded by (seed, b); the result does not depend on the thread count.
MonteCarloEstimate linear_entropy_numeric(const SystemConfig& cfg, double t, std::int64_t n_samples,
                                          std::uint64_t seed, MonteCarloOptions opt = {});

struct EntanglementReport {
  double ee_nats{0};
  double le_analytic{0};
  double le_qubit{0};
  double le_numeric{0};
  double le_numeric_stderr{0};
  /// le_numeric - le_analytic: what the purity carries beyond the
  /// configuration part.
  double le_phase{0};
  std::int64_t samples{0};
};

EntanglementReport entanglement_report(const SystemConfig& cfg, double t, std::int64_t n_samples,
                                       std::uint64_t seed, MonteCarloOptions opt = {});

/// Worker count from BOHMIUM_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

}  // namespace bohmium

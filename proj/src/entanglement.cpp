#include "bohmium/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace bohmium {

namespace {

void check_unit(double c2, const char* what) {
  if (!(c2 >= 0.0 && c2 <= 1.0)) {
    throw Error(ErrorKind::DomainError, "entanglement", std::string(what) + ": c2 must lie in [0, 1]");
  }
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("BOHMIUM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double entanglement_entropy(double c2) {
  check_unit(c2, "entanglement_entropy");
  const double p2 = c2 * c2;
  return -(xlogx(1.0 - p2) + xlogx(p2));
}

double linear_entropy_two_mode(double c1, double c2, double a0_x, double a0_y) {
  if (std::abs(c1 * c1 + c2 * c2 - 1.0) > 1e-12) {
    throw Error(ErrorKind::DomainError, "entanglement", "coefficients are not normalized");
  }
  if (!(a0_x > 0) || !(a0_y > 0)) throw Error(ErrorKind::DomainError, "entanglement", "a0 must be positive");
  // <L|R> on each axis
  const double sx = std::exp(-2.0 * a0_x * a0_x);
  const double sy = std::exp(-2.0 * a0_y * a0_y);
  const double c12 = c1 * c1 * c2 * c2;
  const double tr = c1 * c1 * c1 * c1 + c2 * c2 * c2 * c2 + 2.0 * c12 * (sx * sx + sy * sy) +
                    4.0 * c1 * c2 * (c1 * c1 + c2 * c2) * sx * sy + 2.0 * c12 * sx * sx * sy * sy;
  const double norm = 1.0 + 2.0 * c1 * c2 * sx * sy;
  return 1.0 - tr / (norm * norm);
}

double linear_entropy_psi(double c1, double c2, double a0) { return linear_entropy_two_mode(c1, c2, a0, a0); }

double linear_entropy_qubit(double c2) {
  check_unit(c2, "linear_entropy_qubit");
  const double p2 = c2 * c2;
  return 2.0 * p2 * (1.0 - p2);
}

namespace {

struct BatchSums {
  double num{0};
  double den{0};
};

// Equal-weight mixture of the R and L packet densities along one axis.
struct AxisMixture {
  double mu;     // center of the R packet
  double sd;     // 1/sqrt(2 omega)
  double log_c;  // log of the normal density normalization

  AxisMixture(const OscillatorParams& osc, double t) {
    const double w = osc.omega();
    mu = std::sqrt(2.0 / w) * coherent_amplitude(t, osc).re;
    sd = 1.0 / std::sqrt(2.0 * w);
    log_c = -std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
  }

  double density(double u) const {
    const double zr = (u - mu) / sd;
    const double zl = (u + mu) / sd;
    return 0.5 * (std::exp(log_c - 0.5 * zr * zr) + std::exp(log_c - 0.5 * zl * zl));
  }
};

BatchSums run_batch(const SystemConfig& cfg, double t, std::int64_t n, std::uint64_t seed, int batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const AxisMixture mx(cfg.osc_x(), t);
  const AxisMixture my(cfg.osc_y(), t);

  BatchSums s;
  for (std::int64_t i = 0; i < n; ++i) {
    // Component i mod 16 picks the packet sign on each of x, y, x', y'.
    const int comp = static_cast<int>(i & 15);
    auto draw = [&](const AxisMixture& m, int bit) {
      const double centre = ((comp >> bit) & 1) ? -m.mu : m.mu;
      return centre + m.sd * normal(rng);
    };
    const double x = draw(mx, 0);
    const double y = draw(my, 1);
    const double xp = draw(mx, 2);
    const double yp = draw(my, 3);
    const double q = mx.density(x) * my.density(y) * mx.density(xp) * my.density(yp);
    if (!(q > 0)) continue;

    const ComplexValue p_xy = state_value({x, y, t}, cfg);
    const ComplexValue p_xpy = state_value({xp, y, t}, cfg);
    const ComplexValue p_xpyp = state_value({xp, yp, t}, cfg);
    const ComplexValue p_xyp = state_value({x, yp, t}, cfg);
    const ComplexValue integrand = p_xy * p_xpy.conj() * p_xpyp * p_xyp.conj();
    s.num += integrand.re / q;
    s.den += p_xy.norm2() * p_xpyp.norm2() / q;
  }
  return s;
}

}  // namespace

MonteCarloEstimate linear_entropy_numeric(const SystemConfig& cfg, double t, std::int64_t n_samples,
                                          std::uint64_t seed, MonteCarloOptions opt) {
  if (n_samples < 10000) {
    throw Error(ErrorKind::DomainError, "entanglement", "n_samples must be at least 1e4");
  }
  if (opt.batches < 2) throw Error(ErrorKind::DomainError, "entanglement", "need at least two batches");
  if (!std::isfinite(t)) throw Error(ErrorKind::DomainError, "entanglement", "t must be finite");

  const int nb = opt.batches;
  std::vector<BatchSums> sums(nb);
  std::vector<std::int64_t> counts(nb, n_samples / nb);
  for (std::int64_t i = 0; i < n_samples % nb; ++i) ++counts[i];

  const int workers = std::clamp(opt.threads > 0 ? opt.threads : default_thread_count(), 1, nb);
  auto work = [&](int w) {
    for (int b = w; b < nb; b += workers) sums[b] = run_batch(cfg, t, counts[b], seed, b);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  double num = 0, den = 0;
  for (const auto& s : sums) {
    num += s.num;
    den += s.den;
  }
  if (!(den > 0)) throw Error(ErrorKind::NoConvergence, "entanglement", "vanishing normalization estimate");
  const double purity = num / den;

  // Batch means of the per-batch ratio.
  double mean = 0;
  std::vector<double> r(nb);
  for (int b = 0; b < nb; ++b) {
    r[b] = sums[b].num / sums[b].den;
    mean += r[b];
  }
  mean /= nb;
  double var = 0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= (nb - 1);

  return {1.0 - purity, std::sqrt(var / nb), n_samples};
}

EntanglementReport entanglement_report(const SystemConfig& cfg, double t, std::int64_t n_samples,
                                       std::uint64_t seed, MonteCarloOptions opt) {
  EntanglementReport r;
  const double c2 = std::abs(cfg.c2());
  r.ee_nats = entanglement_entropy(c2);
  r.le_qubit = linear_entropy_qubit(c2);
  r.le_analytic = linear_entropy_two_mode(cfg.c1(), cfg.c2(), cfg.osc_x().a0(), cfg.osc_y().a0());
  const MonteCarloEstimate mc = linear_entropy_numeric(cfg, t, n_samples, seed, opt);
  r.le_numeric = mc.estimate;
  r.le_numeric_stderr = mc.stderr_;
  r.le_phase = r.le_numeric - r.le_analytic;
  r.samples = mc.samples;
  return r;
}

}  // namespace bohmium

#include "bohmium/nodal.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "bohmium/csv.hpp"
#include "bohmium/velocity.hpp"

namespace bohmium {

namespace {

using Quad = boost::multiprecision::float128;

[[noreturn]] void degenerate(const std::string& why) { throw Error(ErrorKind::NodalDegeneracy, "nodal", why); }

template <class Real>
std::array<Real, 2> position_impl(int k, Real t, const SystemConfig& cfg, double margin) {
  using std::abs;
  using std::cos;
  using std::log;
  using std::sin;
  using std::sqrt;
  if (cfg.c1() == 0 || cfg.c2() == 0) degenerate("product state: nodes at infinity");
  const Real th_x = Real(cfg.osc_x().omega()) * t - Real(cfg.osc_x().sigma());
  const Real th_y = Real(cfg.osc_y().omega()) * t - Real(cfg.osc_y().sigma());
  const Real d = sin(th_x - th_y);
  if (abs(d) < margin) degenerate("sin(theta_x - theta_y) vanishes: nodes at infinity");
  if (cfg.kind() == StateKind::Phi && abs(2 * sin(th_x) * d) < margin) {
    degenerate("Phi denominator cos(theta_y) - cos(2 theta_x - theta_y) vanishes");
  }
  const Real kx = sqrt(Real(2) * Real(cfg.osc_x().omega())) * Real(cfg.osc_x().a0());
  const Real ky = sqrt(Real(2) * Real(cfg.osc_y().omega())) * Real(cfg.osc_y().a0());
  const Real l = log(abs(Real(cfg.c1()) / Real(cfg.c2())));
  const Real kpi = Real(k) * boost::math::constants::pi<Real>();
  const Real x = (kpi * cos(th_y) + l * sin(th_y)) / (2 * kx * d);
  const Real y = (kpi * cos(th_x) + l * sin(th_x)) / (2 * ky * d);
  return {x, cfg.kind() == StateKind::Psi ? y : -y};
}

}  // namespace

bool node_parity_ok(int k, const SystemConfig& cfg) {
  const bool odd = (k % 2) != 0;
  return cfg.c1() * cfg.c2() > 0 ? odd : !odd;
}

std::array<double, 2> nodal_position(int k, double t, const SystemConfig& cfg, NodalOptions opt) {
  return position_impl<double>(k, t, cfg, opt.degeneracy_margin);
}

std::array<double, 2> nodal_velocity(int k, double t, const SystemConfig& cfg, NodalOptions opt) {
  // differences in 128-bit so the quotient is not swamped by rounding
  const Quad tq = t;
  auto diff = [&](Quad h) {
    const auto p = position_impl<Quad>(k, tq + h, cfg, opt.degeneracy_margin);
    const auto m = position_impl<Quad>(k, tq - h, cfg, opt.degeneracy_margin);
    return std::array<Quad, 2>{(p[0] - m[0]) / (2 * h), (p[1] - m[1]) / (2 * h)};
  };
  const Quad h = opt.fd_step;
  const auto d1 = diff(h);
  const auto d2 = diff(h / 2);
  return {static_cast<double>((4 * d2[0] - d1[0]) / 3), static_cast<double>((4 * d2[1] - d1[1]) / 3)};
}

std::vector<NodalPoint> nodal_positions(double t, KRange k_range, const SystemConfig& cfg, NodalOptions opt) {
  std::vector<NodalPoint> out;
  for (int k = k_range.lo; k <= k_range.hi; ++k) {
    if (!node_parity_ok(k, cfg)) continue;
    const auto p = nodal_position(k, t, cfg, opt);
    const auto v = nodal_velocity(k, t, cfg, opt);
    out.push_back({k, t, p[0], p[1], v[0], v[1], cfg.kind()});
  }
  return out;
}

double wavefunction_scale(const SystemConfig& cfg) {
  const double w = std::sqrt(std::sqrt(cfg.osc_x().omega() * cfg.osc_y().omega()));
  return std::max(std::abs(cfg.c1()), std::abs(cfg.c2())) * w / std::sqrt(std::numbers::pi);
}

std::vector<XPoint> find_x_points(const NodalPoint& node, const SystemConfig& cfg, XPointOptions opt) {
  const VelocityField<double> field(cfg);
  const double t = node.t;
  std::vector<XPoint> roots;
  int converged = 0, on_node = 0;
  for (int s = 0; s < opt.seeds; ++s) {
    const double phi = 2 * std::numbers::pi * s / opt.seeds;
    double x = node.x + opt.seed_radius * std::cos(phi);
    double y = node.y + opt.seed_radius * std::sin(phi);
    double res = std::numeric_limits<double>::infinity();
    try {
      for (int it = 0; it < opt.max_iterations; ++it) {
        const auto v = field(x, y, t);
        const double fx = v.vx - node.vx, fy = v.vy - node.vy;
        res = std::hypot(fx, fy);
        if (res < opt.tolerance) break;
        double j[4];
        central_jacobian<double>(field, x, y, t, kDefaultJacobianStep, j);
        const double det = j[0] * j[3] - j[1] * j[2];
        if (!(std::abs(det) > 0) || !std::isfinite(det)) break;
        double dx = -(j[3] * fx - j[1] * fy) / det;
        double dy = -(-j[2] * fx + j[0] * fy) / det;
        const double len = std::hypot(dx, dy);
        if (len > opt.seed_radius) dx *= opt.seed_radius / len, dy *= opt.seed_radius / len;
        x += dx;
        y += dy;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NodeProximity && e.kind() != ErrorKind::OverflowGuard) throw;
      res = std::numeric_limits<double>::infinity();
    }
    const bool near_node = std::hypot(x - node.x, y - node.y) <= opt.seed_radius / 10;
    if (near_node) ++on_node;
    if (!(res < opt.tolerance)) continue;
    ++converged;
    if (near_node) continue;
    bool dup = false;
    for (auto& r : roots) {
      if (std::hypot(r.x - x, r.y - y) < opt.dedupe) {
        dup = true;
        if (res < r.residual) r.x = x, r.y = y, r.residual = res;
      }
    }
    if (!dup) roots.push_back({x, y, res, node});
  }
  if (roots.empty()) {
    if (on_node == opt.seeds) throw Error(ErrorKind::OnlyNodeRoot, "nodal", "every seed collapsed onto the node");
    if (converged == 0) throw Error(ErrorKind::NoConvergence, "nodal", "no X-point seed converged");
    throw Error(ErrorKind::OnlyNodeRoot, "nodal", "only the node itself was found");
  }
  std::sort(roots.begin(), roots.end(), [](const XPoint& a, const XPoint& b) { return a.residual < b.residual; });
  return roots;
}

XPoint find_x_point(const NodalPoint& node, const SystemConfig& cfg, XPointOptions opt) {
  return find_x_points(node, cfg, opt).front();
}

std::vector<Encounter> npxpc_encounters(const Trajectory& traj, const SystemConfig& cfg, KRange k_range,
                                        EncounterOptions opt) {
  std::vector<Encounter> out;
  if (cfg.c1() == 0 || cfg.c2() == 0) return out;
  for (const auto& s : traj.samples) {
    std::vector<NodalPoint> nodes;
    try {
      nodes = nodal_positions(s.t, k_range, cfg, opt.nodal);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NodalDegeneracy) throw;
      continue;
    }
    for (const auto& n : nodes) {
      double d = std::hypot(s.x - n.x, s.y - n.y);
      if (!std::isfinite(d) || d >= opt.radius + opt.x_point_reach) continue;
      if (d >= opt.radius) {
        try {
          for (const auto& xp : find_x_points(n, cfg, opt.xpoint)) {
            if (std::hypot(xp.x - n.x, xp.y - n.y) > opt.x_point_reach) continue;
            d = std::min(d, std::hypot(s.x - xp.x, s.y - xp.y));
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::OnlyNodeRoot) throw;
        }
      }
      if (d < opt.radius) out.push_back({s.t, n.k, d});
    }
  }
  return out;
}

void write_nodal_csv(std::ostream& out, const std::vector<double>& times, KRange k_range, const SystemConfig& cfg,
                     bool with_x_points, NodalOptions opt, XPointOptions xopt) {
  out << "t,k,x_nod,y_nod,vx_nod,vy_nod,x_X,y_X,residual\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : times) {
    std::vector<NodalPoint> nodes;
    try {
      nodes = nodal_positions(t, k_range, cfg, opt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NodalDegeneracy) throw;
      continue;
    }
    for (const auto& n : nodes) {
      XPoint xp{nan, nan, nan, n};
      if (with_x_points) {
        try {
          xp = find_x_point(n, cfg, xopt);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::OnlyNodeRoot) throw;
        }
      }
      out << fmt_real(t) << ',' << n.k << ',' << fmt_real(n.x) << ',' << fmt_real(n.y) << ',' << fmt_real(n.vx)
          << ',' << fmt_real(n.vy) << ',' << fmt_real(xp.x) << ',' << fmt_real(xp.y) << ',' << fmt_real(xp.residual)
          << '\n';
    }
  }
}

}  // namespace bohmium

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "bohmium/integrate.hpp"

namespace bohmium {

struct KRange {
  int lo = -9;
  int hi = 9;
};

struct NodalOptions {
  /// |sin(theta_x - theta_y)| (and the Phi secondary denominator) below this
  /// means the nodes sit at infinity.
  double degeneracy_margin = 1e-8;
  double fd_step = 1e-7;
};

struct NodalPoint {
  int k = 0;
  double t = 0;
  double x = 0, y = 0;
  double vx = 0, vy = 0;
  StateKind kind = StateKind::Psi;
};

struct XPoint {
  double x = 0, y = 0;
  /// |v(x, y) - node velocity|
  double residual = 0;
  NodalPoint parent;
};

/// True when k has the parity that yields nodes: odd for c1 c2 > 0, even for c1 c2 < 0.
bool node_parity_ok(int k, const SystemConfig& cfg);

/// Closed-form node position for one k (no parity check).
/// Throws NodalDegeneracy near the denominator zeros and for a product state.
std::array<double, 2> nodal_position(int k, double t, const SystemConfig& cfg, NodalOptions opt = {});

/// Central difference of nodal_position with one Richardson step.
std::array<double, 2> nodal_velocity(int k, double t, const SystemConfig& cfg, NodalOptions opt = {});

/// All nodes with admissible k in the range, velocities filled.
std::vector<NodalPoint> nodal_positions(double t, KRange k_range, const SystemConfig& cfg, NodalOptions opt = {});

/// Peak modulus of the dominant product term, the reference for node residuals.
double wavefunction_scale(const SystemConfig& cfg);

struct XPointOptions {
  double seed_radius = 0.3;
  int seeds = 8;
  int max_iterations = 50;
  double tolerance = 1e-10;
  double dedupe = 1e-6;
};

/// Stagnation points of the flow seen from the moving node: Newton on
/// v(x, y, t) - v_node from a ring of seeds. Distinct converged roots farther
/// than seed_radius / 10 from the node, best residual first.
/// Throws NoConvergence when no seed converges and OnlyNodeRoot when every
/// converged seed ends on the node.
std::vector<XPoint> find_x_points(const NodalPoint& node, const SystemConfig& cfg, XPointOptions opt = {});
XPoint find_x_point(const NodalPoint& node, const SystemConfig& cfg, XPointOptions opt = {});

struct Encounter {
  double t;
  int k;
  double distance;
};

struct EncounterOptions {
  double radius = 0.5;
  /// X-points are only sought for nodes this close to the particle (plus radius).
  double x_point_reach = 2.0;
  NodalOptions nodal;
  XPointOptions xpoint;
};

/// Samples closer than `radius` to a node or one of its X-points, one entry
/// per (sample, k). Samples at node-degenerate times are skipped.
std::vector<Encounter> npxpc_encounters(const Trajectory& traj, const SystemConfig& cfg, KRange k_range = {},
                                        EncounterOptions opt = {});

/// CSV rows t,k,x_nod,y_nod,vx_nod,vy_nod,x_X,y_X,residual for every node at
/// the given times; nan where no X-point was found. Degenerate times are skipped.
void write_nodal_csv(std::ostream& out, const std::vector<double>& times, KRange k_range, const SystemConfig& cfg,
                     bool with_x_points = true, NodalOptions opt = {}, XPointOptions xopt = {});

}  // namespace bohmium

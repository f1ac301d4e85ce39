// Initial-value integration of the radial equation from the core outwards,
// and a bisection on the launch slope that matches u(R) = 0.
#pragma once

#include "vortex/energy.hpp"
#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

enum class ShotStatus {
  Reached,   // integrated to R without sign change
  Crossed,   // u changed sign before R (undershoot)
  BlewUp,    // |u| exceeded the blow-up threshold (overshoot)
};

struct ShootOptions {
  double rtol = 1e-11;
  double atol = 1e-14;
  double start_fraction = 1e-6;   // r_start = start_fraction * R
  double blowup = 1e3;
  double c_start = 1e-4;          // first launch slope of the bracket scan
  int max_doublings = 60;
  int max_bisections = 200;
};

struct Shot {
  Profile<double> profile;  // nodes past a blow-up carry the last finite value
  ShotStatus status = ShotStatus::Reached;
  double crossing_radius = 0.0;   // first sign change (Crossed)
  double blowup_radius = 0.0;     // BlewUp
  double end_value = 0.0;         // u at the last integrated radius
  long steps = 0;

  bool undershoot() const { return status == ShotStatus::Crossed; }
};

/// Integrates u'' = -u'/r + (n^2/r^2 + 2 omega) u + 2 psi(u) u from
/// r_start with u = c r^|n|, u' = c |n| r^(|n|-1), Dormand-Prince 5(4) with
/// steps clipped to the grid nodes.
Shot shoot(const VortexProblem<double>& problem, double omega, double c, const GridPtr<double>& grid,
           const ShootOptions& opt = {});

struct ShootMatch {
  Profile<double> profile;
  double c_under = 0.0;
  double c_over = 0.0;
  double theta = 0.0;   // u = u_under + theta (u_over - u_under)
  int doublings = 0;
  int bisections = 0;
  double end_ratio = 0.0;   // |u(R)| / max u
};

/// Scans c upward by doubling for the first undershoot -> overshoot change,
/// bisects, and blends the two bracketing trajectories linearly so u(R) = 0.
ShootMatch shoot_match(const VortexProblem<double>& problem, double omega, const GridPtr<double>& grid,
                       const ShootOptions& opt = {});

}  // namespace vortex

// Descent solvers for the discrete action functionals.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vortex/energy.hpp"
#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

/// u0(r) = (b/a) r on [0,a], (b/a)(2a - r) on (a, 2a], zero beyond.
struct TentInit {
  double a = 1.0;
  double b = 1.0;
};

/// k r on [0,1), k on [1, radius), k exp(lambda (radius - r)) beyond.
/// Non-positive fields select the defaults: k = argmin Q, lambda = sqrt(2 omega),
/// radius = 0.6 R.
struct TrialInit {
  double k = 0.0;
  double lambda = 0.0;
  double radius = 0.0;
};

/// i.i.d. uniform [0, amplitude] nodal values, one (1,2,1)/4 smoothing pass.
struct RandomInit {
  std::uint64_t seed = 0;
  double amplitude = 1.0;
};

struct GivenInit {
  Vector<double> values;
};

/// monostate picks the regime default: trial for zero-zero, v = 0 for the
/// plateau, tent(1,1) for the constrained problem.
using Init = std::variant<std::monostate, TentInit, TrialInit, RandomInit, GivenInit>;

struct Armijo {
  double c = 1e-4;
  double ratio = 0.5;
  int max_backtracks = 60;
};

struct SolverConfig {
  Eigen::Index cells = 4000;
  Grading<double> grading{};
  int max_iters = 5000;
  /// stop when sup_i |grad_i| / max|u| falls below this
  double grad_tol = 1e-8;
  Armijo armijo{};
  Init init{};
  bool nonneg_projection = true;
  /// Descend along A^{-1} grad with A the quadratic part of the action (a
  /// Sobolev gradient). false gives the plain nodal gradient.
  bool preconditioned = true;
  /// re-solve with doubled R while the a-posteriori truncation check fails
  int truncation_doublings = 0;
  /// called once per accepted step with (iteration, energy)
  std::function<void(int, double)> on_step;

  void validate() const;
};

struct DecayFit {
  double rate = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double rsquared = 0.0;
  double predicted_rate = 0.0;
  int points = 0;
};

struct SolveReport {
  /// amplitude u (for the plateau problem u = v + phi)
  Profile<double> profile;
  double energy = 0.0;
  /// the input omega, or the extracted multiplier for the constrained problem
  double omega = 0.0;
  double grad_norm = 0.0;
  double el_residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<DecayFit> decay;
  std::optional<double> power;
  /// energy after every accepted step, starting with the initial value
  std::vector<double> energy_history;
  bool truncation_ok = false;
  std::string message;
};

SolveReport minimize_unconstrained(const VortexProblem<double>& problem, const SolverConfig& config);
SolveReport minimize_constrained(const VortexProblem<double>& problem, const SolverConfig& config);

/// Dispatches on the boundary regime.
SolveReport solve(const VortexProblem<double>& problem, const SolverConfig& config);

/// Initial amplitude for the problem on the given grid (not yet rescaled to P0).
Vector<double> initial_values(const VortexProblem<double>& problem, const Init& init, const RadialGrid<double>& grid);

}  // namespace vortex

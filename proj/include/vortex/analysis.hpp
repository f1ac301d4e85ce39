// A-posteriori checks on computed profiles and the closed-form bounds and
// trial-function certificates of the existence theory.
#pragma once

#include <vector>

#include "vortex/energy.hpp"
#include "vortex/solver.hpp"

namespace vortex {

/// Least-squares fit of ln u against r on the tail window
/// 100 eps max u < u < 0.1 max u beyond the maximum.
DecayFit fit_decay(const Profile<double>& u, double omega);

struct OmegaBound {
  double lower = 0.0;
  double upper = 0.0;  // exclusive
  double saturation_term = 0.0;  // (gamma-1)^(gamma-1) / (s gamma^gamma)
  double s = 0.0, gamma = 0.0, P0 = 0.0;
  int n = 0;
};

OmegaBound omega_bound(double s, double gamma, int n, double P0);

/// lower <= omega < 0
bool check_omega_in_bound(double omega, const OmegaBound& bound);
bool check_omega_in_bound(const SolveReport& report, const OmegaBound& bound);

/// max over u > 0 of u^2/(1+su^2)^gamma by a grid search (no closed form).
double saturation_max_by_search(double s, double gamma, int samples = 200001);

/// argmin over s > 0 of Q(s): log-spaced scan then golden-section refinement.
double argmin_Q(double omega, double alpha, double beta);

/// k r on [0,1), k on [1, radius), k exp(lambda (radius - r)) beyond; last node pinned to 0.
Profile<double> trial_v(double k, double lambda, double radius, const GridPtr<double>& grid);

struct NegativeActionCertificate {
  bool success = false;
  double k = 0.0, lambda = 0.0;
  double radius = 0.0;     // plateau radius of the certifying trial
  double action = 0.0;     // I(v)
  double leading = 0.0;    // 1/2 Q(k) radius^2
  int doublings = 0;
  std::vector<double> radii, actions;
};

/// Doubles the plateau radius (from 2, at most 20 times) until I(v) < 0.
NegativeActionCertificate certify_negative_action(const VortexProblem<double>& problem, double k = 0.0,
                                                  double lambda = 0.0);

/// I(v)/radius^2 for each plateau radius, with the grid extending a fixed
/// tail past the plateau and spacing at most h.
std::vector<double> action_ratio_sequence(const VortexProblem<double>& problem, double k, double lambda,
                                          const std::vector<double>& radii, double h = 0.05);

struct SegmentIntegral {
  double quadrature = 0.0;   // int_1^R (v'^2 + n^2 v^2 / r^2) r dr for the trial
  double stated = 0.0;       // (k^2/2)(2R - 1) + n^2 k^2 ln R
  double log_term = 0.0;     // n^2 k^2 ln R
};

SegmentIntegral plateau_segment_integral(double k, int n, double radius, Eigen::Index cells);

struct TentCertificate {
  double a = 0.0, b = 0.0;
  double power = 0.0;          // quadrature
  double power_exact = 0.0;    // 4 pi a^2 b^2 / 3
  double action = 0.0;         // J(u0) by quadrature
  double action_bound = 0.0;   // b^2 (1 + n^2(2 ln2 - 1)) + 2a^2/(s^2(g-1)(g-2))
  double optimized_bound = 0.0;          // closed-form minimum over b at fixed power
  double optimized_bound_numeric = 0.0;  // golden-section minimum over b
  double b_opt = 0.0;
  bool bound_holds = false;
};

TentCertificate tent_certificate(double s, double gamma, int n, double a, double b, Eigen::Index cells = 4000);

struct PlateauCertificate {
  bool passed = false;
  bool core_zero = false;
  double max_tail_deviation = 0.0;  // sup |u - k| / k over the outer quarter
  double max_tail_g = 0.0;          // sup |g(u)| over the outer quarter
  double tolerance = 1e-4;
};

PlateauCertificate plateau_certificate(const VortexProblem<double>& problem, const SolveReport& report);

/// sup_{r >= 2} |eta r^2 + n^2 k|
double eta_tail_defect(const HomogenizationData<double>& hom, const RadialGrid<double>& grid);

/// Largest c with G(s) - G(k) >= c (s-k)^2 on the sampled interval.
double coercivity_constant(double omega, double alpha, double beta, double k, double lo, double hi, int samples);

}  // namespace vortex

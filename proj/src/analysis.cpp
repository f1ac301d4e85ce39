#include "vortex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

// Golden-section minimisation of a unimodal f on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, double tol = 1e-14) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > tol * (std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double tail_length(double lambda) { return 30.0 / lambda; }

// Trial on a grid reaching `tail_length` past the plateau, spacing <= h.
double trial_action(const VortexProblem<double>& p, double k, double lambda, double radius, double h) {
  const double R = radius + tail_length(lambda);
  const auto cells = static_cast<Eigen::Index>(std::min(4.0e6, std::max(200.0, std::ceil(R / h))));
  const auto grid = make_grid(R, cells);
  return action_log(p, trial_v(k, lambda, radius, grid));
}

void require_log_zero(const VortexProblem<double>& p, const char* who) {
  if (!p.is_logarithmic() || p.kind() != RegimeKind::ZeroZero || !p.omega)
    throw DomainError(std::string(who) + ": logarithmic zero-zero problem required");
}

}  // namespace

DecayFit fit_decay(const Profile<double>& u, double omega) {
  const auto& grid = *u.grid;
  const Eigen::Index n = grid.size();
  Eigen::Index imax = 0;
  const double m = u.values.maxCoeff(&imax);
  if (!(m > 0.0)) throw DomainError("fit_decay: profile has no positive maximum");
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * m;

  Eigen::Index first = imax;
  while (first < n && !(u[first] < 0.1 * m)) ++first;
  Eigen::Index last = first;
  while (last < n && u[last] > floor && u[last] < 0.1 * m) ++last;
  const Eigen::Index count = last - first;
  if (count < 3) throw DomainError("fit_decay: tail window is empty; increase R");

  double sr = 0, sy = 0, srr = 0, sry = 0;
  for (Eigen::Index i = first; i < last; ++i) {
    const double r = grid.node(i), y = std::log(u[i]);
    sr += r;
    sy += y;
    srr += r * r;
    sry += r * y;
  }
  const double cnt = double(count);
  const double slope = (cnt * sry - sr * sy) / (cnt * srr - sr * sr);
  const double icpt = (sy - slope * sr) / cnt;
  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / cnt;
  for (Eigen::Index i = first; i < last; ++i) {
    const double y = std::log(u[i]);
    const double e = y - (icpt + slope * grid.node(i));
    ss_res += e * e;
    ss_tot += (y - ymean) * (y - ymean);
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.r_lo = grid.node(first);
  fit.r_hi = grid.node(last - 1);
  fit.rsquared = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
  fit.predicted_rate = omega > 0 ? std::sqrt(2.0 * omega) : 0.0;
  fit.points = int(count);
  return fit;
}

OmegaBound omega_bound(double s, double gamma, int n, double P0) {
  if (!(s > 0)) throw DomainError("s must satisfy s > 0");
  if (!(gamma > 2)) throw DomainError("γ must satisfy γ > 2");
  if (n == 0) throw DomainError("winding number n must be nonzero");
  if (!(P0 > 0)) throw DomainError("P0 must satisfy P0 > 0");
  const double sat = std::pow(gamma - 1.0, gamma - 1.0) / (s * std::pow(gamma, gamma));
  const double A = 1.0 + double(n) * n * (2.0 * std::log(2.0) - 1.0);
  const double c = s * s * (gamma - 1.0) * (gamma - 2.0);
  OmegaBound b;
  b.saturation_term = sat;
  b.lower = -sat - std::sqrt(24.0 * kPi * A / (c * P0));
  b.upper = 0.0;
  b.s = s;
  b.gamma = gamma;
  b.n = n;
  b.P0 = P0;
  return b;
}

bool check_omega_in_bound(double omega, const OmegaBound& bound) { return bound.lower <= omega && omega < bound.upper; }

bool check_omega_in_bound(const SolveReport& report, const OmegaBound& bound) {
  return check_omega_in_bound(report.omega, bound);
}

double saturation_max_by_search(double s, double gamma, int samples) {
  const double top = 10.0 / std::sqrt(s * (gamma - 1.0));
  double best = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double u = top * double(i) / double(samples - 1);
    const double u2 = u * u;
    best = std::max(best, u2 / std::pow(1.0 + s * u2, gamma));
  }
  return best;
}

double argmin_Q(double omega, double alpha, double beta) {
  const double scale = std::sqrt(beta);
  const int m = 2000;
  const double l0 = std::log(1e-3 * scale), l1 = std::log(1e2 * scale);
  int best = 0;
  double qbest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double q = Q_aux(std::exp(l0 + (l1 - l0) * i / (m - 1)), omega, alpha, beta);
    if (q < qbest) {
      qbest = q;
      best = i;
    }
  }
  if (!(qbest < 0.0))
    throw DomainError("no k with Q(k) < 0: ω must satisfy ω < ½e^(−1/2)αβ = " +
                      detail::fmt5(zero_zero_threshold(alpha, beta)));
  const double lo = std::exp(l0 + (l1 - l0) * std::max(best - 1, 0) / (m - 1));
  const double hi = std::exp(l0 + (l1 - l0) * std::min(best + 1, m - 1) / (m - 1));
  return golden_min([&](double s) { return Q_aux(s, omega, alpha, beta); }, lo, hi);
}

Profile<double> trial_v(double k, double lambda, double radius, const GridPtr<double>& grid) {
  if (!(k > 0) || !(lambda > 0)) throw DomainError("trial_v: k > 0 and λ > 0 required");
  if (!(radius >= 1.0)) throw DomainError("trial_v: plateau radius must be at least 1");
  Vector<double> v(grid->size());
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    const double r = grid->node(i);
    v[i] = r < 1.0 ? k * r : (r < radius ? k : k * std::exp(lambda * (radius - r)));
  }
  v[grid->size() - 1] = 0.0;
  return {grid, std::move(v)};
}

NegativeActionCertificate certify_negative_action(const VortexProblem<double>& p, double k, double lambda) {
  validate(p);
  require_log_zero(p, "certify_negative_action");
  const auto& lg = p.logarithmic();
  const double omega = *p.omega;
  NegativeActionCertificate cert;
  cert.k = k > 0 ? k : argmin_Q(omega, lg.alpha, lg.beta);
  cert.lambda = lambda > 0 ? lambda : std::sqrt(2.0 * omega);
  if (!(Q_aux(cert.k, omega, lg.alpha, lg.beta) < 0.0))
    throw DomainError("certify_negative_action: Q(k) ≥ 0 for the chosen k");
  double radius = 2.0;
  for (int d = 0; d <= 20; ++d, radius *= 2.0) {
    const double I = trial_action(p, cert.k, cert.lambda, radius, 0.05);
    cert.radii.push_back(radius);
    cert.actions.push_back(I);
    cert.radius = radius;
    cert.action = I;
    cert.doublings = d;
    cert.leading = 0.5 * Q_aux(cert.k, omega, lg.alpha, lg.beta) * radius * radius;
    if (I < 0.0) {
      cert.success = true;
      break;
    }
  }
  return cert;
}

std::vector<double> action_ratio_sequence(const VortexProblem<double>& p, double k, double lambda,
                                          const std::vector<double>& radii, double h) {
  require_log_zero(p, "action_ratio_sequence");
  std::vector<double> out;
  out.reserve(radii.size());
  for (double radius : radii) out.push_back(trial_action(p, k, lambda, radius, h) / (radius * radius));
  return out;
}

SegmentIntegral plateau_segment_integral(double k, int n, double radius, Eigen::Index cells) {
  if (!(radius > 1.0)) throw DomainError("plateau_segment_integral: R > 1 required");
  if (cells < 16) throw DomainError("plateau_segment_integral: at least 16 cells required");
  // trial restricted to [1, R]: v = k there (the exponential tail starts at R)
  auto v = [k](double) { return k; };
  const double h = (radius - 1.0) / double(cells);
  const double n2 = double(n) * n;
  long double acc = 0;
  for (Eigen::Index c = 0; c < cells; ++c) {
    const double r0 = 1.0 + h * double(c), r1 = (c + 1 == cells) ? radius : r0 + h;
    const double dv = v(r1) - v(r0);
    acc += (long double)(dv * dv * 0.5 * (r0 + r1) / (r1 - r0));
    const double f0 = n2 * v(r0) * v(r0) / r0, f1 = n2 * v(r1) * v(r1) / r1;
    acc += (long double)(0.5 * (r1 - r0) * (f0 + f1));
  }
  SegmentIntegral s;
  s.quadrature = double(acc);
  s.log_term = n2 * k * k * std::log(radius);
  s.stated = 0.5 * k * k * (2.0 * radius - 1.0) + s.log_term;
  return s;
}

TentCertificate tent_certificate(double s, double gamma, int n, double a, double b, Eigen::Index cells) {
  if (!(a > 0) || !(b > 0)) throw DomainError("tent_certificate: a > 0 and b > 0 required");
  TentCertificate t;
  t.a = a;
  t.b = b;
  t.power_exact = 4.0 * kPi / 3.0 * a * a * b * b;
  const auto grid = make_grid(2.0 * a, cells);
  const auto problem = sat_constrained_problem(s, gamma, n, t.power_exact, 2.0 * a);
  Vector<double> u(grid->size());
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    const double r = grid->node(i);
    u[i] = r <= a ? b / a * r : std::max(0.0, b / a * (2.0 * a - r));
  }
  u[grid->size() - 1] = 0.0;
  const Profile<double> u0(grid, u);
  t.power = beam_power(u0);
  t.action = action_sat(problem, u0);
  const double A = 1.0 + double(n) * n * (2.0 * std::log(2.0) - 1.0);
  const double c = s * s * (gamma - 1.0) * (gamma - 2.0);
  t.action_bound = b * b * A + 2.0 * a * a / c;
  t.optimized_bound = std::sqrt(6.0 * A * t.power_exact / (kPi * c));
  auto rhs = [&](double bb) { return bb * bb * A + 3.0 * t.power_exact / (2.0 * kPi * bb * bb * c); };
  const double lb = golden_min([&](double x) { return rhs(std::exp(x)); }, std::log(1e-3), std::log(1e3));
  t.b_opt = std::exp(lb);
  t.optimized_bound_numeric = rhs(t.b_opt);
  t.bound_holds = t.action <= t.action_bound;
  return t;
}

PlateauCertificate plateau_certificate(const VortexProblem<double>& p, const SolveReport& report) {
  if (!p.is_logarithmic() || p.kind() != RegimeKind::ZeroPlateau)
    throw DomainError("plateau_certificate: logarithmic zero-plateau problem required");
  const auto& lg = p.logarithmic();
  const double k = std::get<ZeroPlateau<double>>(p.regime).k;
  const auto& u = report.profile;
  const auto& grid = *u.grid;
  PlateauCertificate c;
  c.core_zero = u[0] == 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid.node(i) < 0.75 * grid.radius()) continue;
    c.max_tail_deviation = std::max(c.max_tail_deviation, std::abs(u[i] - k) / k);
    c.max_tail_g = std::max(c.max_tail_g, std::abs(g_piecewise(u[i], *p.omega, lg.alpha, lg.beta)));
  }
  c.passed = c.core_zero && c.max_tail_deviation <= c.tolerance;
  return c;
}

double eta_tail_defect(const HomogenizationData<double>& hom, const RadialGrid<double>& grid) {
  double sup = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    if (r >= 2.0) sup = std::max(sup, std::abs(hom.eta[i] * r * r + double(hom.n) * hom.n * hom.k));
  }
  return sup;
}

double coercivity_constant(double omega, double alpha, double beta, double k, double lo, double hi, int samples) {
  const double Gk = G_primitive(k, omega, alpha, beta);
  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double s = lo + (hi - lo) * double(i) / double(samples - 1);
    const double d = s - k;
    if (std::abs(d) < 1e-4) continue;
    c = std::min(c, (G_primitive(s, omega, alpha, beta) - Gk) / (d * d));
  }
  return c;
}

}  // namespace vortex

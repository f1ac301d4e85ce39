#include "vortex/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vortex {

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct Rhs {
  const VortexProblem<double>& p;
  double omega;
  State operator()(double r, const State& y) const {
    const double u = y[0], du = y[1];
    const double n2 = double(p.n) * p.n;
    return {du, -du / r + (n2 / (r * r) + 2.0 * omega) * u + 2.0 * psi(p.nonlinearity, u) * u};
  }
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [a, k] : terms)
    for (int j = 0; j < 2; ++j) out[j] += h * a * (*k)[j];
  return out;
}

}  // namespace

Shot shoot(const VortexProblem<double>& p, double omega, double c, const GridPtr<double>& grid,
           const ShootOptions& opt) {
  if (!p.is_logarithmic() && !(omega < 0.0))
    throw DomainError("shoot: saturable model needs a fixed ω < 0 (got ω = " + detail::fmtg(omega) + ")");
  if (p.is_logarithmic() && p.kind() != RegimeKind::ZeroZero)
    throw DomainError("shoot: logarithmic model is shot only for the zero-zero regime");
  if (!std::isfinite(c)) throw DomainError("shoot: launch slope must be finite");

  const auto& g = *grid;
  const Eigen::Index N = g.size();
  Vector<double> u = Vector<double>::Zero(N);
  Shot shot;
  if (c == 0.0) {
    shot.profile = Profile<double>(grid, u);
    return shot;
  }

  const int an = std::abs(p.n);
  const double R = g.radius();
  const double r0 = opt.start_fraction * R;
  const Rhs f{p, omega};

  double r = r0;
  State y{c * std::pow(r0, an), c * an * std::pow(r0, an - 1)};
  double h = 1e-3 * r0;
  bool crossed = false;
  bool blown = false;
  const double sign0 = c > 0 ? 1.0 : -1.0;

  for (Eigen::Index i = 1; i < N; ++i) {
    const double target = g.node(i);
    if (target <= r0) {
      u[i] = c * std::pow(target, an);
      continue;
    }
    while (r < target && !blown) {
      h = std::min(h, target - r);
      if (h < 1e-14 * std::max(r, 1.0)) throw SolveError("shoot: step size underflow at r = " + detail::fmtg(r));
      const State k1 = f(r, y);
      const State k2 = f(r + c2 * h, axpy(y, h, {{a21, &k1}}));
      const State k3 = f(r + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const State k4 = f(r + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State k5 = f(r + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State k6 = f(r + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State yn = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const State k7 = f(r + h, yn);
      double err = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[j]), std::abs(yn[j]));
        err = std::max(err, std::abs(e) / sc);
      }
      if (!std::isfinite(err)) {
        h *= 0.1;
        continue;
      }
      if (err <= 1.0) {
        if (!crossed && sign0 * yn[0] < 0.0) {
          crossed = true;
          shot.crossing_radius = r + h * y[0] / (y[0] - yn[0]);
        }
        r += h;
        y = yn;
        ++shot.steps;
        if (std::abs(y[0]) > opt.blowup) {
          blown = true;
          shot.blowup_radius = r;
        }
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= factor;
    }
    u[i] = y[0];
  }
  shot.end_value = y[0];
  shot.status = crossed ? ShotStatus::Crossed : (blown ? ShotStatus::BlewUp : ShotStatus::Reached);
  shot.profile = Profile<double>(grid, u);
  return shot;
}

ShootMatch shoot_match(const VortexProblem<double>& p, double omega, const GridPtr<double>& grid,
                       const ShootOptions& opt) {
  ShootMatch m;
  double c = opt.c_start;
  Shot prev = shoot(p, omega, c, grid, opt);
  bool bracketed = false;
  Shot under, over;
  for (int d = 1; d <= opt.max_doublings; ++d) {
    c *= 2.0;
    Shot cur = shoot(p, omega, c, grid, opt);
    if (prev.undershoot() && !cur.undershoot()) {
      m.c_under = c / 2.0;
      m.c_over = c;
      under = std::move(prev);
      over = std::move(cur);
      m.doublings = d;
      bracketed = true;
      break;
    }
    prev = std::move(cur);
  }
  if (!bracketed) throw SolveError("shoot_match: no bracket found within " + std::to_string(opt.max_doublings) + " doublings");

  for (int it = 0; it < opt.max_bisections; ++it) {
    const double mid = 0.5 * (m.c_under + m.c_over);
    if (mid <= m.c_under || mid >= m.c_over) break;
    Shot s = shoot(p, omega, mid, grid, opt);
    if (s.undershoot()) {
      m.c_under = mid;
      under = std::move(s);
    } else {
      m.c_over = mid;
      over = std::move(s);
    }
    m.bisections = it + 1;
  }
  if (over.status == ShotStatus::BlewUp) throw SolveError("shoot_match: bracketing trajectory diverged before R");

  const Vector<double>& ul = under.profile.values;
  const Vector<double>& uh = over.profile.values;
  const Eigen::Index last = ul.size() - 1;
  const double denom = ul[last] - uh[last];
  m.theta = denom != 0.0 ? ul[last] / denom : 0.0;
  Vector<double> u = ul + m.theta * (uh - ul);
  const double peak = u.cwiseAbs().maxCoeff();
  m.end_ratio = std::abs(u[last]) / peak;
  if (!(m.end_ratio < 1e-8))
    throw SolveError("shoot_match: |u(R)| / max u = " + detail::fmtg(m.end_ratio) + " after bisection");
  u[0] = 0.0;
  m.profile = Profile<double>(grid, std::move(u));
  return m;
}

}  // namespace vortex

// Discrete action functionals on a radial grid, their nodal derivatives, the
// Euler-Lagrange residual and the plateau homogenization data.
//
// Discretization: u is piecewise linear between nodes. The kinetic part
// 1/2 int u'^2 r dr is then exact cell by cell, (du)^2 r_mid / h. Every other
// term is a nodal quadrature sum_i w_i f(u_i, r_i) with the grid weights
// (w_0 = 0, so 1/r^2 is never evaluated at the origin). Gradients are exact
// derivatives of these sums. Sums are carried in long double.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

namespace detail {

template <class Scalar>
using accum_t = std::conditional_t<std::is_floating_point_v<Scalar>, long double, Scalar>;

}  // namespace detail

/// Nodal amplitudes on a grid. values[0] = 0 always.
template <class Scalar>
struct Profile {
  GridPtr<Scalar> grid;
  Vector<Scalar> values;

  Profile() = default;
  Profile(GridPtr<Scalar> g, Vector<Scalar> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw DomainError("Profile: null grid");
    if (values.size() != grid->size()) throw DomainError("Profile: value count does not match grid");
    if (!values.allFinite()) throw DomainError("Profile: values must be finite");
    if (values[0] != Scalar(0)) throw DomainError("Profile: u(0) = 0 required at the vortex core");
  }

  Eigen::Index size() const { return values.size(); }
  Scalar operator[](Eigen::Index i) const { return values[i]; }
  Scalar r(Eigen::Index i) const { return grid->node(i); }
  Scalar back() const { return values[values.size() - 1]; }
  Scalar max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

template <class Scalar>
Profile<Scalar> zero_profile(const GridPtr<Scalar>& grid) {
  return {grid, Vector<Scalar>::Zero(grid->size())};
}

// ---------------------------------------------------------------------------
// pointwise functions

/// P(s) = s^4 ln(s^2/beta) - s^4/2, extended by 0 at s = 0.
template <class Scalar>
Scalar P_aux(Scalar s, Scalar beta) {
  using std::log;
  using std::max;
  const Scalar s2 = s * s;
  if (s2 == Scalar(0)) return Scalar(0);
  return s2 * s2 * (log(max(s2, detail::log_floor<Scalar>()) / beta) - Scalar(0.5));
}

/// Q(s) = s^2 (2 omega + alpha s^2 ln(s^2/beta) - alpha s^2 / 2).
template <class Scalar>
Scalar Q_aux(Scalar s, Scalar omega, Scalar alpha, Scalar beta) {
  return Scalar(2) * omega * s * s + alpha * P_aux(s, beta);
}

/// g(t) = 2 omega t + 2 alpha t^3 ln(t^2/beta) for t >= 0, 2 omega t for t < 0.
template <class Scalar>
Scalar g_piecewise(Scalar t, Scalar omega, Scalar alpha, Scalar beta) {
  using std::log;
  using std::max;
  if (t <= Scalar(0)) return Scalar(2) * omega * t;
  const Scalar t2 = t * t;
  return Scalar(2) * omega * t + Scalar(2) * alpha * t * t2 * log(max(t2, detail::log_floor<Scalar>()) / beta);
}

/// G with G' = g and G(0) = 0.
template <class Scalar>
Scalar G_primitive(Scalar t, Scalar omega, Scalar alpha, Scalar beta) {
  using std::log;
  using std::max;
  const Scalar t2 = t * t;
  if (t <= Scalar(0)) return omega * t2;
  return omega * t2 + alpha * t2 * t2 * (Scalar(0.5) * log(max(t2, detail::log_floor<Scalar>()) / beta) - Scalar(0.25));
}

/// q(t) >= 0 with q'(t) = 2 t^3 / (1 + s t^2)^gamma and q(0) = 0.
///
/// Written as ((1 - (1+x)^(2-gamma))/(gamma-2) - (1 - (1+x)^(1-gamma))/(gamma-1)) / s^2
/// with x = s t^2, which equals the textbook closed form but does not cancel
/// catastrophically. Below x = 1e-3 the Taylor series is used.
template <class Scalar>
Scalar q_aux(Scalar t, Scalar s, Scalar gamma) {
  using std::expm1;
  using std::log1p;
  const Scalar x = s * t * t;
  if (x < Scalar(1e-3)) {
    const Scalar c2 = Scalar(0.5);
    const Scalar c3 = -gamma / Scalar(3);
    const Scalar c4 = gamma * (gamma + 1) / Scalar(8);
    const Scalar c5 = -gamma * (gamma + 1) * (gamma + 2) / Scalar(30);
    return x * x * (c2 + x * (c3 + x * (c4 + x * c5))) / (s * s);
  }
  const Scalar l = log1p(x);
  const Scalar a = -expm1((Scalar(2) - gamma) * l) / (gamma - Scalar(2));
  const Scalar b = -expm1((Scalar(1) - gamma) * l) / (gamma - Scalar(1));
  return (a - b) / (s * s);
}

/// The same q in the form printed in most references; kept for cross-checks.
template <class Scalar>
Scalar q_aux_direct(Scalar t, Scalar s, Scalar gamma) {
  using std::pow;
  const Scalar x = s * t * t;
  const Scalar d = pow(Scalar(1) + x, gamma);
  return (Scalar(1) - (Scalar(1) + gamma * x) / d) / (s * s * (gamma - 1) * (gamma - 2)) -
         t * t * t * t / ((gamma - 2) * d);
}

// ---------------------------------------------------------------------------
// shared pieces of the discrete functionals

namespace detail {

// 1/2 sum_c (u_{c+1} - u_c)^2 r_mid / h
template <class Scalar>
accum_t<Scalar> kinetic(const RadialGrid<Scalar>& grid, const Vector<Scalar>& u) {
  using A = accum_t<Scalar>;
  A acc = 0;
  for (Eigen::Index c = 0; c + 1 < grid.size(); ++c) {
    const A du = A(u[c + 1]) - A(u[c]);
    acc += du * du * A(grid.midpoint(c)) / A(grid.spacing(c));
  }
  return A(0.5) * acc;
}

// adds d/du of the kinetic part into out
template <class Scalar>
void add_kinetic_derivative(const RadialGrid<Scalar>& grid, const Vector<Scalar>& u, Vector<Scalar>& out) {
  for (Eigen::Index c = 0; c + 1 < grid.size(); ++c) {
    const Scalar f = (u[c + 1] - u[c]) * grid.midpoint(c) / grid.spacing(c);
    out[c] -= f;
    out[c + 1] += f;
  }
}

template <class Scalar>
void require_log(const VortexProblem<Scalar>& p, RegimeKind kind, const char* who) {
  if (!p.is_logarithmic() || p.kind() != kind)
    throw DomainError(std::string(who) + ": problem has the wrong model or boundary regime");
}

template <class Scalar>
void require_sat(const VortexProblem<Scalar>& p, const char* who) {
  if (p.is_logarithmic()) throw DomainError(std::string(who) + ": saturable model required");
}

template <class Scalar>
void require_outer_zero(const Profile<Scalar>& u, const char* who) {
  if (u.back() != Scalar(0)) throw DomainError(std::string(who) + ": profile must vanish at r = R");
}

template <class Scalar>
Scalar centrifugal(int n, Scalar r) {
  return Scalar(n) * Scalar(n) / (r * r);
}

template <class Scalar>
Vector<Scalar> weighted_by_grid(const RadialGrid<Scalar>& grid, Vector<Scalar> raw) {
  const Eigen::Index last = grid.size() - 1;
  for (Eigen::Index i = 1; i < last; ++i) raw[i] /= grid.weight(i);
  raw[0] = Scalar(0);
  raw[last] = Scalar(0);
  return raw;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// logarithmic model, zero-zero

/// (int (u'^2 + (n^2/r^2 + 2 omega) u^2) r dr)^(1/2)
template <class Scalar>
Scalar weighted_norm(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  using A = detail::accum_t<Scalar>;
  detail::require_log(p, RegimeKind::ZeroZero, "weighted_norm");
  if (!(*p.omega > 0)) throw DomainError("weighted_norm: ω > 0 required for a positive-definite norm");
  const auto& grid = *u.grid;
  A acc = A(2) * detail::kinetic(grid, u.values);
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const A ui = u[i];
    acc += A(grid.weight(i)) * (A(detail::centrifugal(p.n, grid.node(i))) + A(2) * A(*p.omega)) * ui * ui;
  }
  using std::sqrt;
  return Scalar(sqrt(acc));
}

/// I(u) = 1/2 int {u'^2 + (n^2/r^2 + 2 omega) u^2 + alpha u^4 ln(u^2/beta) - alpha u^4/2} r dr
template <class Scalar>
Scalar action_log(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  using A = detail::accum_t<Scalar>;
  detail::require_log(p, RegimeKind::ZeroZero, "action_log");
  detail::require_outer_zero(u, "action_log");
  const auto& lg = p.logarithmic();
  const auto& grid = *u.grid;
  const A omega = *p.omega, alpha = lg.alpha, beta = lg.beta;
  A pot = 0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const A ui = u[i];
    const A a = A(detail::centrifugal(p.n, grid.node(i))) + A(2) * omega;
    pot += A(grid.weight(i)) * (a * ui * ui + alpha * P_aux(ui, beta));
  }
  return Scalar(detail::kinetic(grid, u.values) + A(0.5) * pot);
}

/// Nodal derivative dI/du_i (boundary entries zero).
template <class Scalar>
Vector<Scalar> action_log_derivative(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  detail::require_log(p, RegimeKind::ZeroZero, "action_log_derivative");
  const auto& grid = *u.grid;
  Vector<Scalar> out = Vector<Scalar>::Zero(grid.size());
  detail::add_kinetic_derivative(grid, u.values, out);
  const Scalar omega = *p.omega;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const Scalar ui = u[i];
    const Scalar a = detail::centrifugal(p.n, grid.node(i)) + Scalar(2) * omega;
    // alpha/2 P'(u) = 2 alpha u^3 ln(u^2/beta) = 2 psi(u) u
    out[i] += grid.weight(i) * (a * ui + Scalar(2) * psi(p.nonlinearity, ui) * ui);
  }
  out[0] = 0;
  out[grid.size() - 1] = 0;
  return out;
}

// ---------------------------------------------------------------------------
// logarithmic model, zero-plateau

/// Cutoff phi (0 on [0,1], k on [2,R], quintic smoothstep between) and the
/// source eta = phi'' + phi'/r - n^2 phi / r^2.
///
/// eta holds the closed form. eta_discrete is the same operator applied to
/// the piecewise-linear phi through the discrete kinetic form (summation by
/// parts), so that I_1(v) differs from the discrete action of u = v + phi by
/// a constant. The functional uses eta_discrete; the two agree to O(h^2)
/// away from r = 1 and r = 2.
template <class Scalar>
struct HomogenizationData {
  Vector<Scalar> phi;
  Vector<Scalar> eta;
  Vector<Scalar> eta_discrete;
  Scalar k;
  int n;
};

namespace detail {

template <class Scalar>
void smoothstep(Scalar r, Scalar& S, Scalar& dS, Scalar& d2S) {
  using std::clamp;
  const Scalar x = clamp(r - Scalar(1), Scalar(0), Scalar(1));
  const Scalar y = Scalar(1) - x;
  S = x * x * x * (Scalar(10) - Scalar(15) * x + Scalar(6) * x * x);
  dS = Scalar(30) * x * x * y * y;
  d2S = Scalar(60) * x * y * (y - x);
}

}  // namespace detail

template <class Scalar>
HomogenizationData<Scalar> make_homogenization(Scalar k, int n, const RadialGrid<Scalar>& grid) {
  if (!(k > 0)) throw DomainError("make_homogenization: k > 0 required");
  if (!(grid.radius() > Scalar(2))) throw DomainError("make_homogenization: grid must extend past r = 2");
  HomogenizationData<Scalar> h{Vector<Scalar>(grid.size()), Vector<Scalar>(grid.size()),
                               Vector<Scalar>::Zero(grid.size()), k, n};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar r = grid.node(i);
    Scalar S, dS, d2S;
    detail::smoothstep(r, S, dS, d2S);
    h.phi[i] = k * S;
    if (r <= Scalar(1)) {
      h.eta[i] = Scalar(0);
    } else if (r >= Scalar(2)) {
      h.eta[i] = -detail::centrifugal(n, r) * k;
    } else {
      h.eta[i] = k * (d2S + dS / r - detail::centrifugal(n, r) * S);
    }
  }
  Vector<Scalar> kphi = Vector<Scalar>::Zero(grid.size());
  detail::add_kinetic_derivative(grid, h.phi, kphi);
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    h.eta_discrete[i] = -(kphi[i] / grid.weight(i) + detail::centrifugal(n, grid.node(i)) * h.phi[i]);
  return h;
}

/// I_1(v) = int {v'^2/2 + n^2 v^2/(2 r^2) + G(v + phi) - G(k) - eta v} r dr
template <class Scalar>
Scalar action_plateau(const VortexProblem<Scalar>& p, const Profile<Scalar>& v, const HomogenizationData<Scalar>& hom) {
  using A = detail::accum_t<Scalar>;
  detail::require_log(p, RegimeKind::ZeroPlateau, "action_plateau");
  detail::require_outer_zero(v, "action_plateau");
  const auto& lg = p.logarithmic();
  const auto& grid = *v.grid;
  if (hom.phi.size() != grid.size()) throw DomainError("action_plateau: homogenization built on another grid");
  const A omega = *p.omega, alpha = lg.alpha, beta = lg.beta, k = hom.k;
  const A Gk = G_primitive(k, omega, alpha, beta);
  A pot = 0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const A vi = v[i];
    const A u = vi + A(hom.phi[i]);
    pot += A(grid.weight(i)) * (A(0.5) * A(detail::centrifugal(p.n, grid.node(i))) * vi * vi +
                                (G_primitive(u, omega, alpha, beta) - Gk) - A(hom.eta_discrete[i]) * vi);
  }
  return Scalar(detail::kinetic(grid, v.values) + pot);
}

template <class Scalar>
Vector<Scalar> action_plateau_derivative(const VortexProblem<Scalar>& p, const Profile<Scalar>& v,
                                         const HomogenizationData<Scalar>& hom) {
  detail::require_log(p, RegimeKind::ZeroPlateau, "action_plateau_derivative");
  const auto& lg = p.logarithmic();
  const auto& grid = *v.grid;
  Vector<Scalar> out = Vector<Scalar>::Zero(grid.size());
  detail::add_kinetic_derivative(grid, v.values, out);
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const Scalar vi = v[i];
    out[i] += grid.weight(i) * (detail::centrifugal(p.n, grid.node(i)) * vi +
                                g_piecewise(vi + hom.phi[i], *p.omega, lg.alpha, lg.beta) - hom.eta_discrete[i]);
  }
  out[0] = 0;
  out[grid.size() - 1] = 0;
  return out;
}

/// u = v + phi
template <class Scalar>
Profile<Scalar> plateau_amplitude(const Profile<Scalar>& v, const HomogenizationData<Scalar>& hom) {
  return {v.grid, v.values + hom.phi};
}

// ---------------------------------------------------------------------------
// saturable model, power constrained

/// J(u) = 1/2 int (u'^2 + n^2 u^2 / r^2) r dr + int q(u) r dr
template <class Scalar>
Scalar action_sat(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  using A = detail::accum_t<Scalar>;
  detail::require_sat(p, "action_sat");
  detail::require_outer_zero(u, "action_sat");
  const auto& sat = p.saturable();
  const auto& grid = *u.grid;
  const A s = sat.s, gamma = sat.gamma;
  A pot = 0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const A ui = u[i];
    pot += A(grid.weight(i)) * (A(0.5) * A(detail::centrifugal(p.n, grid.node(i))) * ui * ui + q_aux(ui, s, gamma));
  }
  return Scalar(detail::kinetic(grid, u.values) + pot);
}

template <class Scalar>
Vector<Scalar> action_sat_derivative(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  using std::pow;
  detail::require_sat(p, "action_sat_derivative");
  const auto& sat = p.saturable();
  const auto& grid = *u.grid;
  Vector<Scalar> out = Vector<Scalar>::Zero(grid.size());
  detail::add_kinetic_derivative(grid, u.values, out);
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const Scalar ui = u[i];
    const Scalar u2 = ui * ui;
    out[i] += grid.weight(i) * (detail::centrifugal(p.n, grid.node(i)) * ui +
                                Scalar(2) * u2 * ui / pow(Scalar(1) + sat.s * u2, sat.gamma));
  }
  out[0] = 0;
  out[grid.size() - 1] = 0;
  return out;
}

/// P(u) = 2 pi int u^2 r dr
template <class Scalar>
Scalar beam_power(const Profile<Scalar>& u) {
  using A = detail::accum_t<Scalar>;
  A acc = 0;
  for (Eigen::Index i = 1; i < u.size(); ++i) acc += A(u.grid->weight(i)) * A(u[i]) * A(u[i]);
  return Scalar(A(2) * std::numbers::pi_v<A> * acc);
}

/// dP/du_i = 4 pi w_i u_i
template <class Scalar>
Vector<Scalar> beam_power_derivative(const Profile<Scalar>& u) {
  return Scalar(4) * std::numbers::pi_v<Scalar> * u.grid->weights().cwiseProduct(u.values);
}

/// Weak-form multiplier: -int(u'^2 + n^2 u^2/r^2 + 2 u^4/(1+su^2)^gamma) r dr / (2 int u^2 r dr),
/// evaluated with the same discrete forms as J and P.
template <class Scalar>
Scalar rayleigh_multiplier(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  using A = detail::accum_t<Scalar>;
  using std::pow;
  detail::require_sat(p, "rayleigh_multiplier");
  const auto& sat = p.saturable();
  const auto& grid = *u.grid;
  A num = A(2) * detail::kinetic(grid, u.values);
  A den = 0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const A ui = u[i], u2 = ui * ui, w = grid.weight(i);
    num += w * (A(detail::centrifugal(p.n, grid.node(i))) * u2 + A(2) * u2 * u2 / pow(A(1) + A(sat.s) * u2, A(sat.gamma)));
    den += w * u2;
  }
  if (!(den > 0)) throw SolveError("rayleigh_multiplier: profile is identically zero");
  return Scalar(-num / (A(2) * den));
}

// ---------------------------------------------------------------------------
// gradients in the r dr inner product: raw derivative divided by w_i

template <class Scalar>
Vector<Scalar> gradient(const VortexProblem<Scalar>& p, const Profile<Scalar>& u) {
  if (!p.is_logarithmic()) return detail::weighted_by_grid(*u.grid, action_sat_derivative(p, u));
  return detail::weighted_by_grid(*u.grid, action_log_derivative(p, u));
}

template <class Scalar>
Vector<Scalar> gradient(const VortexProblem<Scalar>& p, const Profile<Scalar>& v, const HomogenizationData<Scalar>& hom) {
  return detail::weighted_by_grid(*v.grid, action_plateau_derivative(p, v, hom));
}

/// <f, g> = sum_i w_i f_i g_i
template <class Scalar, class D1, class D2>
Scalar inner(const RadialGrid<Scalar>& grid, const Eigen::MatrixBase<D1>& f, const Eigen::MatrixBase<D2>& g) {
  return (grid.weights().array() * f.array() * g.array()).sum();
}

// ---------------------------------------------------------------------------
// strong-form residual

/// u'' + u'/r - n^2 u / r^2 - 2 omega u - 2 psi(u) u at interior nodes, zero at
/// both ends. u' is the central difference; u'' is the central difference of
/// u' from node 2 to N-2 and the three-point second difference at nodes 1 and N-1.
template <class Scalar>
Vector<Scalar> el_residual(const VortexProblem<Scalar>& p, const Profile<Scalar>& u, Scalar omega) {
  const auto& grid = *u.grid;
  const auto& r = grid.nodes();
  const Eigen::Index n = grid.size();
  const Vector<Scalar> du = differentiate(grid, u.values);
  const Vector<Scalar> d2u = differentiate(grid, du);
  Vector<Scalar> res = Vector<Scalar>::Zero(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    Scalar upp;
    if (i == 1 || i == n - 2) {
      Scalar cm, c0, cp;
      detail::central_second(r[i] - r[i - 1], r[i + 1] - r[i], cm, c0, cp);
      upp = cm * u[i - 1] + c0 * u[i] + cp * u[i + 1];
    } else {
      upp = d2u[i];
    }
    const Scalar ui = u[i];
    res[i] = upp + du[i] / r[i] - detail::centrifugal(p.n, r[i]) * ui - Scalar(2) * omega * ui -
             Scalar(2) * psi(p.nonlinearity, ui) * ui;
  }
  return res;
}

/// sup_i min(r_i, 1) |res_i| / max |u|.
///
/// The min(r, 1) factor suppresses the first-order r ln r error mode that
/// the logarithmic term leaves in the difference quotients next to the core.
template <class Scalar>
Scalar scaled_residual_norm(const Profile<Scalar>& u, const Vector<Scalar>& res) {
  using std::min;
  const Scalar m = u.max_abs();
  if (m == Scalar(0)) return res.cwiseAbs().maxCoeff();
  Scalar sup = 0;
  for (Eigen::Index i = 1; i + 1 < u.size(); ++i)
    sup = std::max(sup, min(u.r(i), Scalar(1)) * std::abs(res[i]));
  return sup / m;
}

}  // namespace vortex

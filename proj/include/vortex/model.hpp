// Physical models, boundary regimes and the closed-form pointwise functions
// of the logarithmic (Gross-Pitaevskii) and saturable nonlinearities.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

namespace vortex {

/// Parameter or precondition violation. The message names the violated
/// inequality together with its numeric threshold.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver or integrator.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt5(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", x);
  return buf;
}

inline std::string fmtg(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Smallest argument fed to the logarithm of u^2/beta.
template <class Scalar>
constexpr Scalar log_floor() {
  return std::max(static_cast<Scalar>(1e-300), std::numeric_limits<Scalar>::min());
}

}  // namespace detail

template <class Scalar>
struct Logarithmic {
  Scalar alpha;
  Scalar beta;
};

template <class Scalar>
struct Saturable {
  Scalar s;
  Scalar gamma;
};

template <class Scalar>
using Nonlinearity = std::variant<Logarithmic<Scalar>, Saturable<Scalar>>;

/// u(0) = u(R) = 0. `truncated` marks R as a stand-in for infinity.
template <class Scalar>
struct ZeroZero {
  Scalar R;
  bool truncated = true;
};

/// u(0) = 0, u(R) = k, with R a truncation of infinity.
template <class Scalar>
struct ZeroPlateau {
  Scalar R;
  Scalar k;
};

/// u(0) = u(R) = 0 with prescribed beam power P0.
template <class Scalar>
struct PowerConstrained {
  Scalar R;
  Scalar P0;
};

template <class Scalar>
using BoundaryRegime = std::variant<ZeroZero<Scalar>, ZeroPlateau<Scalar>, PowerConstrained<Scalar>>;

enum class RegimeKind { ZeroZero, ZeroPlateau, PowerConstrained };

template <class Scalar>
struct VortexProblem {
  int n = 1;
  Nonlinearity<Scalar> nonlinearity;
  BoundaryRegime<Scalar> regime;
  std::optional<Scalar> omega;  // absent exactly for PowerConstrained
  std::optional<Scalar> mu;     // validation floor for omega (ZeroZero only)

  RegimeKind kind() const { return static_cast<RegimeKind>(regime.index()); }
  bool is_logarithmic() const { return std::holds_alternative<Logarithmic<Scalar>>(nonlinearity); }
  const Logarithmic<Scalar>& logarithmic() const { return std::get<Logarithmic<Scalar>>(nonlinearity); }
  const Saturable<Scalar>& saturable() const { return std::get<Saturable<Scalar>>(nonlinearity); }

  Scalar radius() const {
    return std::visit([](const auto& r) { return r.R; }, regime);
  }
};

/// Open interval (lower, upper).
template <class Scalar>
struct Interval {
  Scalar lower;
  Scalar upper;
  bool contains(Scalar x) const { return x > lower && x < upper; }
};

/// psi(u): alpha u^2 ln(u^2/beta) or u^2/(1+s u^2)^gamma. Logarithmic is
/// extended by 0 at u = 0.
template <class Scalar>
Scalar psi(const Nonlinearity<Scalar>& nl, Scalar u) {
  using std::isfinite;
  using std::log;
  using std::max;
  using std::pow;
  if (!isfinite(u)) throw DomainError("psi: argument must be finite");
  const Scalar u2 = u * u;
  if (const auto* lg = std::get_if<Logarithmic<Scalar>>(&nl)) {
    if (u2 == Scalar(0)) return Scalar(0);
    return lg->alpha * u2 * log(max(u2, detail::log_floor<Scalar>()) / lg->beta);
  }
  const auto& sat = std::get<Saturable<Scalar>>(nl);
  return u2 / pow(Scalar(1) + sat.s * u2, sat.gamma);
}

/// Upper endpoint of the zero-zero window: 1/2 e^{-1/2} alpha beta.
template <class Scalar>
Scalar zero_zero_threshold(Scalar alpha, Scalar beta) {
  using std::exp;
  return Scalar(0.5) * exp(Scalar(-0.5)) * alpha * beta;
}

/// Upper endpoint of the plateau window: 3/4 e^{-1} alpha beta.
template <class Scalar>
Scalar plateau_threshold(Scalar alpha, Scalar beta) {
  using std::exp;
  return Scalar(0.75) * exp(Scalar(-1)) * alpha * beta;
}

/// Admissible open omega interval for a logarithmic problem. The zero-zero
/// case additionally needs omega >= mu for a chosen mu > 0.
template <class Scalar>
Interval<Scalar> existence_window(const Nonlinearity<Scalar>& nl, RegimeKind kind) {
  const auto* lg = std::get_if<Logarithmic<Scalar>>(&nl);
  if (lg == nullptr)
    throw DomainError("existence_window: saturable model has no omega window (omega is a Lagrange multiplier there)");
  switch (kind) {
    case RegimeKind::ZeroZero:
      return {Scalar(0), zero_zero_threshold(lg->alpha, lg->beta)};
    case RegimeKind::ZeroPlateau:
      return {Scalar(0), plateau_threshold(lg->alpha, lg->beta)};
    case RegimeKind::PowerConstrained:
      break;
  }
  throw DomainError("existence_window: power-constrained regime has no omega window");
}

/// Largest k > 0 with omega + alpha k^2 ln(k^2/beta) = 0. Solved by bisection
/// in t = k^2 on [beta/e, beta], where t ln(t/beta) is increasing.
template <class Scalar>
Scalar k_plateau(Scalar alpha, Scalar beta, Scalar omega) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  if (!(alpha > 0) || !(beta > 0)) throw DomainError("k_plateau: alpha > 0 and beta > 0 required");
  const Scalar upper = plateau_threshold(alpha, beta);
  if (!(omega > 0 && omega < upper))
    throw DomainError("ω must satisfy 0 < ω < ¾e^(−1)αβ = " + detail::fmt5(double(upper)) +
                      " (got ω = " + detail::fmtg(double(omega)) + ")");
  auto f = [&](Scalar t) { return omega + alpha * t * log(t / beta); };
  Scalar lo = beta * exp(Scalar(-1));
  Scalar hi = beta;
  const Scalar rel = Scalar(1e-14);
  for (int it = 0; it < 400 && (hi - lo) > rel * hi; ++it) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0 ? lo : hi) = mid;
  }
  const Scalar t = abs(f(lo)) < abs(f(hi)) ? lo : hi;
  const Scalar k = sqrt(t);
  if (!(k > sqrt(beta * exp(Scalar(-1)))))
    throw SolveError("k_plateau: root fell below sqrt(beta/e)");
  return k;
}

/// g'(k) = 4 alpha k^2 (ln(k^2/beta) + 1) at the plateau root.
template <class Scalar>
Scalar gprime_at_k(Scalar alpha, Scalar beta, Scalar omega, Scalar k) {
  using std::abs;
  using std::log;
  const Scalar t = k * k;
  const Scalar residual = omega + alpha * t * log(t / beta);
  if (!(abs(residual) <= Scalar(1e-10) * alpha * beta))
    throw DomainError("gprime_at_k: k is not a root of ω + αk²ln(k²/β) (residual " +
                      detail::fmtg(double(residual)) + ")");
  return Scalar(4) * alpha * t * (log(t / beta) + Scalar(1));
}

/// Throws DomainError on any violated parameter invariant.
template <class Scalar>
void validate(const VortexProblem<Scalar>& p) {
  using std::abs;
  if (p.n == 0) throw DomainError("winding number n must be nonzero");
  if (!(p.radius() > 0)) throw DomainError("R must be positive");

  if (const auto* lg = std::get_if<Logarithmic<Scalar>>(&p.nonlinearity)) {
    if (!(lg->alpha > 0)) throw DomainError("α must satisfy α > 0");
    if (!(lg->beta > 0)) throw DomainError("β must satisfy β > 0");
  } else {
    const auto& sat = std::get<Saturable<Scalar>>(p.nonlinearity);
    if (!(sat.s > 0)) throw DomainError("s must satisfy s > 0");
    if (!(sat.gamma > 2)) throw DomainError("γ must satisfy γ > 2");
  }

  const bool constrained = p.kind() == RegimeKind::PowerConstrained;
  if (constrained && p.omega) throw DomainError("ω must be absent for the power-constrained regime (it is an output)");
  if (!constrained && !p.omega) throw DomainError("ω is required for the zero-zero and zero-plateau regimes");
  if (constrained && !(std::get<PowerConstrained<Scalar>>(p.regime).P0 > 0))
    throw DomainError("P0 must satisfy P0 > 0");

  if (!p.is_logarithmic()) return;
  const auto& lg = p.logarithmic();
  if (p.kind() == RegimeKind::ZeroZero) {
    const Scalar top = zero_zero_threshold(lg.alpha, lg.beta);
    const Scalar mu = p.mu.value_or(Scalar(1e-6) * lg.alpha * lg.beta);
    if (!(mu > 0)) throw DomainError("μ must satisfy μ > 0");
    if (!(*p.omega >= mu && *p.omega < top))
      throw DomainError("ω must satisfy μ ≤ ω < ½e^(−1/2)αβ = " + detail::fmt5(double(top)) +
                        " with μ = " + detail::fmtg(double(mu)) + " (got ω = " + detail::fmtg(double(*p.omega)) + ")");
  } else if (p.kind() == RegimeKind::ZeroPlateau) {
    const Scalar top = plateau_threshold(lg.alpha, lg.beta);
    if (!(*p.omega > 0 && *p.omega < top))
      throw DomainError("ω must satisfy 0 < ω < ¾e^(−1)αβ = " + detail::fmt5(double(top)) +
                        " (got ω = " + detail::fmtg(double(*p.omega)) + ")");
    const Scalar k = std::get<ZeroPlateau<Scalar>>(p.regime).k;
    const Scalar expected = k_plateau(lg.alpha, lg.beta, *p.omega);
    if (!(abs(k - expected) <= Scalar(1e-10) * expected))
      throw DomainError("plateau value k must be the largest root of ω + αk²ln(k²/β) = 0 (expected " +
                        detail::fmtg(double(expected)) + ")");
  }
}

template <class Scalar>
VortexProblem<Scalar> log_zero_problem(Scalar alpha, Scalar beta, int n, Scalar omega, Scalar R,
                                       std::optional<Scalar> mu = std::nullopt) {
  VortexProblem<Scalar> p{n, Logarithmic<Scalar>{alpha, beta}, ZeroZero<Scalar>{R, true}, omega, mu};
  validate(p);
  return p;
}

/// Plateau problem with k fixed by k_plateau.
template <class Scalar>
VortexProblem<Scalar> log_plateau_problem(Scalar alpha, Scalar beta, int n, Scalar omega, Scalar R) {
  const Scalar k = k_plateau(alpha, beta, omega);
  VortexProblem<Scalar> p{n, Logarithmic<Scalar>{alpha, beta}, ZeroPlateau<Scalar>{R, k}, omega, std::nullopt};
  validate(p);
  return p;
}

template <class Scalar>
VortexProblem<Scalar> sat_constrained_problem(Scalar s, Scalar gamma, int n, Scalar P0, Scalar R) {
  VortexProblem<Scalar> p{n, Saturable<Scalar>{s, gamma}, PowerConstrained<Scalar>{R, P0}, std::nullopt,
                          std::nullopt};
  validate(p);
  return p;
}

}  // namespace vortex

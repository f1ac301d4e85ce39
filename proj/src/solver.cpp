#include "vortex/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <random>

#include "vortex/analysis.hpp"

namespace vortex {

namespace {

using Vec = Vector<double>;

// Quadratic part of the action restricted to the free nodes 1..N-1:
// stiffness r_mid/h per cell plus w_i (n^2/r_i^2 + shift) on the diagonal.
class Preconditioner {
 public:
  Preconditioner(const RadialGrid<double>& grid, int n, double shift) : size_(grid.size()) {
    const Eigen::Index N = grid.cells();
    const Eigen::Index m = N - 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(3 * m);
    for (Eigen::Index c = 0; c < N; ++c) {
      const double kappa = grid.midpoint(c) / grid.spacing(c);
      const Eigen::Index a = c - 1, b = c;  // free indices of nodes c and c+1
      if (a >= 0) t.emplace_back(a, a, kappa);
      if (b < m) t.emplace_back(b, b, kappa);
      if (a >= 0 && b < m) {
        t.emplace_back(a, b, -kappa);
        t.emplace_back(b, a, -kappa);
      }
    }
    for (Eigen::Index i = 1; i < N; ++i) {
      const double r = grid.node(i);
      t.emplace_back(i - 1, i - 1, grid.weight(i) * (double(n) * n / (r * r) + shift));
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(t.begin(), t.end());
    ldlt_.compute(A);
    if (ldlt_.info() != Eigen::Success) throw SolveError("preconditioner factorisation failed");
  }

  /// A^{-1} applied to the interior of a nodal vector; ends stay zero.
  Vec solve(const Vec& rhs) const {
    const Eigen::Index m = size_ - 2;
    Vec out = Vec::Zero(size_);
    out.segment(1, m) = ldlt_.solve(rhs.segment(1, m));
    return out;
  }

 private:
  Eigen::Index size_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

double scaled_sup(const RadialGrid<double>& grid, const Vec& raw, double scale) {
  double sup = 0.0;
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) sup = std::max(sup, std::abs(raw[i] / grid.weight(i)));
  return scale > 0.0 ? sup / scale : sup;
}

Vec nodal_gradient(const RadialGrid<double>& grid, const Vec& raw) {
  Vec d = Vec::Zero(grid.size());
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) d[i] = raw[i] / grid.weight(i);
  return d;
}

void pin(Vec& x) {
  x[0] = 0.0;
  x[x.size() - 1] = 0.0;
}

Vec tent_values(const TentInit& tent, const RadialGrid<double>& grid) {
  if (!(tent.a > 0.0) || !(tent.b > 0.0)) throw DomainError("tent init: a > 0 and b > 0 required");
  if (2.0 * tent.a > grid.radius() * (1.0 + 1e-12)) throw DomainError("tent init: support 2a must fit inside [0, R]");
  Vec x(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    x[i] = r <= tent.a ? tent.b / tent.a * r : std::max(0.0, tent.b / tent.a * (2.0 * tent.a - r));
  }
  return x;
}

Vec random_values(const RandomInit& init, const RadialGrid<double>& grid) {
  if (!(init.amplitude > 0.0)) throw DomainError("random init: amplitude must be positive");
  std::mt19937_64 gen(init.seed);
  std::uniform_real_distribution<double> dist(0.0, init.amplitude);
  const Eigen::Index n = grid.size();
  Vec raw(n);
  for (Eigen::Index i = 0; i < n; ++i) raw[i] = dist(gen);
  pin(raw);
  Vec x = raw;
  for (Eigen::Index i = 1; i + 1 < n; ++i) x[i] = 0.25 * (raw[i - 1] + 2.0 * raw[i] + raw[i + 1]);
  pin(x);
  return x;
}

GridPtr<double> grid_for(const VortexProblem<double>& p, const SolverConfig& cfg) {
  return make_grid(p.radius(), cfg.cells, cfg.grading);
}

struct Descent {
  Vec x;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<double> history;
};

// Armijo descent along -A^{-1} grad (or the nodal gradient), optionally
// followed by the nodal absolute value.
template <class Energy, class Derivative, class Scale>
Descent descend(const RadialGrid<double>& grid, const SolverConfig& cfg, const Preconditioner* pre, Vec x,
                bool project, Energy&& energy, Derivative&& derivative, Scale&& scale) {
  Descent out;
  if (project) x = x.cwiseAbs();
  pin(x);
  double E = energy(x);
  out.history.push_back(E);
  out.message = "iteration limit reached";
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const Vec g = derivative(x);
    out.grad_norm = scaled_sup(grid, g, scale(x));
    if (out.grad_norm <= cfg.grad_tol) {
      out.converged = true;
      out.message = "converged";
      break;
    }
    const Vec d = pre ? Vec(-pre->solve(g)) : Vec(-nodal_gradient(grid, g));
    const double slope = g.dot(d);
    if (!(slope < 0.0)) {
      out.message = "no descent direction";
      break;
    }
    double t = 1.0;
    bool accepted = false;
    Vec xn;
    double En = E;
    for (int b = 0; b <= cfg.armijo.max_backtracks; ++b, t *= cfg.armijo.ratio) {
      xn = x + t * d;
      if (project) xn = xn.cwiseAbs();
      pin(xn);
      En = energy(xn);
      if (std::isfinite(En) && En <= E + cfg.armijo.c * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.message = "line search stalled";
      break;
    }
    x = std::move(xn);
    E = En;
    out.history.push_back(E);
    if (cfg.on_step) cfg.on_step(it + 1, E);
  }
  if (it == cfg.max_iters) {
    // final gradient check at the last iterate
    out.grad_norm = scaled_sup(grid, derivative(x), scale(x));
    out.converged = out.grad_norm <= cfg.grad_tol;
    if (out.converged) out.message = "converged";
  }
  out.x = std::move(x);
  out.energy = E;
  out.iterations = it;
  return out;
}

bool truncation_check(const VortexProblem<double>& p, const Profile<double>& u) {
  const auto& grid = *u.grid;
  const double R = grid.radius();
  const double m = u.max_abs();
  double sup = 0.0;
  switch (p.kind()) {
    case RegimeKind::ZeroZero:
      if (!std::get<ZeroZero<double>>(p.regime).truncated) return true;
      for (Eigen::Index i = 1; i + 1 < grid.size(); ++i)
        if (grid.node(i) >= 0.9 * R) sup = std::max(sup, std::abs(u[i]));
      return sup < 1e-8 * m;
    case RegimeKind::ZeroPlateau: {
      const double k = std::get<ZeroPlateau<double>>(p.regime).k;
      for (Eigen::Index i = 1; i + 1 < grid.size(); ++i)
        if (grid.node(i) >= 0.9 * R) sup = std::max(sup, std::abs(u[i] - k));
      return sup < 1e-6 * k;
    }
    case RegimeKind::PowerConstrained:
      break;
  }
  return true;
}

VortexProblem<double> with_radius(VortexProblem<double> p, double R) {
  std::visit([R](auto& reg) { reg.R = R; }, p.regime);
  return p;
}

SolveReport solve_zero_zero(const VortexProblem<double>& p, const SolverConfig& cfg) {
  const auto grid = grid_for(p, cfg);
  const double omega = *p.omega;
  const Preconditioner pre(*grid, p.n, 2.0 * omega);
  auto energy = [&](const Vec& x) { return action_log(p, Profile<double>(grid, x)); };
  auto derivative = [&](const Vec& x) { return action_log_derivative(p, Profile<double>(grid, x)); };
  auto scale = [](const Vec& x) { return x.cwiseAbs().maxCoeff(); };
  Descent d = descend(*grid, cfg, cfg.preconditioned ? &pre : nullptr, initial_values(p, cfg.init, *grid),
                      cfg.nonneg_projection, energy, derivative, scale);

  SolveReport rep;
  rep.profile = Profile<double>(grid, d.x);
  rep.energy = d.energy;
  rep.omega = omega;
  rep.grad_norm = d.grad_norm;
  rep.el_residual_norm = scaled_residual_norm(rep.profile, el_residual(p, rep.profile, omega));
  rep.iterations = d.iterations;
  rep.converged = d.converged;
  rep.energy_history = std::move(d.history);
  rep.message = d.message;
  rep.truncation_ok = truncation_check(p, rep.profile);
  if (rep.profile.max_abs() > 0.0) {
    try {
      rep.decay = fit_decay(rep.profile, omega);
    } catch (const DomainError&) {
      rep.decay.reset();
    }
  }
  return rep;
}

SolveReport solve_plateau(const VortexProblem<double>& p, const SolverConfig& cfg) {
  const auto grid = grid_for(p, cfg);
  const auto& lg = p.logarithmic();
  const double omega = *p.omega;
  const double k = std::get<ZeroPlateau<double>>(p.regime).k;
  const auto hom = make_homogenization(k, p.n, *grid);
  const Preconditioner pre(*grid, p.n, gprime_at_k(lg.alpha, lg.beta, omega, k));
  auto energy = [&](const Vec& x) { return action_plateau(p, Profile<double>(grid, x), hom); };
  auto derivative = [&](const Vec& x) { return action_plateau_derivative(p, Profile<double>(grid, x), hom); };
  auto scale = [&](const Vec& x) { return (x + hom.phi).cwiseAbs().maxCoeff(); };
  // v = u - phi changes sign freely, so no absolute-value projection here
  Descent d = descend(*grid, cfg, cfg.preconditioned ? &pre : nullptr, initial_values(p, cfg.init, *grid), false,
                      energy, derivative, scale);

  SolveReport rep;
  rep.profile = plateau_amplitude(Profile<double>(grid, d.x), hom);
  rep.energy = d.energy;
  rep.omega = omega;
  rep.grad_norm = d.grad_norm;
  rep.el_residual_norm = scaled_residual_norm(rep.profile, el_residual(p, rep.profile, omega));
  rep.iterations = d.iterations;
  rep.converged = d.converged;
  rep.energy_history = std::move(d.history);
  rep.message = d.message;
  rep.truncation_ok = truncation_check(p, rep.profile);
  return rep;
}

template <class Solve>
SolveReport with_truncation_retries(const VortexProblem<double>& p, const SolverConfig& cfg, Solve&& run) {
  SolveReport rep = run(p, cfg);
  VortexProblem<double> q = p;
  SolverConfig c = cfg;
  for (int i = 0; i < cfg.truncation_doublings && !rep.truncation_ok; ++i) {
    q = with_radius(q, 2.0 * q.radius());
    c.cells *= 2;
    c.init = std::monostate{};
    rep = run(q, c);
  }
  return rep;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 1) throw DomainError("max_iters must satisfy max_iters ≥ 1");
  if (!(grad_tol > 0.0)) throw DomainError("grad_tol must satisfy grad_tol > 0");
  if (!(armijo.c > 0.0 && armijo.c < 1.0)) throw DomainError("Armijo constant must satisfy 0 < c < 1");
  if (!(armijo.ratio > 0.0 && armijo.ratio < 1.0)) throw DomainError("backtracking ratio must satisfy 0 < ratio < 1");
  if (armijo.max_backtracks < 1) throw DomainError("max_backtracks must satisfy max_backtracks ≥ 1");
  if (cells < 16) throw DomainError("grid needs at least 16 cells");
  if (truncation_doublings < 0) throw DomainError("truncation_doublings must be nonnegative");
}

Vector<double> initial_values(const VortexProblem<double>& p, const Init& init, const RadialGrid<double>& grid) {
  const auto kind = p.kind();
  Vec x;
  if (const auto* given = std::get_if<GivenInit>(&init)) {
    if (given->values.size() != grid.size()) throw DomainError("given init: value count does not match grid");
    if (!given->values.allFinite()) throw DomainError("given init: values must be finite");
    x = given->values;
  } else if (const auto* rnd = std::get_if<RandomInit>(&init)) {
    x = random_values(*rnd, grid);
  } else if (kind == RegimeKind::ZeroPlateau) {
    if (!std::holds_alternative<std::monostate>(init))
      throw DomainError("plateau problem accepts zero, random or given initial data for v");
    x = Vec::Zero(grid.size());
  } else if (const auto* tent = std::get_if<TentInit>(&init)) {
    x = tent_values(*tent, grid);
  } else if (kind == RegimeKind::PowerConstrained && std::holds_alternative<std::monostate>(init)) {
    x = tent_values(TentInit{}, grid);
  } else {
    TrialInit trial = std::holds_alternative<TrialInit>(init) ? std::get<TrialInit>(init) : TrialInit{};
    if (!p.is_logarithmic() || !p.omega) throw DomainError("trial init needs a logarithmic problem with ω");
    const auto& lg = p.logarithmic();
    if (!(trial.k > 0.0)) trial.k = argmin_Q(*p.omega, lg.alpha, lg.beta);
    if (!(trial.lambda > 0.0)) trial.lambda = std::sqrt(2.0 * *p.omega);
    if (!(trial.radius > 0.0)) trial.radius = 0.6 * grid.radius();
    const auto shared = std::make_shared<const RadialGrid<double>>(grid);
    x = trial_v(trial.k, trial.lambda, trial.radius, shared).values;
  }
  pin(x);
  return x;
}

SolveReport minimize_unconstrained(const VortexProblem<double>& problem, const SolverConfig& config) {
  validate(problem);
  config.validate();
  if (!problem.is_logarithmic() || problem.kind() == RegimeKind::PowerConstrained)
    throw DomainError("minimize_unconstrained: logarithmic zero-zero or zero-plateau problem required");
  if (problem.kind() == RegimeKind::ZeroZero) return with_truncation_retries(problem, config, solve_zero_zero);
  return with_truncation_retries(problem, config, solve_plateau);
}

SolveReport minimize_constrained(const VortexProblem<double>& p, const SolverConfig& cfg) {
  validate(p);
  cfg.validate();
  if (p.is_logarithmic() || p.kind() != RegimeKind::PowerConstrained)
    throw DomainError("minimize_constrained: saturable power-constrained problem required");
  const double P0 = std::get<PowerConstrained<double>>(p.regime).P0;
  const auto grid = grid_for(p, cfg);
  const Vec& w = grid->weights();
  const Preconditioner pre(*grid, p.n, 0.0);

  auto power_of = [&](const Vec& x) { return beam_power(Profile<double>(grid, x)); };
  auto to_sphere = [&](Vec& x) {
    if (cfg.nonneg_projection) x = x.cwiseAbs();
    pin(x);
    const double P = power_of(x);
    if (!(P > 1e-300) || !std::isfinite(P)) throw SolveError("constraint projection degenerate");
    x *= std::sqrt(P0 / P);
  };
  auto energy = [&](const Vec& x) { return action_sat(p, Profile<double>(grid, x)); };

  Vec x = initial_values(p, cfg.init, *grid);
  to_sphere(x);
  double E = energy(x);
  SolveReport rep;
  rep.energy_history.push_back(E);
  rep.message = "iteration limit reached";
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const Vec g = action_sat_derivative(p, Profile<double>(grid, x));
    Vec Mu = w.cwiseProduct(x);
    pin(Mu);
    // tangential part of the gradient in the r dr inner product
    const double mu_l2 = g.dot(x) / Mu.dot(x);
    rep.grad_norm = scaled_sup(*grid, g - mu_l2 * Mu, x.cwiseAbs().maxCoeff());
    if (rep.grad_norm <= cfg.grad_tol) {
      rep.converged = true;
      rep.message = "converged";
      break;
    }
    Vec d;
    if (cfg.preconditioned) {
      const Vec z1 = pre.solve(g);
      const Vec z2 = pre.solve(Mu);
      d = -(z1 - (z1.dot(Mu) / z2.dot(Mu)) * z2);
    } else {
      d = -nodal_gradient(*grid, g - mu_l2 * Mu);
    }
    const double slope = g.dot(d);
    if (!(slope < 0.0)) {
      rep.message = "no descent direction";
      break;
    }
    double t = 1.0;
    bool accepted = false;
    Vec xn;
    double En = E;
    for (int b = 0; b <= cfg.armijo.max_backtracks; ++b, t *= cfg.armijo.ratio) {
      xn = x + t * d;
      to_sphere(xn);
      En = energy(xn);
      if (std::isfinite(En) && En <= E + cfg.armijo.c * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.message = "line search stalled";
      break;
    }
    x = std::move(xn);
    E = En;
    rep.energy_history.push_back(E);
    if (cfg.on_step) cfg.on_step(it + 1, E);
  }

  rep.profile = Profile<double>(grid, x);
  rep.energy = E;
  rep.iterations = it;
  rep.omega = rayleigh_multiplier(p, rep.profile);
  rep.power = beam_power(rep.profile);
  rep.el_residual_norm = scaled_residual_norm(rep.profile, el_residual(p, rep.profile, rep.omega));
  rep.truncation_ok = true;
  return rep;
}

SolveReport solve(const VortexProblem<double>& problem, const SolverConfig& config) {
  if (problem.kind() == RegimeKind::PowerConstrained) return minimize_constrained(problem, config);
  return minimize_unconstrained(problem, config);
}

}  // namespace vortex

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "vortex/analysis.hpp"
#include "vortex/energy.hpp"

using namespace vortex;
using doctest::Approx;

namespace {

const auto log_zero = log_zero_problem(1.0, 1.0, 1, 0.2, 20.0);
const auto sat = sat_constrained_problem(1.0, 3.0, 1, 4 * oracle::pi / 3, 20.0);

template <class F>
Profile<double> sample(const GridPtr<double>& g, F&& f) {
  Vector<double> v(g->size());
  for (Eigen::Index i = 0; i < g->size(); ++i) v[i] = f(g->node(i));
  v[0] = 0.0;
  return {g, v};
}

Profile<double> tent(const GridPtr<double>& g, double a, double b) {
  return sample(g, [=](double r) { return r <= a ? b / a * r : std::max(0.0, b / a * (2 * a - r)); });
}

// random interior values, both ends pinned to zero
Vector<double> random_interior(std::mt19937_64& gen, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector<double> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(gen);
  v[0] = 0;
  v[n - 1] = 0;
  return v;
}

}  // namespace

TEST_CASE("profile invariants") {
  const auto g = make_grid(1.0, 20);
  CHECK_THROWS_AS(Profile<double>(g, Vector<double>::Ones(g->size())), DomainError);
  CHECK_THROWS_AS(Profile<double>(g, Vector<double>::Zero(3)), DomainError);
  Vector<double> bad = Vector<double>::Zero(g->size());
  bad[3] = std::nan("");
  CHECK_THROWS_AS(Profile<double>(g, bad), DomainError);
  CHECK_NOTHROW(zero_profile(g));
}

TEST_CASE("P and Q") {
  const double s0 = oracle::e_quarter;
  CHECK(std::abs(P_aux(s0, 1.0)) < 1e-14);
  CHECK(P_aux(0.99 * s0, 1.0) < 0.0);
  CHECK(P_aux(1.01 * s0, 1.0) > 0.0);
  CHECK(std::abs(P_aux(s0 * std::sqrt(3.0), 3.0)) < 1e-12);
  CHECK(Q_aux(0.0, 0.2, 1.0, 1.0) == 0.0);
  CHECK(Q_aux(1.0, 0.2, 1.0, 1.0) == Approx(-0.1).epsilon(1e-15));
  CHECK(Q_aux(oracle::argmin_Q_omega02, 0.2, 1.0, 1.0) == Approx(oracle::min_Q_omega02).epsilon(1e-13));
}

TEST_CASE("g and its primitive") {
  const double k = k_plateau(1.0, 1.0, 0.1);
  CHECK(std::abs(g_piecewise(k, 0.1, 1.0, 1.0)) < 1e-13);
  CHECK(g_piecewise(-1.0, 0.2, 1.0, 1.0) == Approx(-0.4));
  CHECK(G_primitive(0.0, 0.2, 1.0, 1.0) == 0.0);
  const double h = 1e-5;
  for (int i = 0; i <= 400; ++i) {
    const double t = -2.0 + 4.0 * i / 400.0;
    const double fd = (G_primitive(t + h, 0.2, 1.0, 1.0) - G_primitive(t - h, 0.2, 1.0, 1.0)) / (2 * h);
    CHECK(std::abs(fd - g_piecewise(t, 0.2, 1.0, 1.0)) < 1e-8);
  }
  // Q = 2G on s >= 0
  for (double s : {0.1, 0.5, 0.9, 1.3})
    CHECK(Q_aux(s, 0.2, 1.0, 1.0) == Approx(2 * G_primitive(s, 0.2, 1.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("q examples and nonnegativity") {
  CHECK(q_aux(0.0, 1.0, 3.0) == 0.0);
  CHECK(q_aux(1.0, 1.0, 3.0) == Approx(0.125).epsilon(1e-15));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dt(-10, 10), ds(0.01, 10), dg(2.001, 12);
  for (int i = 0; i < 100000; ++i) {
    const double q = q_aux(dt(gen), ds(gen), dg(gen));
    REQUIRE(q >= 0.0);
  }
}

TEST_CASE("stable q agrees with the textbook form where the latter is accurate") {
  for (double s : {0.3, 1.0, 4.0})
    for (double g : {2.2, 3.0, 7.5})
      for (double t : {0.2, 0.7, 1.0, 2.0, 5.0}) {
        const double x = s * t * t;
        if (x < 0.05) continue;
        CHECK(q_aux(t, s, g) == Approx(q_aux_direct(t, s, g)).epsilon(1e-9));
      }
  // q'(t) = 2 t^3 / (1 + s t^2)^gamma, including the series branch
  for (double t : {0.01, 0.03, 0.2, 1.0, 3.0}) {
    const double h = 1e-6 * std::max(t, 1e-2);
    const double fd = (q_aux(t + h, 1.5, 3.5) - q_aux(t - h, 1.5, 3.5)) / (2 * h);
    CHECK(fd == Approx(2 * t * t * t / std::pow(1 + 1.5 * t * t, 3.5)).epsilon(1e-6));
  }
  // series and closed branches meet continuously
  const double tb = std::sqrt(1e-3 / 2.0);
  CHECK(q_aux(tb * (1 - 1e-12), 2.0, 3.0) == Approx(q_aux(tb * (1 + 1e-12), 2.0, 3.0)).epsilon(1e-9));
}

TEST_CASE("weighted norm") {
  const auto g = make_grid(2.0, 4000);
  const auto p = log_zero_problem(1.0, 1.0, 1, 0.2, 2.0);
  CHECK(weighted_norm(p, zero_profile(g)) == 0.0);
  const auto u = tent(g, 1.0, 1.0);
  const Profile<double> u2(g, 2.0 * u.values);
  CHECK(weighted_norm(p, u2) == Approx(2 * weighted_norm(p, u)).epsilon(1e-12));
  const auto fine = make_grid(2.0, 1000000);
  const double ref = weighted_norm(p, tent(fine, 1.0, 1.0));
  CHECK(weighted_norm(p, u) == Approx(ref).epsilon(1e-6));
  VortexProblem<double> bad = p;
  bad.omega = 0.0;
  CHECK_THROWS_AS(weighted_norm(bad, u), DomainError);
}

TEST_CASE("action_log decomposition and sign of the trial") {
  const auto g = make_grid(20.0, 2000);
  CHECK(action_log(log_zero, zero_profile(g)) == 0.0);
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Profile<double> u(g, random_interior(gen, g->size(), 0.0, 1.5));
    const double norm = weighted_norm(log_zero, u);
    long double pint = 0;
    for (Eigen::Index i = 1; i < g->size(); ++i) pint += g->weight(i) * P_aux(u[i], 1.0);
    const double rhs = 0.5 * norm * norm + 0.5 * double(pint);
    CHECK(action_log(log_zero, u) == Approx(rhs).epsilon(1e-10));
  }
  const auto trial = trial_v(oracle::argmin_Q_omega02, std::sqrt(0.4), 12.0, g);
  CHECK(action_log(log_zero, trial) < 0.0);
  CHECK_THROWS_AS(action_log(sat, trial), DomainError);
  Vector<double> open = trial.values;
  open[open.size() - 1] = 0.5;
  CHECK_THROWS_AS(action_log(log_zero, Profile<double>(g, open)), DomainError);
}

TEST_CASE("homogenization data") {
  const auto g = make_grid(10.0, 2000);
  const auto hom = make_homogenization(1.0, 1, *g);
  CHECK(hom.phi[g->nearest(0.5)] == 0.0);
  CHECK(hom.phi[g->nearest(3.0)] == 1.0);
  CHECK(hom.eta[g->nearest(5.0)] == Approx(-0.04).epsilon(1e-14));
  for (Eigen::Index i = 0; i < g->size(); ++i) {
    if (g->node(i) <= 1.0) CHECK(hom.eta[i] == 0.0);
    if (i > 0) CHECK(hom.phi[i] >= hom.phi[i - 1]);
  }
  CHECK(eta_tail_defect(hom, *g) < 1e-10);
  const auto hom2 = make_homogenization(0.9, 3, *g);
  CHECK(eta_tail_defect(hom2, *g) < 1e-10);
  CHECK_THROWS_AS(make_homogenization(1.0, 1, *make_grid(2.0, 100)), DomainError);
  CHECK_THROWS_AS(make_homogenization(0.0, 1, *g), DomainError);
}

TEST_CASE("discrete source converges to the closed form") {
  // away from the seams at r = 1 and r = 2 the two agree to O(h^2)
  double prev = 0;
  for (Eigen::Index N : {1000, 2000, 4000}) {
    const auto g = make_grid(10.0, N);
    const auto hom = make_homogenization(1.0, 1, *g);
    double err = 0;
    for (Eigen::Index i = 1; i + 1 < g->size(); ++i) {
      const double r = g->node(i);
      if (std::abs(r - 1) < 0.05 || std::abs(r - 2) < 0.05) continue;
      err = std::max(err, std::abs(hom.eta_discrete[i] - hom.eta[i]));
    }
    if (N > 1000) CHECK(std::log2(prev / err) == Approx(2.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("plateau action") {
  const auto p = log_plateau_problem(1.0, 1.0, 1, 0.1, 5.0);
  const double k = std::get<ZeroPlateau<double>>(p.regime).k;
  auto value = [&](Eigen::Index N) {
    const auto g = make_grid(5.0, N);
    return action_plateau(p, zero_profile(g), make_homogenization(k, 1, *g));
  };
  CHECK(value(4000) == Approx(value(1000000)).epsilon(1e-6));
  // G(v + phi) - G(k) vanishes where v + phi = k, so only the core contributes
  const auto g = make_grid(5.0, 1000);
  const auto hom = make_homogenization(k, 1, *g);
  const double Gk = G_primitive(k, 0.1, 1.0, 1.0);
  for (Eigen::Index i = 0; i < g->size(); ++i)
    if (g->node(i) >= 2.0) CHECK(G_primitive(hom.phi[i], 0.1, 1.0, 1.0) - Gk == 0.0);
  CHECK(coercivity_constant(0.2, 1.0, 1.0, k_plateau(1.0, 1.0, 0.2), -3.0, 3.0, 60001) > 0.0);
  CHECK_THROWS_AS(action_plateau(log_zero, zero_profile(g), hom), DomainError);
}

TEST_CASE("saturable action and beam power") {
  const auto g = make_grid(2.0, 4000);
  const auto p = sat_constrained_problem(1.0, 3.0, 1, 4 * oracle::pi / 3, 2.0);
  CHECK(action_sat(p, zero_profile(g)) == 0.0);
  CHECK(beam_power(zero_profile(g)) == 0.0);
  const auto u0 = tent(g, 1.0, 1.0);
  CHECK(beam_power(u0) == Approx(4 * oracle::pi / 3).epsilon(1e-6));
  const double J = action_sat(p, u0);
  CHECK(J <= oracle::tent_J_bound);
  CHECK(J == Approx(oracle::tent_J_exact).epsilon(1e-6));
  CHECK_THROWS_AS(action_sat(log_zero, u0), DomainError);
}

TEST_CASE("evenness and the absolute-value inequality") {
  const auto g = make_grid(20.0, 1000);
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector<double> v = random_interior(gen, g->size(), -1.2, 1.2);
    const Profile<double> u(g, v), neg(g, -v), absu(g, v.cwiseAbs());
    CHECK(action_log(log_zero, neg) == action_log(log_zero, u));
    CHECK(action_sat(sat, neg) == action_sat(sat, u));
    CHECK(action_log(log_zero, absu) <= action_log(log_zero, u));
    CHECK(action_sat(sat, absu) <= action_sat(sat, u));
  }
}

TEST_CASE("gradients match finite differences of the functionals") {
  const auto g = make_grid(20.0, 400);
  const auto plateau = log_plateau_problem(1.0, 1.0, 1, 0.1, 20.0);
  const auto hom = make_homogenization(std::get<ZeroPlateau<double>>(plateau.regime).k, 1, *g);
  std::mt19937_64 gen(2024);
  const double eps = 1e-5;
  for (int rep = 0; rep < 20; ++rep) {
    const Profile<double> u(g, random_interior(gen, g->size(), 0.05, 1.2));
    const Profile<double> v(g, random_interior(gen, g->size(), -0.5, 0.5));
    const Vector<double> h = random_interior(gen, g->size(), -1.0, 1.0);
    auto shifted = [&](const Profile<double>& base, double e) { return Profile<double>(g, base.values + e * h); };

    const double fd_log = (action_log(log_zero, shifted(u, eps)) - action_log(log_zero, shifted(u, -eps))) / (2 * eps);
    CHECK(inner(*g, gradient(log_zero, u), h) == Approx(fd_log).epsilon(1e-5));

    const double fd_sat = (action_sat(sat, shifted(u, eps)) - action_sat(sat, shifted(u, -eps))) / (2 * eps);
    CHECK(inner(*g, gradient(sat, u), h) == Approx(fd_sat).epsilon(1e-5));

    const double fd_pl =
        (action_plateau(plateau, shifted(v, eps), hom) - action_plateau(plateau, shifted(v, -eps), hom)) / (2 * eps);
    CHECK(inner(*g, gradient(plateau, v, hom), h) == Approx(fd_pl).epsilon(1e-5));
  }
}

TEST_CASE("gradient special cases") {
  const auto g = make_grid(20.0, 400);
  CHECK(gradient(log_zero, zero_profile(g)).cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 gen(3);
  const Profile<double> u(g, random_interior(gen, g->size(), 0.0, 1.0));
  const auto grad = gradient(log_zero, u);
  CHECK(grad[0] == 0.0);
  CHECK(grad[g->size() - 1] == 0.0);
  // beam power is quadratic: its r dr gradient is 4 pi u
  const Vector<double> dP = beam_power_derivative(u);
  for (Eigen::Index i = 1; i + 1 < g->size(); ++i) CHECK(dP[i] / g->weight(i) == Approx(4 * oracle::pi * u[i]));
}

TEST_CASE("residual of the zero profile and of an exact solution of the linear problem") {
  const auto g = make_grid(20.0, 800);
  CHECK(el_residual(log_zero, zero_profile(g), 0.2).cwiseAbs().maxCoeff() == 0.0);
  // with u tiny the nonlinearity is negligible and u = I_1(kappa r) solves the
  // linear equation u'' + u'/r - u/r^2 - kappa^2 u = 0
  const double kappa = std::sqrt(0.4);
  double prev = 0;
  for (Eigen::Index N : {400, 800, 1600}) {
    const auto gg = make_grid(5.0, N);
    const auto u = sample(gg, [&](double r) { return 1e-30 * std::cyl_bessel_i(1.0, kappa * r); });
    const auto res = el_residual(log_zero, u, 0.2);
    const double err = scaled_residual_norm(u, res);
    if (N > 400) CHECK(std::log2(prev / err) == Approx(2.0).epsilon(0.1));
    prev = err;
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "vortex/analysis.hpp"

using namespace vortex;
using doctest::Approx;

TEST_CASE("decay fit recovers a synthetic exponential") {
  const auto g = make_grid(60.0, 6000);
  Vector<double> u(g->size());
  for (Eigen::Index i = 0; i < g->size(); ++i) {
    const double r = g->node(i);
    u[i] = r <= 1.0 ? r : std::exp(-0.6325 * (r - 1.0));
  }
  u[0] = 0.0;
  const DecayFit fit = fit_decay(Profile<double>(g, u), 0.2);
  CHECK(fit.rate == Approx(0.6325).epsilon(1e-3 / 0.6325));
  CHECK(fit.rsquared >= 0.999);
  CHECK(fit.rsquared <= 1.0);
  CHECK(fit.r_lo < fit.r_hi);
  CHECK(fit.r_hi <= 60.0);
  CHECK(fit.predicted_rate == Approx(oracle::sqrt_04).epsilon(1e-15));
  CHECK(fit.points >= 3);
}

TEST_CASE("decay fit refuses an empty window") {
  const auto g = make_grid(2.0, 100);
  Vector<double> u(g->size());
  for (Eigen::Index i = 0; i < g->size(); ++i) u[i] = g->node(i) * (2.0 - g->node(i));
  CHECK_THROWS_AS(fit_decay(Profile<double>(g, u), 0.2), DomainError);
  try {
    fit_decay(Profile<double>(g, u), 0.2);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("increase R") != std::string::npos);
  }
}

TEST_CASE("omega bound") {
  const auto b = omega_bound(1.0, 3.0, 1, 4 * oracle::pi / 3);
  CHECK(b.lower == Approx(oracle::omega_bound_canonical).epsilon(1e-14));
  CHECK(b.lower == Approx(-3.68053).epsilon(1e-4));
  CHECK(b.saturation_term == Approx(4.0 / 27).epsilon(1e-15));
  CHECK(b.upper == 0.0);
  CHECK(b.lower < 0.0);
  double prev = 0.0;
  for (int n : {1, 2, 3}) {
    const double l = omega_bound(1.0, 3.0, n, 1.0).lower;
    CHECK(l < prev);
    prev = l;
  }
  // larger power tightens the bound
  CHECK(omega_bound(1.0, 3.0, 1, 10.0).lower > omega_bound(1.0, 3.0, 1, 1.0).lower);
  CHECK_THROWS_AS(omega_bound(0.0, 3.0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(omega_bound(1.0, 2.0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(omega_bound(1.0, 3.0, 0, 1.0), DomainError);
  CHECK_THROWS_AS(omega_bound(1.0, 3.0, 1, -1.0), DomainError);
}

TEST_CASE("bound membership") {
  const auto b = omega_bound(1.0, 3.0, 1, 4 * oracle::pi / 3);
  CHECK(check_omega_in_bound(-0.02, b));
  CHECK(check_omega_in_bound(b.lower, b));
  CHECK_FALSE(check_omega_in_bound(0.1, b));
  CHECK_FALSE(check_omega_in_bound(0.0, b));
  CHECK_FALSE(check_omega_in_bound(b.lower - 1.0, b));
}

TEST_CASE("saturation term against a grid search") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ds(0.1, 5.0), dg(2.1, 6.0);
  for (int i = 0; i < 20; ++i) {
    const double s = ds(gen), g = dg(gen);
    CHECK(saturation_max_by_search(s, g) == Approx(omega_bound(s, g, 1, 1.0).saturation_term).epsilon(1e-6));
  }
}

TEST_CASE("argmin of Q") {
  CHECK(argmin_Q(0.2, 1.0, 1.0) == Approx(oracle::argmin_Q_omega02).epsilon(1e-7));
  CHECK(Q_aux(argmin_Q(0.2, 1.0, 1.0), 0.2, 1.0, 1.0) == Approx(oracle::min_Q_omega02).epsilon(1e-13));
  CHECK(Q_aux(1.0, 0.2, 1.0, 1.0) < 0.0);
  CHECK_THROWS_AS(argmin_Q(0.31, 1.0, 1.0), DomainError);
}

TEST_CASE("trial profile") {
  const auto g = make_grid(20.0, 2000);
  const auto v = trial_v(1.0, 0.5, 8.0, g);
  CHECK(v[0] == 0.0);
  CHECK(v[g->nearest(0.5)] == Approx(0.5));
  CHECK(v[g->nearest(5.0)] == 1.0);
  CHECK(v[g->nearest(10.0)] == Approx(std::exp(-1.0)));
  CHECK(v.back() == 0.0);
  CHECK_THROWS_AS(trial_v(0.0, 0.5, 8.0, g), DomainError);
  CHECK_THROWS_AS(trial_v(1.0, 0.5, 0.5, g), DomainError);
}

TEST_CASE("negative action certificate") {
  const auto p = log_zero_problem(1.0, 1.0, 1, 0.2, 20.0);
  const auto cert = certify_negative_action(p);
  CHECK(cert.success);
  CHECK(cert.action < 0.0);
  CHECK(cert.k == Approx(oracle::argmin_Q_omega02).epsilon(1e-7));
  CHECK(cert.lambda == Approx(oracle::sqrt_04).epsilon(1e-15));
  CHECK(cert.radii.size() == cert.actions.size());
  CHECK(cert.doublings <= 20);
  const auto k1 = certify_negative_action(p, 1.0);
  CHECK(k1.success);
  CHECK(k1.k == 1.0);
  CHECK_THROWS_AS(certify_negative_action(p, 0.3), DomainError);  // Q(0.3) > 0
  CHECK_THROWS_AS(certify_negative_action(sat_constrained_problem(1.0, 3.0, 1, 1.0, 20.0)), DomainError);
}

TEST_CASE("action ratio grows toward a negative limit") {
  const auto p = log_zero_problem(1.0, 1.0, 1, 0.2, 20.0);
  const double k = argmin_Q(0.2, 1.0, 1.0);
  const auto seq = action_ratio_sequence(p, k, std::sqrt(0.4), {8.0, 16.0, 32.0, 64.0});
  for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] < seq[i - 1]);
  CHECK(seq.back() < 0.0);
}

TEST_CASE("plateau segment integral") {
  // v = k on the segment, so only the centrifugal part contributes
  const auto s = plateau_segment_integral(1.0, 1, 10.0, 20000);
  CHECK(s.quadrature == Approx(std::log(10.0)).epsilon(1e-6));
  CHECK(s.log_term == Approx(std::log(10.0)).epsilon(1e-15));
  CHECK(s.stated == Approx(9.5 + std::log(10.0)).epsilon(1e-15));
  CHECK_THROWS_AS(plateau_segment_integral(1.0, 1, 0.5, 100), DomainError);
}

TEST_CASE("tent certificate") {
  const auto t = tent_certificate(1.0, 3.0, 1, 1.0, 1.0);
  CHECK(t.power == Approx(4 * oracle::pi / 3).epsilon(1e-6));
  CHECK(t.power_exact == Approx(4 * oracle::pi / 3).epsilon(1e-15));
  CHECK(t.action_bound == Approx(oracle::tent_J_bound).epsilon(1e-14));
  CHECK(t.action == Approx(oracle::tent_J_exact).epsilon(1e-6));
  CHECK(t.bound_holds);
  CHECK(t.optimized_bound == Approx(oracle::tent_optimized_bound).epsilon(1e-14));
  CHECK(t.optimized_bound_numeric == Approx(t.optimized_bound).epsilon(1e-10));
  // power error falls at second order in the grid
  double prev = 0;
  for (Eigen::Index N : {500, 1000, 2000}) {
    const auto c = tent_certificate(1.0, 3.0, 1, 0.7, 1.3, N);
    const double err = std::abs(c.power - c.power_exact);
    if (N > 500) CHECK(std::log2(prev / err) == Approx(2.0).epsilon(0.1));
    prev = err;
  }
  CHECK_THROWS_AS(tent_certificate(1.0, 3.0, 1, 0.0, 1.0), DomainError);
}

TEST_CASE("plateau certificate on the cutoff alone") {
  const auto p = log_plateau_problem(1.0, 1.0, 1, 0.1, 40.0);
  const auto g = make_grid(40.0, 4000);
  const double k = std::get<ZeroPlateau<double>>(p.regime).k;
  SolveReport rep;
  rep.profile = plateau_amplitude(zero_profile(g), make_homogenization(k, 1, *g));
  const auto c = plateau_certificate(p, rep);
  CHECK(c.passed);
  CHECK(c.core_zero);
  CHECK(c.max_tail_deviation == 0.0);
  CHECK(c.max_tail_g < 1e-12);
  CHECK_THROWS_AS(plateau_certificate(log_zero_problem(1.0, 1.0, 1, 0.2, 20.0), rep), DomainError);
}

TEST_CASE("coercivity constant is positive around the plateau value") {
  for (double omega : {0.05, 0.1, 0.2}) {
    const double k = k_plateau(1.0, 1.0, omega);
    CHECK(coercivity_constant(omega, 1.0, 1.0, k, -3.0, 3.0, 60001) > 0.0);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "vortex/shooting.hpp"
#include "vortex/solver.hpp"

using namespace vortex;
using doctest::Approx;

namespace {

const auto log_zero = log_zero_problem(1.0, 1.0, 1, 0.2, 20.0);
const auto sat = sat_constrained_problem(1.0, 3.0, 1, 4 * oracle::pi / 3, 20.0);

// index of the maximum, and the number of sign changes of the forward
// difference on either side of it
struct Shape {
  Eigen::Index peak;
  int rises_after_peak;
  int falls_before_peak;
};

Shape shape(const Profile<double>& u) {
  Shape s{0, 0, 0};
  u.values.maxCoeff(&s.peak);
  for (Eigen::Index i = s.peak + 1; i < u.size(); ++i)
    if (u[i] > u[i - 1]) ++s.rises_after_peak;
  for (Eigen::Index i = 1; i <= s.peak; ++i)
    if (u[i] < u[i - 1]) ++s.falls_before_peak;
  return s;
}

}  // namespace

TEST_CASE("zero launch slope gives the zero profile") {
  const auto g = make_grid(20.0, 400);
  const Shot s = shoot(log_zero, 0.2, 0.0, g);
  CHECK(s.profile.max_abs() == 0.0);
  CHECK(s.status == ShotStatus::Reached);
}

TEST_CASE("small launch slope follows the modified Bessel function") {
  // the nonlinearity is negligible for tiny amplitudes, so u = (2c/kappa) I_1(kappa r)
  const double kappa = std::sqrt(0.4);
  const double c = 1e-8;
  const auto g = make_grid(20.0, 2000);
  const Shot s = shoot(log_zero, 0.2, c, g);
  CHECK(s.status == ShotStatus::Reached);
  for (Eigen::Index i = 1; i < g->size(); i += 50) {
    const double r = g->node(i);
    CHECK(s.profile[i] == Approx(2 * c / kappa * std::cyl_bessel_i(1.0, kappa * r)).epsilon(1e-6));
  }
  // indicial behaviour u / r -> c at the core
  CHECK(s.profile[1] / g->node(1) == Approx(c).epsilon(1e-4));
}

TEST_CASE("undershoot and overshoot on either side of the matched slope") {
  const auto g = make_grid(20.0, 2000);
  CHECK(shoot(log_zero, 0.2, 0.3, g).status == ShotStatus::Crossed);
  CHECK(shoot(log_zero, 0.2, 0.4, g).status == ShotStatus::BlewUp);
  const Shot under = shoot(log_zero, 0.2, 0.3, g);
  CHECK(under.crossing_radius > 0.0);
  CHECK(under.crossing_radius < 20.0);
  CHECK(under.steps > 0);
}

TEST_CASE("matched profile for the logarithmic problem") {
  const auto g = make_grid(20.0, 4000);
  const ShootMatch m = shoot_match(log_zero, 0.2, g);
  const auto& u = m.profile;
  CHECK(m.end_ratio < 1e-8);
  CHECK(m.c_under < m.c_over);
  CHECK(u[0] == 0.0);
  for (Eigen::Index i = 1; i + 1 < u.size(); ++i) REQUIRE(u[i] > 0.0);
  const Shape s = shape(u);
  CHECK(s.rises_after_peak == 0);
  CHECK(s.falls_before_peak == 0);
  // r u' -> 0 at the three innermost nodes, scaled by the peak
  const Vector<double> du = differentiate(*g, u.values);
  for (Eigen::Index i = 1; i <= 3; ++i) CHECK(std::abs(g->node(i) * du[i]) / u.max_abs() < 1e-2);
  CHECK(std::abs(g->node(1) * du[1]) < std::abs(g->node(3) * du[3]));
}

TEST_CASE("matched profile for the saturable problem") {
  const SolveReport rep = solve(sat, SolverConfig{});
  const ShootMatch m = shoot_match(sat, rep.omega, rep.profile.grid);
  const Vector<double> a = m.profile.values / m.profile.max_abs();
  const Vector<double> b = rep.profile.values / rep.profile.max_abs();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-3);
  const Shape s = shape(m.profile);
  CHECK(s.rises_after_peak == 0);
  // monotone far field
  const Vector<double> du = differentiate(*m.profile.grid, m.profile.values);
  for (Eigen::Index i = s.peak + 1; i < m.profile.size(); ++i) CHECK(du[i] < 0.0);
}

TEST_CASE("shooting preconditions") {
  const auto g = make_grid(20.0, 400);
  CHECK_THROWS_AS(shoot(sat, 0.1, 1.0, g), DomainError);
  CHECK_THROWS_AS(shoot(log_plateau_problem(1.0, 1.0, 1, 0.1, 40.0), 0.1, 1.0, g), DomainError);
  CHECK_THROWS_AS(shoot(log_zero, 0.2, std::nan(""), g), DomainError);
  ShootOptions opt;
  opt.max_doublings = 2;
  CHECK_THROWS_AS(shoot_match(log_zero, 0.2, g, opt), SolveError);
}

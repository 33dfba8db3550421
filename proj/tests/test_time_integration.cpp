#include <doctest.h>

#include <cmath>

#include "cdlab/errors.hpp"
#include "cdlab/time_integration.hpp"

using namespace cdlab;

namespace {
// phi_dot = lambda phi, one unknown.
ImplicitSolve scalar_solver(double lambda) {
  return [lambda](const StepState& s, const AlphaParams& a) {
    // rate_{n+am} = lambda phi_{n+af}, written for phi_{n+1}.
    const double cm = a.rate_coefficient();
    const double r_hist = (1.0 - a.alpha_m / a.gamma) * s.rate[0] - cm * s.phi[0];
    const double rhs = lambda * (1.0 - a.alpha_f) * s.phi[0] - r_hist;
    Eigen::VectorXd x(1);
    x[0] = rhs / (cm - lambda * a.alpha_f);
    return x;
  };
}
}  // namespace

TEST_SUITE("time_integration") {

TEST_CASE("presets and flags") {
  const auto cn = make_alpha(AlphaPreset::CrankNicolson, 0.1);
  CHECK(cn.alpha_f == 0.5);
  CHECK(cn.alpha_m == 0.5);
  CHECK(cn.gamma == 0.5);
  CHECK(cn.second_order());
  CHECK(cn.energy_decaying());
  const auto be = make_alpha("backward-euler", 0.1);
  CHECK(be.alpha_f == 1.0);
  CHECK(be.alpha_m == 1.0);
  CHECK(be.gamma == 1.0);
  const auto ed = make_alpha(0.6, 0.5, 0.5, 0.1);
  CHECK(ed.energy_decaying());
  CHECK_FALSE(ed.second_order());
  CHECK(make_alpha(AlphaPreset::EnergyDecaying, 0.1, 0.75).alpha_f == 0.75);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(make_alpha(0.5, 0.0, 0.5, 0.1), ValidationError);
  CHECK_THROWS_AS(make_alpha(0.5, 0.5, 1.5, 0.1), ValidationError);
  CHECK_THROWS_AS(make_alpha(0.5, 0.5, 0.5, 0.0), ValidationError);
  CHECK_THROWS_AS(make_alpha("nope", 0.1), ValidationError);
}

TEST_CASE("alpha-level combinations") {
  const auto a = make_alpha(0.7, 0.6, 0.55, 0.2);
  StepState s{Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, -1.0), 0.0};
  const Eigen::VectorXd next = Eigen::VectorXd::Constant(1, 3.0);
  const Eigen::VectorXd rn = rate_at_next(a, s, next);
  CHECK(next[0] == doctest::Approx(2.0 + 0.2 * (0.45 * -1.0 + 0.55 * rn[0])).epsilon(1e-14));
  CHECK(value_at_alpha(a, s, next)[0] == doctest::Approx(0.3 * 2.0 + 0.7 * 3.0));
  CHECK(rate_at_alpha(a, s, next)[0] == doctest::Approx(0.4 * -1.0 + 0.6 * rn[0]));
}

TEST_CASE("constant solution stays constant") {
  const auto a = make_alpha(AlphaPreset::CrankNicolson, 0.1);
  StepState s{Eigen::VectorXd::Constant(1, 4.2), Eigen::VectorXd::Zero(1), 0.0};
  for (int n = 0; n < 20; ++n) s = advance(s, a, scalar_solver(0.0));
  CHECK(s.phi[0] == doctest::Approx(4.2).epsilon(1e-14));
  CHECK(s.time == doctest::Approx(2.0));
}

TEST_CASE("Crank-Nicolson amplification factor") {
  const double lambda = -3.0, dt = 0.1;
  const auto a = make_alpha(AlphaPreset::CrankNicolson, dt);
  StepState s{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, lambda), 0.0};
  const double g = (1.0 + lambda * dt / 2.0) / (1.0 - lambda * dt / 2.0);
  double ref = 1.0;
  for (int n = 0; n < 30; ++n) {
    s = advance(s, a, scalar_solver(lambda));
    ref *= g;
    CHECK(s.phi[0] == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("energy-decaying step does not grow") {
  const auto a = make_alpha(0.75, 0.5, 0.5, 0.2);
  StepState s{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -2.0), 0.0};
  for (int n = 0; n < 50; ++n) {
    const double before = std::abs(s.phi[0]);
    s = advance(s, a, scalar_solver(-2.0));
    CHECK(std::abs(s.phi[0]) <= before);
    const StepState& t = s;
    CHECK(std::isfinite(t.phi[0]));
  }
}

}

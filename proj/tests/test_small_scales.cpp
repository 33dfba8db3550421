#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cdlab/checks.hpp"
#include "cdlab/errors.hpp"
#include "cdlab/small_scales.hpp"
#include "cdlab/stabilization.hpp"

using namespace cdlab;
using checks::direct_small_scale_step;

TEST_SUITE("small_scales") {

TEST_CASE("static evaluation") {
  CHECK(static_evaluate(0.0, 0.3) == 0.0);
  CHECK(static_evaluate(5.0, 0.02) == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(static_evaluate(-2.0, 0.1) > 0.0);
}

TEST_CASE("fixed point is preserved") {
  const auto a = make_alpha(0.7, 0.5, 0.5, 0.03);
  const double tau = 0.04, r = 1.7;
  const auto m = condensation_coefficients(a, tau);
  CHECK(m.value_at_alpha(-tau * r, 0.0, r) == doctest::Approx(-tau * r).epsilon(1e-14));
  CHECK(std::abs(m.rate_at_alpha(-tau * r, 0.0, r)) <= 1e-13);
  SmallScaleField f(SmallScaleMode::Dynamic, 1);
  f.value[0] = -tau * r;
  commit_step(f, m, std::vector<double>{r});
  CHECK(std::abs(f.rate[0]) <= 1e-13);
  CHECK(f.value[0] == doctest::Approx(-tau * r).epsilon(1e-14));
}

TEST_CASE("slope is the effective tau") {
  const auto a = make_alpha(AlphaPreset::CrankNicolson, 0.02);
  const double tau = 0.03;
  const auto m = condensation_coefficients(a, tau);
  const double eff = 1.0 / (1.0 / tau_time(a) + 1.0 / tau);
  CHECK(-m.slope_value == doctest::Approx(eff).epsilon(1e-14));
  CHECK(-m.slope_rate == doctest::Approx(eff / tau_time(a)).epsilon(1e-14));
  const double d = 1e-3;
  const double v0 = m.value_at_alpha(0.2, -0.4, 1.0);
  const double v1 = m.value_at_alpha(0.2, -0.4, 1.0 + d);
  CHECK((v1 - v0) / d == doctest::Approx(-eff).epsilon(1e-10));
}

TEST_CASE("zero history and zero residual") {
  const auto m = condensation_coefficients(make_alpha(AlphaPreset::CrankNicolson, 0.1), 0.2);
  CHECK(m.value_at_alpha(0, 0, 0) == 0.0);
  CHECK(m.rate_at_alpha(0, 0, 0) == 0.0);
  SmallScaleField f(SmallScaleMode::Dynamic, 5);
  for (int n = 0; n < 100; ++n) commit_step(f, m, std::vector<double>(5, 0.0));
  for (double v : f.value) CHECK(v == 0.0);
}

TEST_CASE("maps agree with the direct two-unknown solve") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> half(0.5, 1.0), u(-1.0, 1.0), lg(-3.0, 0.0);
  for (int k = 0; k < 100; ++k) {
    const auto a = make_alpha(half(rng), half(rng), half(rng), std::pow(10.0, lg(rng)));
    const double tau = std::pow(10.0, lg(rng));
    const double v = u(rng), r = u(rng), res = u(rng);
    const auto m = condensation_coefficients(a, tau);
    const auto next = direct_small_scale_step(a, tau, v, r, res);
    const double scale = std::abs(v) + a.dt * std::abs(r) + tau * std::abs(res);
    CHECK(std::abs(m.value_at_alpha(v, r, res) - ((1 - a.alpha_f) * v + a.alpha_f * next[0])) <= 1e-13 * scale);
    SmallScaleField f(SmallScaleMode::Dynamic, 1);
    f.value[0] = v;
    f.rate[0] = r;
    commit_step(f, m, std::vector<double>{res});
    CHECK(std::abs(f.value[0] - next[0]) <= 1e-13 * scale);
    CHECK(std::abs(f.rate[0] - next[1]) <= 1e-13 * (scale / std::min(tau, a.dt) + std::abs(r) + std::abs(res)));
    // gamma update holds by construction
    CHECK(f.value[0] == doctest::Approx(v + a.dt * ((1 - a.gamma) * r + a.gamma * f.rate[0])).epsilon(1e-13));
  }
}

TEST_CASE("long-time limit") {
  const auto a = make_alpha(0.75, 0.5, 0.5, 0.01);
  const double tau = 0.05;
  const auto m = condensation_coefficients(a, tau);
  SmallScaleField f(SmallScaleMode::Dynamic, 1);
  for (int n = 0; n < 10000; ++n) commit_step(f, m, std::vector<double>{2.0});
  CHECK(std::abs(f.value[0] + tau * 2.0) <= 1e-10);
}

TEST_CASE("batched condensation matches the per-point map") {
  const auto m = condensation_coefficients(make_alpha(0.6, 0.55, 0.52, 0.07), 0.11);
  SmallScaleField f(SmallScaleMode::Dynamic, 13);
  std::vector<double> res(13), va(13), ra(13);
  for (int i = 0; i < 13; ++i) {
    f.value[i] = 0.1 * i;
    f.rate[i] = -0.05 * i;
    res[i] = std::sin(i);
  }
  condense(m, f, res, va, ra);
  for (int i = 0; i < 13; ++i) {
    CHECK(va[i] == doctest::Approx(m.value_at_alpha(f.value[i], f.rate[i], res[i])).epsilon(1e-14));
    CHECK(ra[i] == doctest::Approx(m.rate_at_alpha(f.value[i], f.rate[i], res[i])).epsilon(1e-14));
  }
}

TEST_CASE("errors and initialization") {
  const auto a = make_alpha(AlphaPreset::CrankNicolson, 0.1);
  CHECK_THROWS_AS(condensation_coefficients(a, 0.0), ValidationError);
  CHECK_THROWS_AS(condensation_coefficients(make_alpha(0.0, 1.0, 1.0, 0.1), 0.1), ValidationError);
  const auto m = condensation_coefficients(a, 0.1);
  SmallScaleField s(SmallScaleMode::Static, 2);
  CHECK_THROWS_AS(commit_step(s, m, std::vector<double>(2, 0.0)), ValidationError);
  SmallScaleField d(SmallScaleMode::Dynamic, 2);
  CHECK_THROWS_AS(commit_step(d, m, std::vector<double>(3, 0.0)), ValidationError);
  initialize_dynamic(d, std::vector<double>{1.5, -2.0});
  CHECK(d.value[0] == 0.0);
  CHECK(d.rate[0] == -1.5);
  CHECK(d.rate[1] == 2.0);

  std::ostringstream out;
  write_field_csv(out, d, 1);
  CHECK(out.str().rfind("element,point,value,rate\n", 0) == 0);
}

}

#include <doctest.h>

#include <cmath>
#include <random>

#include "cdlab/errors.hpp"
#include "cdlab/stabilization.hpp"

using namespace cdlab;

namespace {
Eigen::Matrix2d metric(double h) {
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  g(0, 0) = g(1, 1) = 4.0 / (h * h);
  return g;
}
}  // namespace

TEST_SUITE("stabilization") {

TEST_CASE("components") {
  StabilizationParams p;
  p.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.1);
  const auto c = tau_components(p, metric(1.0 / 16.0));
  CHECK(c.time_inv2 == doctest::Approx(400.0).epsilon(1e-14));
  CHECK(c.conv_inv2 == doctest::Approx(2048.0).epsilon(1e-14));
  CHECK(c.diff_inv2 == 0.0);
  p.diffusivity = 0.01;
  const auto d = tau_components(p, metric(1.0 / 16.0));
  CHECK(d.diff_inv2 == doctest::Approx(36.0 * 1e-4 * 2.0 * 1024.0 * 1024.0).epsilon(1e-14));
}

TEST_CASE("static tau with only convection active") {
  StabilizationParams p;
  p.alpha = make_alpha(AlphaPreset::CrankNicolson, 1e12);
  CHECK(tau_static(p, metric(1.0 / 16.0)) == doctest::Approx(1.0 / std::sqrt(2048.0)).epsilon(1e-10));
  CHECK(tau_dyn(p, metric(1.0 / 16.0)) == doctest::Approx(1.0 / std::sqrt(2048.0)).epsilon(1e-15));
}

TEST_CASE("r=1 combination") {
  StabilizationParams p;
  p.diffusivity = 0.003;
  p.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.02);
  p.r_switch = 1;
  const auto g = metric(0.1);
  const auto c = tau_components(p, g);
  const double ref = 1.0 / (std::sqrt(c.conv_inv2) + std::sqrt(c.diff_inv2) + std::sqrt(c.time_inv2));
  CHECK(tau_static(p, g) == doctest::Approx(ref).epsilon(1e-15));
}

TEST_CASE("effective tau") {
  StabilizationParams p;
  p.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.2);  // tau_time = 0.1
  CHECK(tau_time(p.alpha) == doctest::Approx(0.1).epsilon(1e-15));
  // a . G a = 100 gives tau_dyn = 0.1
  p.velocity = {1.0, 0.0};
  Eigen::Matrix2d g = Eigen::Matrix2d::Identity() * 100.0;
  CHECK(tau_dyn(p, g) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(tau_eff(p, g) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("r=1 effective identity over random draws") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), lg(-4.0, 0.0), half(0.5, 1.0);
  for (int k = 0; k < 1000; ++k) {
    StabilizationParams p;
    p.velocity = {u(rng), u(rng)};
    p.diffusivity = std::pow(10.0, lg(rng));
    p.alpha = make_alpha(half(rng), half(rng), half(rng), std::pow(10.0, lg(rng)));
    p.r_switch = 1;
    const auto g = metric(std::pow(10.0, lg(rng) / 2.0));
    const double lhs = 1.0 / (1.0 / tau_time(p.alpha) + 1.0 / tau_dyn(p, g));
    CHECK(std::abs(lhs - tau_static(p, g)) <= 1e-14 * tau_static(p, g));
  }
}

TEST_CASE("root-sum-square is below each time scale") {
  StabilizationParams p;
  p.diffusivity = 0.01;
  p.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.05);
  const auto g = metric(0.1);
  const auto c = tau_components(p, g);
  const double t = tau_static(p, g);
  CHECK(t <= 1.0 / std::sqrt(c.conv_inv2));
  CHECK(t <= 1.0 / std::sqrt(c.diff_inv2));
  CHECK(t <= 1.0 / std::sqrt(c.time_inv2));
}

TEST_CASE("monotone in velocity, diffusivity and inverse step") {
  StabilizationParams p;
  p.diffusivity = 0.01;
  p.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.05);
  const auto g = metric(0.1);
  const double t0 = tau_static(p, g);
  auto q = p;
  q.velocity *= 1.5;
  CHECK(tau_static(q, g) < t0);
  q = p;
  q.diffusivity *= 2.0;
  CHECK(tau_static(q, g) < t0);
  q = p;
  q.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.01);
  CHECK(tau_static(q, g) < t0);
}

TEST_CASE("degenerate stabilization") {
  StabilizationParams p;
  p.velocity = {0.0, 0.0};
  p.alpha = make_alpha(0.0, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(tau_static(p, metric(0.1)), ValidationError);
}

TEST_CASE("inverse constant") {
  CHECK(default_inverse_constant(2) == 36.0);
  CHECK(default_inverse_constant(1) == 12.0);
  const double c = inverse_estimate_constant(2);
  CHECK(c > 0.0);
  CHECK(std::isfinite(c));
}

}

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cdlab/errors.hpp"
#include "cdlab/model_problem.hpp"
#include "cdlab/spline_space.hpp"

using namespace cdlab;

TEST_SUITE("spline_space") {

TEST_CASE("quadratic midpoint values") {
  const SplineSpace1D s(2, 8);
  for (int e = 0; e < 8; ++e) {
    const auto b = eval_basis_1d(s, e, 0.0);
    REQUIRE(b.size() == 3);
    CHECK(b[0].value == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(b[1].value == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(b[2].value == doctest::Approx(0.125).epsilon(1e-15));
  }
}

TEST_CASE("linear hat at the left knot") {
  const SplineSpace1D s(1, 5);
  const auto b = eval_basis_1d(s, 2, -1.0);
  CHECK(b[0].value == 1.0);
  CHECK(b[1].value == 0.0);
}

TEST_CASE("active functions wrap periodically") {
  const SplineSpace1D s(2, 6);
  CHECK(s.active_functions(0) == std::vector<int>{4, 5, 0});
  CHECK(s.active_functions(5) == std::vector<int>{3, 4, 5});
  CHECK(s.num_functions() == 6);
  CHECK_THROWS_AS(eval_basis_1d(s, 6, 0.0), std::out_of_range);
  CHECK_THROWS_AS(SplineSpace1D(3, 6), ValidationError);
  CHECK_THROWS_AS(SplineSpace1D(2, 2), ValidationError);
}

TEST_CASE("partition of unity, non-negativity, derivative sums") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p : {1, 2}) {
    const SplineSpace2D s(p, 7, 5);
    const double h = std::min(s.x().h(), s.y().h());
    for (int k = 0; k < 1000; ++k) {
      const auto [ex, xi] = s.x().locate(u(rng));
      const auto [ey, eta] = s.y().locate(u(rng));
      const auto b = eval_basis_2d(s, ex, ey, xi, eta);
      double sv = 0, gx = 0, gy = 0, lap = 0;
      for (const auto& v : b) {
        CHECK(v.value >= 0.0);
        sv += v.value;
        gx += v.grad.x();
        gy += v.grad.y();
        lap += v.laplacian;
      }
      CHECK(std::abs(sv - 1.0) <= 1e-13);
      CHECK(std::abs(gx) <= 1e-11 / h);
      CHECK(std::abs(gy) <= 1e-11 / h);
      CHECK(std::abs(lap) <= 1e-9 / (h * h));
    }
  }
}

TEST_CASE("centre value of the centred biquadratic function") {
  const SplineSpace2D s(2, 4, 4);
  const auto b = eval_basis_2d(s, 1, 1, 0.0, 0.0);
  CHECK(b[4].value == doctest::Approx(9.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("derivatives agree with finite differences") {
  const SplineSpace1D s(2, 9, 1.3);
  const double h = s.h();
  const double dxi = 2.0 * 1e-6;  // step 1e-6 h in x
  for (int e = 0; e < 9; ++e) {
    for (double xi : {-0.7, -0.1, 0.4, 0.85}) {
      const auto c = eval_basis_1d(s, e, xi);
      const auto lo = eval_basis_1d(s, e, xi - dxi);
      const auto hi = eval_basis_1d(s, e, xi + dxi);
      for (int k = 0; k < 3; ++k) {
        const double fd1 = (hi[k].value - lo[k].value) / (2e-6 * h);
        const double fd2 = (hi[k].d1 - lo[k].d1) / (2e-6 * h);
        CHECK(fd1 == doctest::Approx(c[k].d1).epsilon(1e-5).scale(1.0 / h));
        CHECK(fd2 == doctest::Approx(c[k].d2).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("periodicity of point evaluation") {
  const SplineSpace2D s(2, 6, 6);
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(36, -1.0, 2.0);
  const std::span<const double> cs(c.data(), 36);
  for (double x : {0.03, 0.41, 0.77}) {
    CHECK(s.evaluate_field(cs, x, 0.2) == doctest::Approx(s.evaluate_field(cs, x + 1.0, 0.2)).epsilon(1e-14));
    CHECK(s.evaluate_field(cs, 0.3, x) == doctest::Approx(s.evaluate_field(cs, 0.3, x + 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("connectivity is unique and in range") {
  const SplineSpace2D s(2, 5, 4);
  for (int e = 0; e < s.num_elements(); ++e) {
    auto c = std::vector<int>(s.connectivity(e).begin(), s.connectivity(e).end());
    REQUIRE(c.size() == 9);
    std::sort(c.begin(), c.end());
    CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
    CHECK(c.front() >= 0);
    CHECK(c.back() < s.num_functions());
  }
}

TEST_CASE("projection reproduces the span") {
  const SplineSpace2D s(2, 8, 8);
  const Eigen::VectorXd ones = project_l2(s, [](double, double) { return 1.0; });
  CHECK((ones.array() - 1.0).abs().maxCoeff() <= 1e-12);

  const int j = 19;
  Eigen::VectorXd ej = Eigen::VectorXd::Zero(64);
  ej[j] = 1.0;
  const ScalarField2D nj = [&](double x, double y) { return s.evaluate_field({ej.data(), 64}, x, y); };
  const Eigen::VectorXd c = project_l2(s, nj);
  CHECK((c - ej).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("block initial condition is exact on the 16x16 mesh") {
  const BlockIC ic;
  const SplineSpace2D s(2, 16, 16);
  const ScalarField2D f = [&](double x, double y) { return block_ic_value(ic, x, y); };
  const Eigen::VectorXd c = project_l2(s, f);
  CHECK(l2_distance(s, {c.data(), static_cast<std::size_t>(c.size())}, f) <= 1e-12);
}

}

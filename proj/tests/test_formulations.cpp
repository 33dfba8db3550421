#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "cdlab/checks.hpp"
#include "cdlab/energy_diagnostics.hpp"
#include "cdlab/errors.hpp"
#include "cdlab/formulations.hpp"
#include "cdlab/model_problem.hpp"
#include "cdlab/run.hpp"
#include "cdlab/simulation.hpp"

using namespace cdlab;

namespace {

PhysicsParams physics(double kappa = 0.02) {
  PhysicsParams p;
  p.diffusivity = kappa;
  return p;
}

Discretization make(FormulationKind kind, int m = 6, int p = 2, double kappa = 0.02,
                    AlphaParams a = make_alpha(0.7, 0.6, 0.55, 0.05)) {
  PhysicsParams ph = physics(kappa);
  ph.inverse_constant = default_inverse_constant(p);
  return Discretization(QuadratureGrid(SplineSpace2D(p, m, m)), kind, ph, a);
}

LevelState random_state(const Discretization& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = d.num_phi();
  const auto npts = static_cast<std::size_t>(d.grid().num_points());
  LevelState s;
  s.large.phi = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  s.large.rate = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  const auto& tr = d.kind_traits();
  s.small = SmallScaleField(tr.stabilized ? tr.mode : SmallScaleMode::Static, npts);
  if (tr.stabilized && tr.mode == SmallScaleMode::Dynamic) {
    for (std::size_t i = 0; i < npts; ++i) {
      s.small.value[i] = 0.1 * u(rng);
      s.small.rate[i] = u(rng);
    }
  }
  return s;
}

std::vector<double> zeros(const Discretization& d) {
  return std::vector<double>(static_cast<std::size_t>(d.grid().num_points()), 0.0);
}

Eigen::VectorXd block_phi(const SplineSpace2D& s) {
  const BlockIC ic;
  return project_l2(s, [&](double x, double y) { return block_ic_value(ic, x, y); });
}

}  // namespace

TEST_SUITE("formulations") {

TEST_CASE("names round-trip") {
  for (auto k : kAllFormulations) CHECK(parse_formulation(short_name(k)) == k);
  CHECK_THROWS_AS(parse_formulation("supg"), ValidationError);
  CHECK(traits(FormulationKind::VmsStatic).weight_sign == 1.0);
  CHECK(traits(FormulationKind::SupgStatic).weight_sign == 0.0);
  CHECK(traits(FormulationKind::GlsDynamic).weight_sign == -1.0);
  CHECK(traits(FormulationKind::SupgDynamicInconsistent).residual_diffusion == 0.0);
  CHECK(traits(FormulationKind::DynamicOrthogonal).multiplier);
  CHECK(is_dynamic(FormulationKind::VmsDynamic));
  CHECK(is_static(FormulationKind::GlsStatic));
}

TEST_CASE("DO requires positive diffusivity") {
  try {
    make(FormulationKind::DynamicOrthogonal, 6, 2, 0.0);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("DO requires positive diffusivity") != std::string::npos);
  }
}

TEST_CASE("assembled matrix reproduces the weak residual") {
  std::mt19937_64 rng(17);
  for (auto kind : kAllFormulations) {
    CAPTURE(short_name(kind));
    const auto d = make(kind);
    const LevelState s = random_state(d, rng);
    std::vector<double> f(static_cast<std::size_t>(d.grid().num_points()));
    for (auto& v : f) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto sys = assemble(d, s, f);
    CHECK(sys.layout.size() == d.num_unknowns());
    const Eigen::VectorXd x = Eigen::VectorXd::Random(d.num_unknowns());
    const Eigen::VectorXd lhs = sys.matrix * x - sys.rhs;
    const Eigen::VectorXd rhs = weak_residual(d, s, x, f);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("matches the dense oracle") {
  for (auto kind : {FormulationKind::VmsStatic, FormulationKind::GlsDynamic, FormulationKind::DynamicOrthogonal}) {
    checks::OracleProblem pb;
    pb.kind = kind;
    pb.alpha = make_alpha(AlphaPreset::CrankNicolson, 0.125);
    const auto d = make(kind, 4, 2, pb.diffusivity, pb.alpha);
    const Eigen::MatrixXd a(assemble_matrix(d));
    CHECK((a - checks::oracle_matrix(pb)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("linear basis: static stabilized matrices coincide") {
  const Eigen::MatrixXd supg(assemble_matrix(make(FormulationKind::SupgStatic, 8, 1)));
  const Eigen::MatrixXd vms(assemble_matrix(make(FormulationKind::VmsStatic, 8, 1)));
  const Eigen::MatrixXd gls(assemble_matrix(make(FormulationKind::GlsStatic, 8, 1)));
  CHECK((supg - vms).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((supg - gls).cwiseAbs().maxCoeff() <= 1e-14);
  const Eigen::MatrixXd quad_supg(assemble_matrix(make(FormulationKind::SupgStatic, 8, 2)));
  const Eigen::MatrixXd quad_vms(assemble_matrix(make(FormulationKind::VmsStatic, 8, 2)));
  CHECK((quad_supg - quad_vms).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("Galerkin convection is skew without diffusion") {
  const auto a = make_alpha(AlphaPreset::CrankNicolson, 0.05);
  const auto d = make(FormulationKind::Galerkin, 7, 2, 0.0, a);
  const Eigen::SparseMatrix<double> k = (assemble_matrix(d) - a.rate_coefficient() * mass_matrix(d.grid())) / a.alpha_f;
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd c = Eigen::VectorXd::Random(d.num_phi());
    CHECK(std::abs(c.dot(k * c)) <= 1e-12 * c.squaredNorm());
  }
}

TEST_CASE("sparsity follows B-spline overlap") {
  const auto d = make(FormulationKind::GlsStatic, 8);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> a = assemble_matrix(d);
  for (int r = 0; r < a.rows(); ++r) CHECK(a.row(r).nonZeros() <= 25);
}

TEST_CASE("linear solver") {
  Eigen::SparseMatrix<double> id(5, 5);
  id.setIdentity();
  LinearSolver ls(id);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
  CHECK((ls.solve(b) - b).norm() <= 1e-15);

  const QuadratureGrid g(SplineSpace2D(2, 6, 6));
  const Eigen::SparseMatrix<double> m = mass_matrix(g);
  LinearSolver ms(m);
  const Eigen::VectorXd integrals = m * Eigen::VectorXd::Ones(36);
  CHECK((ms.solve(integrals).array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(ms.last_stats().relative_residual <= 1e-12);
}

TEST_CASE("solver reports failure with the attained residual") {
  Eigen::SparseMatrix<double> z(3, 3);
  z.insert(0, 0) = 1.0;
  z.makeCompressed();
  CHECK_THROWS_AS(LinearSolver{z}, SolverError);
}

TEST_CASE("small-scale recovery") {
  std::mt19937_64 rng(2);
  const auto g = make(FormulationKind::Galerkin);
  const LevelState s = random_state(g, rng);
  for (double v : recover_small_scales(g, s, s.large.phi, zeros(g))) CHECK(v == 0.0);

  // constant state at rest: zero residual, zero small scales, for every kind
  for (auto kind : kAllFormulations) {
    CAPTURE(short_name(kind));
    const auto d = make(kind);
    LevelState c;
    c.large.phi = Eigen::VectorXd::Constant(d.num_phi(), 0.8);
    c.large.rate = Eigen::VectorXd::Zero(d.num_phi());
    const auto& tr = d.kind_traits();
    c.small = SmallScaleField(tr.stabilized ? tr.mode : SmallScaleMode::Static,
                              static_cast<std::size_t>(d.grid().num_points()));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.num_unknowns());
    x.head(d.num_phi()) = c.large.phi;
    CHECK(weak_residual(d, c, x, zeros(d)).cwiseAbs().maxCoeff() <= 1e-12);
    for (double v : recover_small_scales(d, c, x, zeros(d))) CHECK(std::abs(v) <= 1e-12);
  }
}

TEST_CASE("static recovery of a manufactured state") {
  const auto d = make(FormulationKind::SupgStatic);
  LevelState s;
  s.large.phi = Eigen::VectorXd::Zero(d.num_phi());
  s.large.rate = Eigen::VectorXd::Zero(d.num_phi());
  s.small = SmallScaleField(SmallScaleMode::Static, static_cast<std::size_t>(d.grid().num_points()));
  // phi stays zero, forcing -1 everywhere: R = 1 at every point.
  const std::vector<double> f(static_cast<std::size_t>(d.grid().num_points()), -1.0);
  const auto small = recover_small_scales(d, s, s.large.phi, f);
  const double tau = d.tau(0).small;
  for (double v : small) CHECK(v == doctest::Approx(-tau).epsilon(1e-14));
}

TEST_CASE("inconsistent SUPG drops the diffusive residual") {
  std::mt19937_64 rng(8);
  const auto c = make(FormulationKind::SupgDynamicConsistent);
  const auto i = make(FormulationKind::SupgDynamicInconsistent);
  const LevelState s = random_state(c, rng);
  const Eigen::VectorXd next = Eigen::VectorXd::Random(c.num_phi());
  const auto fc = evaluate_alpha_fields(c, s, next, {}, zeros(c));
  const auto fi = evaluate_alpha_fields(i, s, next, {}, zeros(i));
  const double eff = c.tau(0).eff;
  const double kappa = c.physics().diffusivity;
  for (std::size_t q = 0; q < fc.small.size(); ++q) {
    CHECK(std::abs((fi.small[q] - fc.small[q]) + eff * kappa * fc.large.laplacian[q]) <=
          1e-12 * (1.0 + std::abs(eff * kappa * fc.large.laplacian[q])));
  }
}

TEST_CASE("initial rate") {
  for (auto kind : kAllFormulations) {
    CAPTURE(short_name(kind));
    const auto d = make(kind, 8, 2, 0.01, make_alpha(AlphaPreset::CrankNicolson, 0.05));
    const Eigen::VectorXd phi0 = block_phi(d.space());
    const LevelState s = initial_state(d, phi0, zeros(d));
    if (is_static(kind)) {
      LevelState rest = s;
      rest.large.rate.setZero();
      const Eigen::VectorXd r = mass_matrix(d.grid()) * s.large.rate + initial_rate_residual(d, rest, zeros(d));
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-10);
    } else {
      CHECK(initial_rate_residual(d, s, zeros(d)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    if (is_dynamic(kind)) {
      for (double v : s.small.value) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("mass is conserved by every kind") {
  for (auto kind : kAllFormulations) {
    CAPTURE(short_name(kind));
    const auto d = make(kind, 8, 2, 0.005, make_alpha(AlphaPreset::CrankNicolson, 1.0 / 16.0));
    Simulation sim(d, block_phi(d.space()));
    const double m0 = level_energy(sim.discretization(), sim.fields()).mass;
    for (int n = 0; n < 10; ++n) {
      sim.step();
      CHECK(std::abs(level_energy(sim.discretization(), sim.fields()).mass - m0) <= 1e-11 * std::abs(m0));
    }
  }
}

TEST_CASE("DO constraint holds after each solve") {
  const auto d = make(FormulationKind::DynamicOrthogonal, 8, 2, 0.005, make_alpha(AlphaPreset::CrankNicolson, 1.0 / 16.0));
  Simulation sim(d, block_phi(d.space()));
  for (int n = 0; n < 8; ++n) {
    const StepRecord rec = sim.step();
    const double norm = std::sqrt(d.grid().integrate([&] {
      std::vector<double> sq(rec.alpha.small.size());
      for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = rec.alpha.small[i] * rec.alpha.small[i];
      return sq;
    }()));
    CHECK(multiplier_constraint_residual(sim.discretization(), rec) <= 1e-10 * 0.005 * norm);
  }
}

}

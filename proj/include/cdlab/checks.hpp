#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "cdlab/formulations.hpp"
#include "cdlab/run.hpp"

namespace cdlab::checks {

/// Dense step matrix built without the library's basis, quadrature, tau or condensation
/// code: closed-form uniform B-spline pieces, a 6-point Gauss rule, and small-scale
/// slopes from a direct solve of the integrator equations.
struct OracleProblem {
  FormulationKind kind = FormulationKind::Galerkin;
  int elements = 4;
  int degree = 2;
  Eigen::Vector2d velocity{1.0, 1.0};
  double diffusivity = 0.02;
  double inverse_constant = 36.0;
  int r_switch = 2;
  AlphaParams alpha{};
};
Eigen::MatrixXd oracle_matrix(const OracleProblem& problem);

/// (phi'_{n+1}, rate'_{n+1}) from a 2x2 solve of the generalized-alpha equations for
/// d/dt phi' + phi'/tau = -R.
Eigen::Vector2d direct_small_scale_step(const AlphaParams& alpha, double tau, double value_n,
                                        double rate_n, double residual);

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The model-problem property suite. Runs are cached so shared runs execute once.
class AcceptanceSuite {
 public:
  CheckResult energy_identity();
  CheckResult monotone_decay();
  CheckResult multiplier_orthogonality();
  CheckResult supg_static_pathology();
  CheckResult local_positivity();
  CheckResult mass_conservation();
  CheckResult galerkin_energy_conservation();
  CheckResult linear_coincidence();
  CheckResult oracle_assembly();
  CheckResult small_scale_integrator();
  CheckResult tau_algebra();
  CheckResult mesh_convergence();
  CheckResult initial_condition_exactness();

  std::vector<CheckResult> run_all();

  struct RunInfo {
    RunResult result;
    double orthogonality_scale = 0.0;  // max_n kappa ||lap phi^h|| ||phi'||
  };

 private:
  using Key = std::tuple<FormulationKind, int, double, double>;
  const RunInfo& model_run(FormulationKind kind, int mesh, double alpha_f = 0.5,
                           double diffusivity = 5e-4);
  std::map<Key, RunInfo> runs_;
};

}  // namespace cdlab::checks

#include "cdlab/stabilization.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cdlab/errors.hpp"
#include "cdlab/mesh_quadrature.hpp"
#include "cdlab/spline_space.hpp"

namespace cdlab {

double default_inverse_constant(int degree) {
  switch (degree) {
    case 1: return 12.0;
    case 2: return 36.0;
    default: throw ValidationError("no default inverse-estimate constant for this degree");
  }
}

double inverse_estimate_constant(int degree) {
  // Unit elements; the ratio is scale free once divided by G:G.
  const SplineSpace2D space(degree, 3, 3, 3.0, 3.0);
  const QuadratureGrid grid(space, degree + 2);
  const int n_loc = space.local_size();
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(n_loc, n_loc);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n_loc, n_loc);
  for (int q = 0; q < grid.points_per_element(); ++q) {
    const auto& tab = grid.tables()[q];
    const double w = grid.local_weights()[q];
    for (int a = 0; a < n_loc; ++a) {
      for (int b = 0; b < n_loc; ++b) {
        stiff(a, b) += w * tab.laplacian[a] * tab.laplacian[b];
        mass(a, b) += w * tab.value[a] * tab.value[b];
      }
    }
  }
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiff, mass);
  const Eigen::Matrix2d g = grid.metric_tensor(0);
  const double g_contract = (g.array() * g.array()).sum();
  return eig.eigenvalues().maxCoeff() / g_contract;
}

TauComponents tau_components(const StabilizationParams& params, const Eigen::Matrix2d& metric) {
  TauComponents c;
  const auto& a = params.velocity;
  c.conv_inv2 = a.dot(metric * a);
  const double kappa = params.diffusivity;
  c.diff_inv2 = params.inverse_constant * kappa * kappa * (metric.array() * metric.array()).sum();
  const double time_inv = 1.0 / tau_time(params.alpha);
  c.time_inv2 = time_inv * time_inv;
  return c;
}

double tau_time(const AlphaParams& alpha) {
  if (!(alpha.alpha_f > 0.0)) throw ValidationError("tau_time requires alpha_f > 0");
  return alpha.alpha_f * alpha.gamma * alpha.dt / alpha.alpha_m;
}

namespace {

double combine(double conv_inv2, double diff_inv2, double time_inv2, int r_switch) {
  if (conv_inv2 <= 0.0 && diff_inv2 <= 0.0 && time_inv2 <= 0.0) {
    throw ValidationError("degenerate stabilization");
  }
  if (r_switch == 1) {
    return 1.0 / (std::sqrt(conv_inv2) + std::sqrt(diff_inv2) + std::sqrt(time_inv2));
  }
  if (r_switch == 2) return 1.0 / std::sqrt(conv_inv2 + diff_inv2 + time_inv2);
  throw ValidationError("r_switch must be 1 or 2");
}

}  // namespace

double tau_static(const StabilizationParams& params, const Eigen::Matrix2d& metric) {
  const auto c = tau_components(params, metric);
  return combine(c.conv_inv2, c.diff_inv2, c.time_inv2, params.r_switch);
}

double tau_dyn(const StabilizationParams& params, const Eigen::Matrix2d& metric) {
  const auto c = tau_components(params, metric);
  return combine(c.conv_inv2, c.diff_inv2, 0.0, params.r_switch);
}

double tau_eff(const StabilizationParams& params, const Eigen::Matrix2d& metric) {
  return 1.0 / (1.0 / tau_time(params.alpha) + 1.0 / tau_dyn(params, metric));
}

}  // namespace cdlab

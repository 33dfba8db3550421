#pragma once

#include <Eigen/Core>

#include "cdlab/time_integration.hpp"

namespace cdlab {

/// Squared reciprocals of the three time scales.
struct TauComponents {
  double conv_inv2 = 0.0;  // a . G a
  double diff_inv2 = 0.0;  // C_I kappa^2 G:G
  double time_inv2 = 0.0;  // (alpha_m / (alpha_f gamma dt))^2
};

struct StabilizationParams {
  Eigen::Vector2d velocity{1.0, 1.0};
  double diffusivity = 0.0;
  double inverse_constant = 36.0;  // C_I
  AlphaParams alpha{};
  int r_switch = 2;  // 2: root-sum-square, 1: harmonic sum
};

/// C_I used when the configuration does not override it: 36 for p = 2, 12 for p = 1.
double default_inverse_constant(int degree);

/// max over the local biquadratic (or bilinear) space of ||lap w||^2_e / (G:G ||w||^2_e),
/// from the element-wise generalized eigenvalue problem. Mesh independent.
double inverse_estimate_constant(int degree);

TauComponents tau_components(const StabilizationParams& params, const Eigen::Matrix2d& metric);

/// alpha_f gamma dt / alpha_m.
double tau_time(const AlphaParams& alpha);

/// Static small-scale parameter. Throws ValidationError("degenerate stabilization")
/// when every component vanishes.
double tau_static(const StabilizationParams& params, const Eigen::Matrix2d& metric);
/// Dynamic parameter: the temporal part is handled by the small-scale ODE.
double tau_dyn(const StabilizationParams& params, const Eigen::Matrix2d& metric);
/// -d phi'_{n+alpha_f} / d R = (1/tau_time + 1/tau_dyn)^{-1}.
double tau_eff(const StabilizationParams& params, const Eigen::Matrix2d& metric);

}  // namespace cdlab

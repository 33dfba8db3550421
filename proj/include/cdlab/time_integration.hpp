#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace cdlab {

/// Generalized-alpha parameters together with the step size.
///
///   phi_{n+1}         = phi_n + dt ((1 - gamma) rate_n + gamma rate_{n+1})
///   rate_{n+alpha_m}  = (1 - alpha_m) rate_n + alpha_m rate_{n+1}
///   phi_{n+alpha_f}   = (1 - alpha_f) phi_n + alpha_f phi_{n+1}
struct AlphaParams {
  double alpha_f = 0.5;
  double alpha_m = 0.5;
  double gamma = 0.5;
  double dt = 1.0;

  bool second_order() const noexcept;
  /// alpha_m == gamma and alpha_f >= 1/2: E_{n+1} <= E_n in the absence of forcing.
  bool energy_decaying() const noexcept;
  bool unconditionally_stable() const noexcept;

  /// Coefficient of phi_{n+1} in rate_{n+alpha_m}: alpha_m / (gamma dt).
  double rate_coefficient() const noexcept { return alpha_m / (gamma * dt); }
  /// Coefficient of phi_{n+1} in phi_{n+alpha_f}.
  double value_coefficient() const noexcept { return alpha_f; }
};

enum class AlphaPreset { CrankNicolson, BackwardEuler, EnergyDecaying };

/// Validated parameter set from raw values. Throws ValidationError.
AlphaParams make_alpha(double alpha_f, double alpha_m, double gamma, double dt);
/// Preset parameters. `alpha_f` is only read by EnergyDecaying (alpha_m = gamma = 1/2).
AlphaParams make_alpha(AlphaPreset preset, double dt, double alpha_f = 0.5);
/// Preset by name: "crank-nicolson", "backward-euler", "energy-decaying".
AlphaParams make_alpha(const std::string& preset, double dt, double alpha_f = 0.5);

struct StepState {
  Eigen::VectorXd phi;
  Eigen::VectorXd rate;
  double time = 0.0;
};

/// Value at n+alpha_f for a given phi_{n+1}.
Eigen::VectorXd value_at_alpha(const AlphaParams& alpha, const StepState& state,
                               const Eigen::VectorXd& phi_next);
/// rate_{n+1} implied by phi_{n+1} through the gamma update.
Eigen::VectorXd rate_at_next(const AlphaParams& alpha, const StepState& state,
                             const Eigen::VectorXd& phi_next);
/// Rate at n+alpha_m for a given phi_{n+1}.
Eigen::VectorXd rate_at_alpha(const AlphaParams& alpha, const StepState& state,
                              const Eigen::VectorXd& phi_next);

/// Returns phi_{n+1} given the state at n; the solver folds the alpha-level
/// combinations into its own system.
using ImplicitSolve = std::function<Eigen::VectorXd(const StepState&, const AlphaParams&)>;

/// One generalized-alpha step. The state's rate is updated from the gamma relation.
StepState advance(const StepState& state, const AlphaParams& alpha, const ImplicitSolve& solve);

}  // namespace cdlab

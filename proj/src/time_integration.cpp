#include "cdlab/time_integration.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cdlab/errors.hpp"

namespace cdlab {

bool AlphaParams::second_order() const noexcept {
  return std::abs(gamma - (0.5 + alpha_m - alpha_f)) <= 1e-14;
}

bool AlphaParams::energy_decaying() const noexcept {
  return std::abs(alpha_m - gamma) <= 1e-14 && alpha_f >= 0.5 - 1e-14;
}

bool AlphaParams::unconditionally_stable() const noexcept {
  return alpha_m >= alpha_f - 1e-14 && alpha_f >= 0.5 - 1e-14;
}

AlphaParams make_alpha(double alpha_f, double alpha_m, double gamma, double dt) {
  std::vector<std::string> problems;
  if (!(gamma > 0.0 && gamma <= 1.0)) problems.push_back("gamma must lie in (0, 1]");
  if (!(alpha_m > 0.0 && alpha_m <= 1.0)) problems.push_back("alpha_m must lie in (0, 1]");
  if (!(alpha_f >= 0.0 && alpha_f <= 1.0)) problems.push_back("alpha_f must lie in [0, 1]");
  if (!(dt > 0.0) || !std::isfinite(dt)) problems.push_back("time step must be positive");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return {alpha_f, alpha_m, gamma, dt};
}

AlphaParams make_alpha(AlphaPreset preset, double dt, double alpha_f) {
  switch (preset) {
    case AlphaPreset::CrankNicolson: return make_alpha(0.5, 0.5, 0.5, dt);
    case AlphaPreset::BackwardEuler: return make_alpha(1.0, 1.0, 1.0, dt);
    case AlphaPreset::EnergyDecaying:
      if (alpha_f < 0.5) throw ValidationError("energy-decaying family needs alpha_f >= 1/2");
      return make_alpha(alpha_f, 0.5, 0.5, dt);
  }
  throw ValidationError("unknown generalized-alpha preset");
}

AlphaParams make_alpha(const std::string& preset, double dt, double alpha_f) {
  if (preset == "crank-nicolson") return make_alpha(AlphaPreset::CrankNicolson, dt);
  if (preset == "backward-euler") return make_alpha(AlphaPreset::BackwardEuler, dt);
  if (preset == "energy-decaying") return make_alpha(AlphaPreset::EnergyDecaying, dt, alpha_f);
  throw ValidationError("unknown generalized-alpha preset '" + preset + "'");
}

Eigen::VectorXd value_at_alpha(const AlphaParams& alpha, const StepState& state,
                               const Eigen::VectorXd& phi_next) {
  return (1.0 - alpha.alpha_f) * state.phi + alpha.alpha_f * phi_next;
}

Eigen::VectorXd rate_at_next(const AlphaParams& alpha, const StepState& state,
                             const Eigen::VectorXd& phi_next) {
  return (phi_next - state.phi - alpha.dt * (1.0 - alpha.gamma) * state.rate) /
         (alpha.gamma * alpha.dt);
}

Eigen::VectorXd rate_at_alpha(const AlphaParams& alpha, const StepState& state,
                              const Eigen::VectorXd& phi_next) {
  return (1.0 - alpha.alpha_m) * state.rate + alpha.alpha_m * rate_at_next(alpha, state, phi_next);
}

StepState advance(const StepState& state, const AlphaParams& alpha, const ImplicitSolve& solve) {
  StepState next;
  next.phi = solve(state, alpha);
  if (next.phi.size() != state.phi.size()) {
    throw ValidationError("implicit solve returned a vector of the wrong length");
  }
  next.rate = rate_at_next(alpha, state, next.phi);
  next.time = state.time + alpha.dt;
  return next;
}

}  // namespace cdlab

#pragma once

#include <vector>

#include <Eigen/Core>

#include "cdlab/formulations.hpp"

namespace cdlab {

/// Everything the diagnostics need about one step n -> n+1.
struct StepRecord {
  int step = 0;  // n + 1
  double time_prev = 0.0;
  double time = 0.0;
  AlphaFields alpha;     // n+alpha_f / n+alpha_m
  IntegerFields prev;    // level n
  IntegerFields next;    // level n+1
  Eigen::VectorXd sigma; // multiplier coefficients (DO)
  LinearSolver::Stats solve;
};

/// Time stepper for one formulation. The step matrix is factored once.
class Simulation {
 public:
  Simulation(Discretization disc, const Eigen::VectorXd& phi0, Forcing forcing = {});

  const Discretization& discretization() const noexcept { return disc_; }
  const LevelState& state() const noexcept { return state_; }
  /// Integer-level fields of the current state.
  const IntegerFields& fields() const noexcept { return fields_; }
  int step_index() const noexcept { return step_; }
  double time() const noexcept { return state_.large.time; }

  /// Advance one step. Throws SolverError on a failed solve.
  StepRecord step();

 private:
  Discretization disc_;
  Forcing forcing_;
  LinearSolver solver_;
  LevelState state_;
  IntegerFields fields_;
  int step_ = 0;
};

/// Commit dynamic small scales with the converged residual (R - kappa lap sigma).
void commit_small_scales(const Discretization& disc, SmallScaleField& field,
                         std::span<const double> small_forcing);

}  // namespace cdlab

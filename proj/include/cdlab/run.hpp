#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "cdlab/config.hpp"
#include "cdlab/energy_diagnostics.hpp"

namespace cdlab {

inline constexpr const char* kVersion = "0.1.0";

struct Snapshot {
  double time = 0.0;
  Eigen::VectorXd phi;
  std::vector<double> dissipation_total;  // per element
  std::vector<double> dissipation_large;  // per element
};

/// Stabilization values on element 0.
struct TauReport {
  TauComponents components;
  double tau_static = 0.0;
  double tau_dyn = 0.0;
  double tau_eff = 0.0;
  double tau_time = 0.0;
};

struct RunResult {
  RunConfig config;
  ResolvedRun resolved;
  TauReport tau;
  double projection_residual = 0.0;  // || P f - f ||_L2 of the initial condition
  LedgerRow initial;
  std::vector<LedgerRow> rows;       // one per step
  std::vector<Snapshot> snapshots;
  double min_local_total = 0.0;      // over all steps and elements
  double min_local_large = 0.0;
  double max_multiplier_residual = 0.0;  // max_i |(kappa lap N_i, phi')| / (kappa ||phi'||), DO only
  std::string kernel_backend;
};

/// Per-step hook for callers that want the full step record.
using StepObserver = std::function<void(const Discretization&, const StepRecord&, const LedgerRow&)>;

/// Project the initial condition, step to the end time, build the ledger.
/// Throws ValidationError or SolverError.
RunResult run(const RunConfig& config, const StepObserver& observer = {});

TauReport tau_report(const RunConfig& config, const ResolvedRun& resolved);

/// max_i |(kappa lap N_i, phi'_{n+alpha_f})|, the multiplier-constraint residual.
double multiplier_constraint_residual(const Discretization& disc, const StepRecord& record);

/// Files: ledger.csv, field_<t>.vtk, energy.svg, dissipation.svg, meta.json.
void emit_outputs(const RunResult& result, const std::filesystem::path& dir);

nlohmann::json run_metadata(const RunResult& result);

}  // namespace cdlab

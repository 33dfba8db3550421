#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "cdlab/formulations.hpp"
#include "cdlab/model_problem.hpp"
#include "cdlab/time_integration.hpp"

namespace cdlab {

/// Time-integrator choice: a named preset or raw parameters.
struct AlphaChoice {
  std::string preset = "crank-nicolson";  // crank-nicolson | backward-euler | energy-decaying | raw
  double alpha_f = 0.5;                   // energy-decaying and raw
  double alpha_m = 0.5;                   // raw only
  double gamma = 0.5;                     // raw only
};

struct RunConfig {
  FormulationKind formulation = FormulationKind::GlsDynamic;
  int mesh_x = 32;
  int mesh_y = 32;
  int degree = 2;
  double length_x = 1.0;
  double length_y = 1.0;
  Eigen::Vector2d velocity{1.0, 1.0};
  double diffusivity = 5e-4;
  std::optional<double> cfl = 0.5;
  std::optional<double> dt;
  double end_time = 1.0;
  AlphaChoice alpha;
  int r_switch = 2;
  std::optional<double> inverse_constant;  // default depends on the degree
  double multiplier_regularization = 1e-10;
  BlockIC initial;
  std::string output_dir = "out";
  int output_every = 1;
  std::vector<double> snapshot_times{0.0, 0.25, 0.625, 1.0};
};

/// Block-transport model problem on an m x m mesh: "paper-16", "paper-32", "paper-64", "paper-128".
RunConfig preset_config(std::string_view name);

/// Throws ValidationError listing every problem found.
void validate(const RunConfig& config);

/// Parse (and validate) a JSON document. Unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& config);

/// Derived quantities of a validated configuration.
struct ResolvedRun {
  AlphaParams alpha;
  double dt = 0.0;
  int steps = 0;
  double inverse_constant = 0.0;
  std::string cfl_convention;
};

/// dt = CFL min(h) / max(|a_x|, |a_y|); the step count is rounded up so steps * dt = T.
ResolvedRun resolve(const RunConfig& config);

SplineSpace2D make_space(const RunConfig& config);
PhysicsParams make_physics(const RunConfig& config, const ResolvedRun& resolved);

}  // namespace cdlab

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdlab/checks.hpp"
#include "cdlab/errors.hpp"
#include "cdlab/output.hpp"
#include "cdlab/run.hpp"

namespace fs = std::filesystem;
using namespace cdlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Overrides {
  std::optional<double> kappa;
  std::optional<double> cfl;
  std::optional<double> alpha_f;
  std::optional<std::string> output;
};

void apply(RunConfig& cfg, const Overrides& o) {
  if (o.kappa) cfg.diffusivity = *o.kappa;
  if (o.cfl) {
    cfg.cfl = *o.cfl;
    cfg.dt.reset();
  }
  if (o.alpha_f) {
    cfg.alpha.preset = "energy-decaying";
    cfg.alpha.alpha_f = *o.alpha_f;
  }
  if (o.output) cfg.output_dir = *o.output;
}

void summarize(const RunResult& r, const fs::path& dir) {
  const auto& last = r.rows.back();
  double worst = 0.0;
  for (const auto& row : r.rows) worst = std::max(worst, std::abs(row.balance_residual));
  std::printf("%s  %dx%d p=%d  dt=%.6g  steps=%d  kernels=%s\n",
              std::string(short_name(r.config.formulation)).c_str(), r.config.mesh_x,
              r.config.mesh_y, r.config.degree, r.resolved.dt, r.resolved.steps,
              r.kernel_backend.c_str());
  std::printf("  E0=%.10e  EN=%.10e  max|balance residual|=%.3e\n", r.initial.energy_total,
              last.energy_total, worst);
  std::printf("  outputs in %s\n", dir.string().c_str());
}

int run_config(RunConfig cfg) {
  validate(cfg);
  const RunResult r = run(cfg);
  const fs::path dir = cfg.output_dir;
  emit_outputs(r, dir);
  summarize(r, dir);
  return kExitOk;
}

int sweep(const std::string& preset, const std::vector<std::string>& names, const Overrides& o,
          bool with_reference) {
  if (preset != "paper") throw ValidationError("sweep supports --preset paper only");
  const fs::path root = o.output.value_or("sweep");
  std::vector<int> meshes{16, 32, 64};
  if (with_reference) meshes.push_back(128);
  for (const auto& name : names) {
    const FormulationKind kind = parse_formulation(name);
    std::vector<PlotSeries> energy;
    std::vector<std::vector<double>> curves;
    for (int m : meshes) {
      RunConfig cfg = preset_config("paper-" + std::to_string(m));
      cfg.formulation = kind;
      apply(cfg, o);
      cfg.output_dir = (root / (name + "-" + std::to_string(m))).string();
      validate(cfg);
      const RunResult r = run(cfg);
      emit_outputs(r, cfg.output_dir);
      PlotSeries s{std::to_string(m) + "x" + std::to_string(m) + (m == 128 ? " (reference)" : ""),
                   {0.0},
                   {r.initial.energy_total}};
      for (const auto& row : r.rows) {
        s.x.push_back(row.time);
        s.y.push_back(row.energy_total);
      }
      curves.push_back(s.y);
      energy.push_back(std::move(s));
      std::printf("%s %dx%d: E(T)=%.10e\n", name.c_str(), m, m, r.rows.back().energy_total);
    }
    for (std::size_t k = 0; k + 1 < curves.size(); ++k) {
      const auto& c = curves[k];
      const auto& f = curves[k + 1];
      const std::size_t ratio = (f.size() - 1) / (c.size() - 1);
      double d = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) d = std::max(d, std::abs(c[i] - f[i * ratio]));
      std::printf("%s sup|E%d - E%d| = %.6e\n", name.c_str(), meshes[k], meshes[k + 1], d);
    }
    auto out = open_output(root / (name + "-energy.svg"));
    write_line_plot_svg(out, "Total energy, " + name, "t", "E", energy);
  }
  return kExitOk;
}

int verify() {
  checks::AcceptanceSuite suite;
  int failed = 0;
  for (const auto& r : suite.run_all()) {
    std::printf("%s [%2d] %s: %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy diagnostics for stabilized convection-diffusion"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Overrides overrides;
  auto add_overrides = [&overrides](CLI::App* sub) {
    sub->add_option("--kappa", overrides.kappa, "Diffusivity");
    sub->add_option("--cfl", overrides.cfl, "CFL number");
    sub->add_option("--alpha-f", overrides.alpha_f, "alpha_f with alpha_m = gamma = 1/2");
    sub->add_option("--output", overrides.output, "Output directory");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one simulation from a config file or preset");
  std::string config_path, preset, formulation;
  run_cmd->add_option("config", config_path, "JSON configuration file");
  run_cmd->add_option("--preset", preset, "paper-16, paper-32, paper-64 or paper-128");
  run_cmd->add_option("--formulation", formulation, "Formulation short name");
  add_overrides(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the 16/32/64 mesh family");
  std::string sweep_preset = "paper";
  std::vector<std::string> sweep_forms{"supgs", "glsd", "do"};
  bool reference = true;
  sweep_cmd->add_option("--preset", sweep_preset, "Mesh family: paper (16, 32, 64)");
  sweep_cmd->add_option("--formulations", sweep_forms, "Formulation short names");
  sweep_cmd->add_flag("--reference,!--no-reference", reference, "Include the 128x128 reference run");
  add_overrides(sweep_cmd);

  app.add_subcommand("verify", "Run the property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (config_path.empty() == preset.empty()) {
        throw ValidationError("run needs exactly one of <config.json> or --preset");
      }
      RunConfig cfg = config_path.empty() ? preset_config(preset) : load_config(config_path);
      if (!formulation.empty()) cfg.formulation = parse_formulation(formulation);
      apply(cfg, overrides);
      return run_config(cfg);
    }
    if (*sweep_cmd) return sweep(sweep_preset, sweep_forms, overrides, reference);
    return verify();
  } catch (const ValidationError& e) {
    std::cerr << "invalid input:\n";
    for (const auto& p : e.problems()) std::cerr << "  - " << p << '\n';
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

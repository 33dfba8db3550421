#include "cdlab/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdlab/errors.hpp"
#include "cdlab/kernels.hpp"
#include "cdlab/output.hpp"
#include "cdlab/simulation.hpp"
#include "cdlab/stabilization.hpp"

namespace cdlab {

TauReport tau_report(const RunConfig& config, const ResolvedRun& resolved) {
  const SplineSpace2D space = make_space(config);
  const QuadratureGrid grid(space);
  StabilizationParams sp;
  sp.velocity = config.velocity;
  sp.diffusivity = config.diffusivity;
  sp.inverse_constant = resolved.inverse_constant;
  sp.alpha = resolved.alpha;
  sp.r_switch = config.r_switch;
  const Eigen::Matrix2d g = grid.metric_tensor(0);
  TauReport t;
  t.components = tau_components(sp, g);
  t.tau_time = tau_time(resolved.alpha);
  t.tau_static = tau_static(sp, g);
  t.tau_dyn = (t.components.conv_inv2 > 0.0 || t.components.diff_inv2 > 0.0)
                  ? tau_dyn(sp, g)
                  : std::numeric_limits<double>::infinity();
  t.tau_eff = std::isfinite(t.tau_dyn) ? tau_eff(sp, g) : t.tau_time;
  return t;
}

double multiplier_constraint_residual(const Discretization& disc, const StepRecord& rec) {
  const auto& grid = disc.grid();
  const auto& space = grid.space();
  const double kappa = disc.physics().diffusivity;
  const int npe = grid.points_per_element();
  const int n_loc = space.local_size();
  const auto w = grid.local_weights();
  const auto tables = grid.tables();
  std::vector<double> r(static_cast<std::size_t>(space.num_functions()), 0.0);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto conn = space.connectivity(e);
    for (int q = 0; q < npe; ++q) {
      const double ps = rec.alpha.small[static_cast<std::size_t>(e) * npe + q];
      for (int k = 0; k < n_loc; ++k) r[conn[k]] += w[q] * kappa * tables[q].laplacian[k] * ps;
    }
  }
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

namespace {

struct SnapshotPlan {
  double time;
  int step;
};

std::vector<SnapshotPlan> plan_snapshots(const RunConfig& config, const ResolvedRun& r) {
  std::vector<SnapshotPlan> out;
  for (double t : config.snapshot_times) {
    const int k = std::clamp(static_cast<int>(std::lround(t / r.dt)), 0, r.steps);
    out.push_back({t, k});
  }
  return out;
}

}  // namespace

RunResult run(const RunConfig& config, const StepObserver& observer) {
  RunResult res;
  res.config = config;
  res.resolved = resolve(config);
  if (res.resolved.alpha.alpha_f > 0.0) res.tau = tau_report(config, res.resolved);
  res.kernel_backend = std::string(kernels::backend_name(kernels::active().backend));

  const SplineSpace2D space = make_space(config);
  const BlockIC ic = config.initial;
  const ScalarField2D f0 = [&ic](double x, double y) { return block_ic_value(ic, x, y); };
  const Eigen::VectorXd phi0 = project_l2(space, f0);
  res.projection_residual = l2_distance(space, {phi0.data(), static_cast<std::size_t>(phi0.size())}, f0);

  Discretization disc(QuadratureGrid(space), config.formulation,
                      make_physics(config, res.resolved), res.resolved.alpha);
  Simulation sim(disc, phi0);
  const auto& d = sim.discretization();
  res.initial = initial_row(d, sim.fields());

  const auto plan = plan_snapshots(config, res.resolved);
  const auto ne = static_cast<std::size_t>(space.num_elements());
  for (const auto& s : plan) {
    if (s.step == 0) res.snapshots.push_back({s.time, phi0, std::vector<double>(ne, 0.0),
                                              std::vector<double>(ne, 0.0)});
  }

  res.min_local_total = std::numeric_limits<double>::infinity();
  res.min_local_large = std::numeric_limits<double>::infinity();
  const bool multiplier = d.kind_traits().multiplier;
  LedgerRow prev = res.initial;
  res.rows.reserve(static_cast<std::size_t>(res.resolved.steps));
  for (int n = 0; n < res.resolved.steps; ++n) {
    const StepRecord rec = sim.step();
    LedgerRow row = ledger_step(d, rec, prev);
    const auto local_total = local_dissipation_field(d, rec, EnergyMeasure::Total);
    const auto local_large = local_dissipation_field(d, rec, EnergyMeasure::Large);
    res.min_local_total =
        std::min(res.min_local_total, *std::min_element(local_total.begin(), local_total.end()));
    res.min_local_large =
        std::min(res.min_local_large, *std::min_element(local_large.begin(), local_large.end()));
    if (multiplier) {
      const double norm = std::sqrt(kernels::weighted_dot(d.grid().weights(), rec.alpha.small,
                                                          rec.alpha.small));
      if (norm > 0.0) {
        res.max_multiplier_residual =
            std::max(res.max_multiplier_residual,
                     multiplier_constraint_residual(d, rec) / (d.physics().diffusivity * norm));
      }
    }
    for (const auto& s : plan) {
      if (s.step == rec.step) {
        res.snapshots.push_back({s.time, sim.state().large.phi, local_total, local_large});
      }
    }
    if (observer) observer(d, rec, row);
    res.rows.push_back(row);
    prev = row;
  }
  return res;
}

nlohmann::json run_metadata(const RunResult& r) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["config"] = config_to_json(r.config);
  m["dt"] = r.resolved.dt;
  m["steps"] = r.resolved.steps;
  m["cfl_convention"] = r.resolved.cfl_convention;
  m["alpha"] = {{"alpha_f", r.resolved.alpha.alpha_f},
                {"alpha_m", r.resolved.alpha.alpha_m},
                {"gamma", r.resolved.alpha.gamma},
                {"second_order", r.resolved.alpha.second_order()},
                {"energy_decaying", r.resolved.alpha.energy_decaying()}};
  m["inverse_constant"] = r.resolved.inverse_constant;
  m["tau_reference_element"] = {
      {"conv_inv2", r.tau.components.conv_inv2},
      {"diff_inv2", r.tau.components.diff_inv2},
      {"time_inv2", r.tau.components.time_inv2},
      {"tau_static", r.tau.tau_static},
      {"tau_dyn", std::isfinite(r.tau.tau_dyn) ? nlohmann::json(r.tau.tau_dyn) : nlohmann::json()},
      {"tau_eff", r.tau.tau_eff},
      {"tau_time", r.tau.tau_time}};
  m["initial_energy"] = r.initial.energy_total;
  m["initial_mass"] = r.initial.mass;
  m["projection_residual"] = r.projection_residual;
  m["kernel_backend"] = r.kernel_backend;
  if (!r.rows.empty()) {
    m["min_local_dissipation_total"] = r.min_local_total;
    m["min_local_dissipation_large"] = r.min_local_large;
  }
  if (traits(r.config.formulation).multiplier) {
    m["max_multiplier_constraint_residual"] = r.max_multiplier_residual;
  }
  return m;
}

void emit_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  {
    std::vector<LedgerRow> kept;
    for (const auto& row : r.rows) {
      if (row.step % r.config.output_every == 0) kept.push_back(row);
    }
    auto out = open_output(dir / "ledger.csv");
    write_ledger_csv(out, kept);
  }

  const SplineSpace2D space = make_space(r.config);
  for (const auto& s : r.snapshots) {
    auto out = open_output(dir / ("field_" + time_label(s.time) + ".vtk"));
    const std::vector<CellArray> cells = {{"dissipation_total", s.dissipation_total},
                                          {"dissipation_large", s.dissipation_large}};
    write_field_vtk(out, space, {s.phi.data(), static_cast<std::size_t>(s.phi.size())}, cells,
                    "phi at t=" + time_label(s.time));
  }

  PlotSeries e_total{"total", {0.0}, {r.initial.energy_total}};
  PlotSeries e_large{"large-scale", {0.0}, {r.initial.energy_large}};
  PlotSeries d_total{"small-scale share, total energy", {}, {}};
  PlotSeries d_large{"small-scale share, large-scale energy", {}, {}};
  for (const auto& row : r.rows) {
    e_total.x.push_back(row.time);
    e_total.y.push_back(row.energy_total);
    e_large.x.push_back(row.time);
    e_large.y.push_back(row.energy_large);
    d_total.x.push_back(row.time);
    d_total.y.push_back(row.contribution_total);
    d_large.x.push_back(row.time);
    d_large.y.push_back(row.contribution_large);
  }
  const std::string name(short_name(r.config.formulation));
  {
    auto out = open_output(dir / "energy.svg");
    const std::vector<PlotSeries> s = {e_total, e_large};
    write_line_plot_svg(out, "Energy, " + name, "t", "E", s);
  }
  {
    auto out = open_output(dir / "dissipation.svg");
    const std::vector<PlotSeries> s = {d_total, d_large};
    write_line_plot_svg(out, "Small-scale dissipation, " + name, "t", "D", s);
  }
  {
    auto out = open_output(dir / "meta.json");
    out << run_metadata(r).dump(2) << '\n';
  }
}

}  // namespace cdlab

#include "cdlab/energy_diagnostics.hpp"

#include <cmath>

#include "cdlab/errors.hpp"
#include "cdlab/kernels.hpp"

namespace cdlab {

namespace {

double dot(const QuadratureGrid& grid, std::span<const double> a, std::span<const double> b) {
  return kernels::weighted_dot(grid.weights(), a, b);
}

/// 1 + s for consistent kinds, 0 when the diffusion term is dropped from the residual.
double orthogonality_factor(const FormulationTraits& tr) {
  if (!tr.stabilized) return 0.0;
  return tr.residual_diffusion * (1.0 + tr.weight_sign);
}

bool static_kind(const FormulationTraits& tr) {
  return tr.stabilized && tr.mode == SmallScaleMode::Static;
}

/// tau^-1 at every point.
std::vector<double> inverse_tau(const Discretization& disc) {
  const auto& grid = disc.grid();
  const int npe = grid.points_per_element();
  std::vector<double> out(static_cast<std::size_t>(grid.num_points()), 0.0);
  if (!disc.kind_traits().stabilized) return out;
  for (int e = 0; e < grid.num_elements(); ++e) {
    const double inv = 1.0 / disc.tau(e).small;
    for (int q = 0; q < npe; ++q) out[static_cast<std::size_t>(e) * npe + q] = inv;
  }
  return out;
}

/// d/dt phi' at n+alpha_m: the integrator rate for dynamic kinds, the difference
/// quotient of -tau R for static kinds.
std::vector<double> small_rate(const Discretization& disc, const StepRecord& rec) {
  if (!static_kind(disc.kind_traits())) return rec.alpha.small_rate;
  const double dt = rec.time - rec.time_prev;
  std::vector<double> out(rec.next.small.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (rec.next.small[i] - rec.prev.small[i]) / dt;
  }
  return out;
}

struct PointTerms {
  std::vector<double> ss;         // phi'^2 / tau
  std::vector<double> unwanted;   // pointwise sign-indefinite total-energy terms
  std::vector<double> large;      // pointwise small-scale share of -dE^h/dt
};

PointTerms point_terms(const Discretization& disc, const StepRecord& rec) {
  const auto& tr = disc.kind_traits();
  const auto& f = rec.alpha;
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const double c_orth = orthogonality_factor(tr);
  const double c_sigma = tr.multiplier ? 1.0 : 0.0;
  const bool stat = static_kind(tr);
  const auto inv_tau = inverse_tau(disc);
  const auto srate = small_rate(disc, rec);
  const std::size_t n = f.small.size();
  PointTerms t;
  t.ss.assign(n, 0.0);
  t.unwanted.assign(n, 0.0);
  t.large.assign(n, 0.0);
  if (!tr.stabilized) return t;
  const double s = tr.weight_sign;
  for (std::size_t i = 0; i < n; ++i) {
    const double ps = f.small[i];
    const double lap = kappa * f.large.laplacian[i];
    t.ss[i] = ps * ps * inv_tau[i];
    double u = c_orth * lap * ps + c_sigma * f.lap_sigma[i] * ps;
    if (stat) u += srate[i] * (f.large.value[i] + ps);
    t.unwanted[i] = u;
    if (stat) {
      t.large[i] = t.ss[i] + ps * f.rate[i] - (1.0 + s) * lap * ps - ps * f.forcing[i];
    } else {
      const double conv = a.x() * f.large.dx[i] + a.y() * f.large.dy[i];
      t.large[i] = f.large.value[i] * srate[i] - conv * ps - s * lap * ps;
    }
  }
  return t;
}

}  // namespace

std::vector<double> element_sums(const QuadratureGrid& grid, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(grid.num_points())) {
    throw ValidationError("element_sums: value count does not match the quadrature grid");
  }
  const int npe = grid.points_per_element();
  const auto w = grid.local_weights();
  std::vector<double> out(static_cast<std::size_t>(grid.num_elements()), 0.0);
  for (int e = 0; e < grid.num_elements(); ++e) {
    double acc = 0.0;
    for (int q = 0; q < npe; ++q) acc += w[q] * values[static_cast<std::size_t>(e) * npe + q];
    out[e] = acc;
  }
  return out;
}

LevelEnergy level_energy(const Discretization& disc, const IntegerFields& fields) {
  const auto& grid = disc.grid();
  const auto& ph = fields.large.value;
  const auto& ps = fields.small;
  std::vector<double> total(ph.size());
  for (std::size_t i = 0; i < ph.size(); ++i) total[i] = ph[i] + ps[i];
  LevelEnergy e;
  e.large = 0.5 * dot(grid, ph, ph);
  e.small = 0.5 * dot(grid, ps, ps);
  e.total = 0.5 * dot(grid, total, total);
  e.cross = dot(grid, ph, ps);
  e.mass = grid.integrate(ph);
  if (is_dynamic(disc.kind())) e.mass += grid.integrate(ps);
  return e;
}

const std::vector<std::string>& ledger_columns() {
  static const std::vector<std::string> cols = {
      "step",
      "t",
      "energy_large",
      "energy_small",
      "energy_total",
      "physical_dissipation",
      "small_scale_dissipation",
      "orthogonality",
      "multiplier_orthogonality",
      "temporal_large",
      "temporal_total",
      "forcing_large",
      "forcing_small",
      "numerical_dissipation",
      "contribution_total",
      "contribution_large",
      "exchange",
      "unwanted",
      "mass",
      "balance_residual",
  };
  return cols;
}

std::vector<double> ledger_values(const LedgerRow& r) {
  return {static_cast<double>(r.step), r.time, r.energy_large, r.energy_small, r.energy_total,
          r.physical_dissipation, r.small_scale_dissipation, r.orthogonality,
          r.multiplier_orthogonality, r.temporal_large, r.temporal_total, r.forcing_large,
          r.forcing_small, r.numerical_dissipation, r.contribution_total, r.contribution_large,
          r.exchange, r.unwanted, r.mass, r.balance_residual};
}

LedgerRow initial_row(const Discretization& disc, const IntegerFields& fields) {
  const LevelEnergy e = level_energy(disc, fields);
  LedgerRow row;
  row.energy_large = e.large;
  row.energy_small = e.small;
  row.energy_total = e.total;
  row.mass = e.mass;
  return row;
}

BalanceResidual discrete_balance_residual(const LedgerRow& prev, const LedgerRow& next,
                                          const AlphaParams& alpha) {
  BalanceResidual out;
  out.warning = !alpha.energy_decaying();
  out.value = next.energy_total - prev.energy_total +
              alpha.dt * (next.numerical_dissipation + next.physical_dissipation +
                          next.small_scale_dissipation - next.forcing_large - next.forcing_small);
  return out;
}

LedgerRow ledger_step(const Discretization& disc, const StepRecord& rec, const LedgerRow& prev) {
  const auto& grid = disc.grid();
  const auto& f = rec.alpha;
  const auto& alpha = disc.alpha();
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const std::size_t n = f.small.size();

  LedgerRow row;
  row.step = rec.step;
  row.time = rec.time;
  const LevelEnergy e = level_energy(disc, rec.next);
  row.energy_large = e.large;
  row.energy_small = e.small;
  row.energy_total = e.total;
  row.mass = e.mass;

  const auto srate = small_rate(disc, rec);
  std::vector<double> lap(n), conv(n), total(n), total_rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    lap[i] = kappa * f.large.laplacian[i];
    conv[i] = a.x() * f.large.dx[i] + a.y() * f.large.dy[i];
    total[i] = f.large.value[i] + f.small[i];
    total_rate[i] = f.rate[i] + srate[i];
  }
  row.physical_dissipation =
      kappa * (dot(grid, f.large.dx, f.large.dx) + dot(grid, f.large.dy, f.large.dy));
  const PointTerms terms = point_terms(disc, rec);
  row.small_scale_dissipation = grid.integrate(terms.ss);
  row.orthogonality = dot(grid, lap, f.small);
  row.multiplier_orthogonality = dot(grid, f.lap_sigma, f.small);
  row.temporal_large = dot(grid, f.small, f.rate);
  row.temporal_total = dot(grid, srate, total);
  row.forcing_large = dot(grid, f.large.value, f.forcing);
  row.forcing_small = dot(grid, f.small, f.forcing);
  row.numerical_dissipation =
      alpha.dt * (alpha.alpha_f - 0.5) * dot(grid, total_rate, total_rate);
  row.exchange = dot(grid, conv, f.small);
  row.unwanted = grid.integrate(terms.unwanted);
  row.contribution_total = row.small_scale_dissipation - row.unwanted;
  row.contribution_large = grid.integrate(terms.large);

  const BalanceResidual r = discrete_balance_residual(prev, row, alpha);
  row.balance_residual = r.value;
  row.balance_warning = r.warning;
  return row;
}

ScaleExchange scale_exchange(const Discretization& disc, const StepRecord& rec) {
  if (!is_dynamic(disc.kind())) {
    throw ValidationError("scale exchange is defined for dynamic small scales only");
  }
  const auto& grid = disc.grid();
  const auto& tr = disc.kind_traits();
  const auto& f = rec.alpha;
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const std::size_t n = f.small.size();
  std::vector<double> lap(n), conv(n);
  for (std::size_t i = 0; i < n; ++i) {
    lap[i] = kappa * f.large.laplacian[i];
    conv[i] = a.x() * f.large.dx[i] + a.y() * f.large.dy[i];
  }
  const auto inv_tau = inverse_tau(disc);
  std::vector<double> ss(n);
  for (std::size_t i = 0; i < n; ++i) ss[i] = f.small[i] * f.small[i] * inv_tau[i];

  ScaleExchange x;
  const double exch = dot(grid, conv, f.small);
  x.large_exchange = exch;
  x.small_exchange = -exch;
  const double grad2 =
      kappa * (dot(grid, f.large.dx, f.large.dx) + dot(grid, f.large.dy, f.large.dy));
  const double lap_small = dot(grid, lap, f.small);
  x.large_rate = -grad2 + dot(grid, f.large.value, f.forcing) -
                 dot(grid, f.large.value, f.small_rate) + exch + tr.weight_sign * lap_small;
  x.small_rate = -grid.integrate(ss) - dot(grid, f.small, f.rate) - exch +
                 tr.residual_diffusion * lap_small + dot(grid, f.lap_sigma, f.small) +
                 dot(grid, f.small, f.forcing);
  return x;
}

std::vector<double> local_dissipation_field(const Discretization& disc, const StepRecord& rec,
                                            EnergyMeasure measure) {
  const auto& grid = disc.grid();
  const PointTerms t = point_terms(disc, rec);
  if (measure == EnergyMeasure::Large) return element_sums(grid, t.large);
  if (disc.kind_traits().multiplier) {
    return element_sums(grid, t.ss);
  }
  std::vector<double> v(t.ss.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = t.ss[i] - t.unwanted[i];
  return element_sums(grid, v);
}

}  // namespace cdlab

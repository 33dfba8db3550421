#pragma once

#include <string>
#include <vector>

#include "cdlab/formulations.hpp"
#include "cdlab/simulation.hpp"

namespace cdlab {

/// Integer-level energies.
struct LevelEnergy {
  double large = 0.0;  // 1/2 (phi^h, phi^h)
  double small = 0.0;  // 1/2 (phi', phi')
  double total = 0.0;  // 1/2 (phi^h + phi', phi^h + phi'), direct quadrature
  double cross = 0.0;  // (phi^h, phi')
  double mass = 0.0;   // (1, phi^h) (+ (1, phi') for dynamic kinds)
};

LevelEnergy level_energy(const Discretization& disc, const IntegerFields& fields);

/// One step of the energy ledger. Dissipation-type terms are rates at n+alpha_f / n+alpha_m;
/// energies and mass refer to level n+1.
struct LedgerRow {
  int step = 0;
  double time = 0.0;
  double energy_large = 0.0;
  double energy_small = 0.0;
  double energy_total = 0.0;
  double physical_dissipation = 0.0;     // ||kappa^1/2 grad phi^h||^2
  double small_scale_dissipation = 0.0;  // ||tau^-1/2 phi'||^2
  double orthogonality = 0.0;            // (kappa lap phi^h, phi')
  double multiplier_orthogonality = 0.0; // (kappa lap sigma^h, phi')
  double temporal_large = 0.0;           // (phi', d/dt phi^h)
  double temporal_total = 0.0;           // (d/dt phi', phi^h + phi')
  double forcing_large = 0.0;            // (phi^h, f)
  double forcing_small = 0.0;            // (phi', f)
  double numerical_dissipation = 0.0;    // dt (alpha_f - 1/2) ||d/dt (phi^h + phi')||^2
  double contribution_total = 0.0;       // small-scale share of -dE/dt
  double contribution_large = 0.0;       // small-scale share of -dE^h/dt
  double exchange = 0.0;                 // (a . grad phi^h, phi')
  double unwanted = 0.0;                 // sign-indefinite terms in the total balance
  double mass = 0.0;
  double balance_residual = 0.0;
  bool balance_warning = false;          // parameters outside the energy-decaying family
};

/// Column names of the CSV ledger, in row order.
const std::vector<std::string>& ledger_columns();
std::vector<double> ledger_values(const LedgerRow& row);

/// Row for the initial level (energies and mass only).
LedgerRow initial_row(const Discretization& disc, const IntegerFields& fields);

/// Row for step n -> n+1. `prev` supplies E_n for the balance residual.
LedgerRow ledger_step(const Discretization& disc, const StepRecord& record, const LedgerRow& prev);

struct BalanceResidual {
  double value = 0.0;
  /// Set when alpha_m != gamma or alpha_f < 1/2: the identity is not expected to close.
  bool warning = false;
};

/// r = E_{n+1} - E_n + dt (numerical + physical + small-scale dissipation - forcing).
BalanceResidual discrete_balance_residual(const LedgerRow& prev, const LedgerRow& next,
                                          const AlphaParams& alpha);

/// Convective transfer between the scales, dynamic kinds only.
struct ScaleExchange {
  double large_exchange = 0.0;  // +(a . grad phi^h, phi') in dE^h/dt
  double small_exchange = 0.0;  // -(a . grad phi^h, phi') in dE'/dt
  double large_rate = 0.0;      // full right-hand side of dE^h/dt
  double small_rate = 0.0;      // full right-hand side of dE'/dt
};

ScaleExchange scale_exchange(const Discretization& disc, const StepRecord& record);

enum class EnergyMeasure { Total, Large };

/// Per-element small-scale contribution to dissipation (positive = dissipative).
std::vector<double> local_dissipation_field(const Discretization& disc, const StepRecord& record,
                                            EnergyMeasure measure);

/// Per-element sum of w v over the element's quadrature points.
std::vector<double> element_sums(const QuadratureGrid& grid, std::span<const double> values);

}  // namespace cdlab

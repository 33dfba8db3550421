#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cdlab/kernels.hpp"
#include "cdlab/time_integration.hpp"

namespace cdlab {

enum class SmallScaleMode { Static, Dynamic };

/// Small-scale state at every quadrature point: phi'_n and its discrete rate.
/// Static fields keep the rate at zero and are re-evaluated from the residual.
struct SmallScaleField {
  SmallScaleMode mode = SmallScaleMode::Dynamic;
  std::vector<double> value;
  std::vector<double> rate;

  SmallScaleField() = default;
  SmallScaleField(SmallScaleMode m, std::size_t num_points)
      : mode(m), value(num_points, 0.0), rate(num_points, 0.0) {}

  std::size_t size() const noexcept { return value.size(); }
};

/// Affine representation of the dynamic small-scale at one step, obtained by
/// applying generalized-alpha to  d/dt phi' + phi' / tau_dyn = -R  and solving
/// for phi'_{n+1}, rate'_{n+1} in closed form:
///
///   phi'_{n+alpha_f}     = H_value(phi'_n, rate'_n) - tau_eff R
///   rate'_{n+alpha_m}    = H_rate(phi'_n, rate'_n)  - (tau_eff / tau_time) R
struct CondensationMap {
  double slope_value = 0.0;  // -tau_eff
  double slope_rate = 0.0;   // -tau_eff / tau_time
  double value_from_value = 0.0, value_from_rate = 0.0;
  double rate_from_value = 0.0, rate_from_rate = 0.0;
  // rate'_{n+1} = next_from_value phi'_n + next_from_rate rate'_n + next_slope R
  double next_from_value = 0.0, next_from_rate = 0.0, next_slope = 0.0;
  double dt = 0.0, gamma = 0.0;

  double value_at_alpha(double value_n, double rate_n, double residual) const noexcept {
    return value_from_value * value_n + value_from_rate * rate_n + slope_value * residual;
  }
  double rate_at_alpha(double value_n, double rate_n, double residual) const noexcept {
    return rate_from_value * value_n + rate_from_rate * rate_n + slope_rate * residual;
  }
  kernels::CondenseCoefficients condense_coefficients() const noexcept;
  kernels::CommitCoefficients commit_coefficients() const noexcept;
};

/// Throws ValidationError for non-positive tau_dyn or alpha_f.
CondensationMap condensation_coefficients(const AlphaParams& alpha, double tau_dyn);

/// Evaluate both affine maps at every point.
void condense(const CondensationMap& map, const SmallScaleField& field,
              std::span<const double> residual, std::span<double> value_alpha,
              std::span<double> rate_alpha);

/// Advance the field to n+1 from the converged residual at n+alpha.
/// Throws ValidationError on a static field or a size mismatch.
void commit_step(SmallScaleField& field, const CondensationMap& map,
                 std::span<const double> residual);

/// phi' = -tau_stat R.
inline double static_evaluate(double residual, double tau_stat) noexcept {
  return -tau_stat * residual;
}

/// Consistent start: phi'_0 = 0 and rate'_0 = -R_0.
void initialize_dynamic(SmallScaleField& field, std::span<const double> residual0);

/// CSV dump: element, point, value, rate.
void write_field_csv(std::ostream& out, const SmallScaleField& field, int points_per_element);

}  // namespace cdlab

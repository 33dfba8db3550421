#include "cdlab/small_scales.hpp"

#include <iomanip>
#include <ostream>

#include "cdlab/errors.hpp"

namespace cdlab {

kernels::CondenseCoefficients CondensationMap::condense_coefficients() const noexcept {
  return {value_from_value, value_from_rate, slope_value,
          rate_from_value,  rate_from_rate,  slope_rate};
}

kernels::CommitCoefficients CondensationMap::commit_coefficients() const noexcept {
  return {next_from_value, next_from_rate, next_slope, dt * (1.0 - gamma), dt * gamma};
}

CondensationMap condensation_coefficients(const AlphaParams& alpha, double tau_dyn) {
  if (!(tau_dyn > 0.0)) throw ValidationError("condensation needs tau_dyn > 0");
  if (!(alpha.alpha_f > 0.0)) throw ValidationError("condensation needs alpha_f > 0");
  const double af = alpha.alpha_f;
  const double am = alpha.alpha_m;
  const double g = alpha.gamma;
  const double dt = alpha.dt;
  const double inv_tau = 1.0 / tau_dyn;

  // rate'_{n+1} = (-R - k_rate rate'_n - phi'_n / tau) / denom
  const double denom = am + af * g * dt * inv_tau;
  const double k_rate = 1.0 - am + (1.0 - g) * af * dt * inv_tau;

  CondensationMap m;
  m.dt = dt;
  m.gamma = g;
  m.next_from_value = -inv_tau / denom;
  m.next_from_rate = -k_rate / denom;
  m.next_slope = -1.0 / denom;

  // phi'_{n+alpha_f} = phi'_n + alpha_f (1 - gamma) dt rate'_n + alpha_f gamma dt rate'_{n+1}
  const double agd = af * g * dt;
  m.value_from_value = 1.0 + agd * m.next_from_value;
  m.value_from_rate = af * (1.0 - g) * dt + agd * m.next_from_rate;
  m.slope_value = agd * m.next_slope;

  // rate'_{n+alpha_m} = (1 - alpha_m) rate'_n + alpha_m rate'_{n+1}
  m.rate_from_value = am * m.next_from_value;
  m.rate_from_rate = (1.0 - am) + am * m.next_from_rate;
  m.slope_rate = am * m.next_slope;
  return m;
}

void condense(const CondensationMap& map, const SmallScaleField& field,
              std::span<const double> residual, std::span<double> value_alpha,
              std::span<double> rate_alpha) {
  const std::size_t n = field.size();
  if (residual.size() != n || value_alpha.size() != n || rate_alpha.size() != n) {
    throw ValidationError("small-scale condensation: quadrature-point count mismatch");
  }
  kernels::active().condense(map.condense_coefficients(), field.value.data(), field.rate.data(),
                             residual.data(), value_alpha.data(), rate_alpha.data(), n);
}

void commit_step(SmallScaleField& field, const CondensationMap& map,
                 std::span<const double> residual) {
  if (field.mode != SmallScaleMode::Dynamic) {
    throw ValidationError("commit_step called on a static small-scale field");
  }
  if (residual.size() != field.size()) {
    throw ValidationError("commit_step: quadrature-point count mismatch");
  }
  kernels::active().commit(map.commit_coefficients(), field.value.data(), field.rate.data(),
                           residual.data(), field.size());
}

void initialize_dynamic(SmallScaleField& field, std::span<const double> residual0) {
  if (residual0.size() != field.size()) {
    throw ValidationError("small-scale initialization: quadrature-point count mismatch");
  }
  for (std::size_t i = 0; i < field.size(); ++i) {
    field.value[i] = 0.0;
    field.rate[i] = -residual0[i];
  }
}

void write_field_csv(std::ostream& out, const SmallScaleField& field, int points_per_element) {
  out << "element,point,value,rate\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << i / points_per_element << ',' << i % points_per_element << ',' << field.value[i] << ','
        << field.rate[i] << '\n';
  }
}

}  // namespace cdlab

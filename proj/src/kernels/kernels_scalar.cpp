// Reference kernels. Every SIMD variant is tested against these.

#include "cdlab/kernels.hpp"

namespace cdlab::kernels {
namespace {

double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

double weighted_sum_scalar(const double* w, const double* a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += w[i] * a[i];
  return sum;
}

void affine_combine_scalar(double* out, const double* x, const double* y, double a, double b,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void condense_scalar(const CondenseCoefficients& c, const double* value_n, const double* rate_n,
                     const double* residual, double* value_alpha, double* rate_alpha,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    value_alpha[i] = c.value_value * value_n[i] + c.value_rate * rate_n[i] + c.value_slope * residual[i];
    rate_alpha[i] = c.rate_value * value_n[i] + c.rate_rate * rate_n[i] + c.rate_slope * residual[i];
  }
}

void commit_scalar(const CommitCoefficients& c, double* value, double* rate, const double* residual,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double next = c.next_value * value[i] + c.next_rate * rate[i] + c.next_slope * residual[i];
    value[i] = value[i] + c.dt_one_minus_gamma * rate[i] + c.dt_gamma * next;
    rate[i] = next;
  }
}

constexpr KernelTable kScalar{
    Backend::Scalar,  weighted_dot_scalar, weighted_sum_scalar, affine_combine_scalar,
    condense_scalar,  commit_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace cdlab::kernels

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace cdlab::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend backend) noexcept;

/// Coefficients of the affine small-scale maps at one time step:
///   value_alpha = value_value * v_n + value_rate * r_n + value_slope * R
///   rate_alpha  = rate_value  * v_n + rate_rate  * r_n + rate_slope  * R
struct CondenseCoefficients {
  double value_value, value_rate, value_slope;
  double rate_value, rate_rate, rate_slope;
};

/// rate_{n+1} = next_value * v_n + next_rate * r_n + next_slope * R, then
/// v_{n+1} = v_n + dt (1 - gamma) r_n + dt gamma rate_{n+1}.
struct CommitCoefficients {
  double next_value, next_rate, next_slope;
  double dt_one_minus_gamma, dt_gamma;
};

struct KernelTable {
  Backend backend;
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  double (*weighted_sum)(const double* w, const double* a, std::size_t n);
  void (*affine_combine)(double* out, const double* x, const double* y, double a, double b,
                         std::size_t n);
  void (*condense)(const CondenseCoefficients& c, const double* value_n, const double* rate_n,
                   const double* residual, double* value_alpha, double* rate_alpha,
                   std::size_t n);
  void (*commit)(const CommitCoefficients& c, double* value, double* rate,
                 const double* residual, std::size_t n);
};

/// Whether the running CPU and the build both support a backend.
bool available(Backend backend) noexcept;
/// Best available backend (AVX2+FMA when present).
Backend detect() noexcept;
/// Table for a specific backend; throws std::runtime_error when unavailable.
const KernelTable& table(Backend backend);
/// Currently selected table. Defaults to detect(); CDLAB_KERNELS=scalar forces the reference.
const KernelTable& active();
void select(Backend backend);

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 translation unit was not built.
const KernelTable* avx2_table() noexcept;

// Span conveniences on the active table.
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
double weighted_sum(std::span<const double> w, std::span<const double> a);
void affine_combine(std::span<double> out, std::span<const double> x, std::span<const double> y,
                    double a, double b);

}  // namespace cdlab::kernels

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cdlab/kernels.hpp"

namespace cdlab::kernels {
namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("CDLAB_KERNELS")) {
    const std::string name(forced);
    if (name == "scalar") return &scalar_table();
    if (name == "avx2" && available(Backend::Avx2)) return avx2_table();
  }
  return &table(detect());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> selected{initial_table()};
  return selected;
}

}  // namespace

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool available(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return avx2_table() != nullptr && cpu_has_avx2_fma();
  }
  return false;
}

Backend detect() noexcept { return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar; }

const KernelTable& table(Backend backend) {
  if (!available(backend)) {
    throw std::runtime_error("kernel backend not available: " + std::string(backend_name(backend)));
  }
  return backend == Backend::Avx2 ? *avx2_table() : scalar_table();
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Backend backend) { current().store(&table(backend), std::memory_order_release); }

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  if (a.size() != w.size() || b.size() != w.size()) {
    throw std::invalid_argument("weighted_dot: size mismatch");
  }
  return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
  if (a.size() != w.size()) throw std::invalid_argument("weighted_sum: size mismatch");
  return active().weighted_sum(w.data(), a.data(), w.size());
}

void affine_combine(std::span<double> out, std::span<const double> x, std::span<const double> y,
                    double a, double b) {
  if (x.size() != out.size() || y.size() != out.size()) {
    throw std::invalid_argument("affine_combine: size mismatch");
  }
  active().affine_combine(out.data(), x.data(), y.data(), a, b, out.size());
}

}  // namespace cdlab::kernels

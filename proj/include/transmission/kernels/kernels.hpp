#pragma once

// Data-parallel inner loops used by the solvers. Every kernel has a scalar
// reference implementation; an AVX2/FMA variant is selected at runtime when
// the CPU supports it. Set TRANSMISSION_SIMD=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace transmission::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a_i * b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w_i * u_i^2
  double (*weighted_sq_norm)(const double* w, const double* u, std::size_t n);
  // sum_i w_i * |u_i|
  double (*weighted_abs_sum)(const double* w, const double* u, std::size_t n);
  // max_i |u_i| (0 for n == 0)
  double (*max_abs)(const double* u, std::size_t n);
  // y_i += alpha * x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out_i += coef * |u_i|^power * u_i, power a nonnegative integer
  void (*odd_power_accumulate)(double coef, unsigned power, const double* u, double* out,
                               std::size_t n);
  // out_i += coef * |u_i|^power, power a nonnegative integer
  void (*even_power_accumulate)(double coef, unsigned power, const double* u, double* out,
                                std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();
bool cpu_supports_avx2();

// Table chosen at first use (AVX2 if compiled and supported, unless overridden).
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double weighted_sq_norm(std::span<const double> w, std::span<const double> u) {
  return active().weighted_sq_norm(w.data(), u.data(), u.size());
}
inline double weighted_abs_sum(std::span<const double> w, std::span<const double> u) {
  return active().weighted_abs_sum(w.data(), u.data(), u.size());
}
inline double max_abs(std::span<const double> u) { return active().max_abs(u.data(), u.size()); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

}  // namespace transmission::kernels

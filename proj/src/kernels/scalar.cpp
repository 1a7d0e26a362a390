#include "transmission/kernels/kernels.hpp"

#include <cmath>

namespace transmission::kernels {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_sq_norm_ref(const double* w, const double* u, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * u[i] * u[i];
  return s;
}

double weighted_abs_sum_ref(const double* w, const double* u, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::abs(u[i]);
  return s;
}

double max_abs_ref(const double* u, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline double ipow(double base, unsigned p) {
  double r = 1.0;
  while (p != 0) {
    if (p & 1u) r *= base;
    base *= base;
    p >>= 1u;
  }
  return r;
}

void odd_power_ref(double coef, unsigned power, const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += coef * ipow(std::abs(u[i]), power) * u[i];
}

void even_power_ref(double coef, unsigned power, const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += coef * ipow(std::abs(u[i]), power);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",         dot_ref,       weighted_sq_norm_ref,
                                 weighted_abs_sum_ref, max_abs_ref, axpy_ref,
                                 odd_power_ref,    even_power_ref};
  return table;
}

}  // namespace transmission::kernels

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "transmission/kernels/kernels.hpp"

using namespace transmission;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(kernels::scalar_table().name == "scalar");
  CHECK(kernels::active().dot != nullptr);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const kernels::KernelTable* v = kernels::avx2_table();
  if (v == nullptr || !kernels::cpu_supports_avx2()) {
    MESSAGE("AVX2 variant not available; skipping equivalence");
    return;
  }
  const auto& s = kernels::scalar_table();
  std::mt19937_64 rng(7);
  // Odd sizes exercise the remainder loops.
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 13u, 64u, 1001u}) {
    const auto a = random_vector(n, rng);
    const auto b = random_vector(n, rng);
    const auto w = random_vector(n, rng, 0.0, 1.0);
    CHECK(rel(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)) < 1e-13);
    CHECK(rel(v->weighted_sq_norm(w.data(), a.data(), n), s.weighted_sq_norm(w.data(), a.data(), n)) < 1e-13);
    CHECK(rel(v->weighted_abs_sum(w.data(), a.data(), n), s.weighted_abs_sum(w.data(), a.data(), n)) < 1e-13);
    CHECK(v->max_abs(a.data(), n) == s.max_abs(a.data(), n));

    auto y1 = b, y2 = b;
    v->axpy(0.37, a.data(), y1.data(), n);
    s.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1 + std::abs(y2[i])));

    for (unsigned p : {0u, 1u, 2u, 3u, 5u}) {
      std::vector<double> o1(n, 0.5), o2(n, 0.5), e1(n, 0.5), e2(n, 0.5);
      v->odd_power_accumulate(-1.5, p, a.data(), o1.data(), n);
      s.odd_power_accumulate(-1.5, p, a.data(), o2.data(), n);
      v->even_power_accumulate(2.0, p, a.data(), e1.data(), n);
      s.even_power_accumulate(2.0, p, a.data(), e2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(rel(o1[i], o2[i]) < 1e-13);
        CHECK(rel(e1[i], e2[i]) < 1e-13);
      }
    }
  }
}

TEST_CASE("scalar kernels on hand values") {
  const auto& s = kernels::scalar_table();
  const double u[] = {1.0, -2.0, 3.0};
  const double w[] = {0.5, 0.25, 1.0};
  CHECK(s.dot(u, u, 3) == 14.0);
  CHECK(s.weighted_sq_norm(w, u, 3) == 0.5 + 1.0 + 9.0);
  CHECK(s.weighted_abs_sum(w, u, 3) == 0.5 + 0.5 + 3.0);
  CHECK(s.max_abs(u, 3) == 3.0);
  CHECK(s.max_abs(u, 0) == 0.0);
  double out[3] = {0, 0, 0};
  s.odd_power_accumulate(1.0, 2, u, out, 3);
  CHECK(out[1] == -8.0);
  double ev[3] = {0, 0, 0};
  s.even_power_accumulate(1.0, 0, u, ev, 3);
  CHECK(ev[0] == 1.0);
  CHECK(ev[1] == 1.0);
}

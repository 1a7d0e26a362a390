#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "transmission/constants.hpp"
#include "transmission/errors.hpp"
#include "transmission/operators.hpp"

using namespace transmission;

TEST_CASE("Poincare L2 estimate is refinement stable") {
  const auto a = fixture::segment_problem(16);
  const auto b = fixture::segment_problem(32);
  const double ca = poincare_mean_sigma(a.mesh, a.measure, PoincareMode::L2_eig).value;
  const double cb = poincare_mean_sigma(b.mesh, b.measure, PoincareMode::L2_eig).value;
  MESSAGE("C_L2 n=16 " << ca << " n=32 " << cb);
  CHECK(ca > 0.0);
  CHECK(std::abs(ca - cb) / cb < 0.1);
}

TEST_CASE("Poincare L1 empirical lower bound") {
  const auto p = fixture::segment_problem(8);
  PoincareOptions opt;
  opt.starts = 10;
  const auto l1 = poincare_mean_sigma(p.mesh, p.measure, PoincareMode::L1_empirical, opt);
  const double l2 = poincare_mean_sigma(p.mesh, p.measure, PoincareMode::L2_eig).value;
  MESSAGE("L1 lower " << l1.value << " L2 " << l2 << " iterations " << l1.iterations);
  CHECK(l1.value > 0.0);
  CHECK(std::isfinite(l1.value));
}

TEST_CASE("embedding constant") {
  const auto p = fixture::segment_problem(16);
  const double d0 = 1.0;
  const double c8 = best_embedding_constant(p.op, d0 / 8, d0);
  const double c4 = best_embedding_constant(p.op, d0 / 4, d0);
  const double c2 = best_embedding_constant(p.op, d0 / 2, d0);
  CHECK(c8 > 0.0);
  CHECK(c2 <= c4);
  CHECK(c4 <= c8);
  CHECK_THROWS_AS(best_embedding_constant(p.op, 1.0, d0), ValidationError);

  const auto q = fixture::segment_problem(16, 2.0);
  CHECK(best_embedding_constant(q.op, d0 / 4, d0) >= c4);

  // Minimum Rayleigh quotient.
  const SpMat form = 0.75 * p.op.K_stiff + p.op.B_beta + p.op.Theta;
  const Vec m = p.op.full_mass();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  for (int t = 0; t < 100; ++t) {
    Vec u(p.op.size());
    for (auto& x : u) x = N(rng);
    CHECK(u.dot(form * u) / u.dot(m.asDiagonal() * u) >= c4 - 1e-8);
  }
}

TEST_CASE("interpolation zeta") {
  const auto p = fixture::segment_problem(8);
  const auto samples = zeta_samples(p.op, 10, 3);
  SUBCASE("first eigenvector with large eps needs no zeta") {
    const auto spec = spectrum_with_mass(p.op.A, p.op.full_mass(), 1);
    const std::vector<Vec> one{spec.eigenvectors.col(0)};
    const double eps = std::min(1.0, 1.0 / spec.eigenvalues[0]);
    CHECK(interpolation_zeta_on(p.op, eps, one).zeta == 0.0);
  }
  SUBCASE("eps = 1 removes the exponent") {
    const auto z = interpolation_zeta_on(p.op, 1.0, samples);
    CHECK((z.zeta == 0.0 || z.unbounded));
  }
  SUBCASE("monotone in eps and in zeta") {
    double prev = -1.0;
    for (double eps : {0.8, 0.4, 0.2, 0.1, 0.05}) {
      const auto z = interpolation_zeta_on(p.op, eps, samples);
      REQUIRE_FALSE(z.unbounded);
      CHECK(z.zeta >= prev - 1e-9);
      prev = z.zeta;
      for (double extra : {0.0, 0.5, 3.0}) CHECK(zeta_feasible(p.op, eps, z.zeta + extra, samples));
    }
  }
}

TEST_CASE("constants report round trip") {
  const auto p = fixture::segment_problem(8);
  ConstantsOptions opt;
  opt.poincare.starts = 5;
  opt.zeta_trials = 5;
  const auto r = compute_constants(p.mesh, p.measure, p.op, 1.0, opt);
  CHECK(r.C_star == r.C_sigma_omega * r.total_mass / r.domain_area);
  CHECK(r.C_bar > 0.0);
  CHECK(ConstantsReport::parse(r.serialize()) == r);
  CHECK_THROWS_AS(ConstantsReport::parse("bogus=1\n"), ConfigError);
}

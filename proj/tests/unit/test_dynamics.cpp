#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "transmission/dynamics.hpp"
#include "transmission/errors.hpp"

using namespace transmission;

namespace {

Vec random_vec(Eigen::Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  Vec v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

double m_norm(const DiscreteOperator& op, const Vec& u) {
  return std::sqrt(u.dot(op.mass().asDiagonal() * u));
}

const Nonlinearity kZero = Nonlinearity::zero();

}  // namespace

TEST_CASE("imex step basics") {
  const auto p = fixture::segment_problem(8);
  const auto cube = Nonlinearity::power(1.0, 2.0);
  CHECK(imex_step(p.op, Vec::Zero(p.op.size()), 0.01, cube, cube).norm() == 0.0);

  // Linear consistency with the exact semigroup: local error O(dt^2).
  const auto spec = spectrum(p.op);
  // Smooth data: stiff modes are outside the asymptotic regime of the step.
  const Vec u = spec.eigenvectors.leftCols(3) * Eigen::Vector3d(1.0, -0.5, 0.25);
  double prev = 0.0;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const double err = m_norm(p.op, imex_step(p.op, u, dt, kZero, kZero) - semigroup_apply(spec, dt, u).state);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
    prev = err;
  }
}

TEST_CASE("scalar ODE oracle for a constant state") {
  const auto lin = Nonlinearity::power(1.0, 0.0);
  const double c = 2.0, dt = 0.1;
  SUBCASE("static interface: explicit sink gives c(1 - dt)") {
    const auto p = fixture::segment_problem(6, 0.0, DirichletSides::none(), 0, true);
    const Vec up = imex_step(p.op, Vec::Constant(p.op.size(), c), dt, lin, kZero);
    CHECK((up.array() - c * (1.0 - dt)).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("dynamic interface: total mass balance") {
    const auto p = fixture::segment_problem(6, 0.0, DirichletSides::none(), 1, true);
    const Vec up = imex_step(p.op, Vec::Constant(p.op.size(), c), dt, lin, kZero);
    const double area = p.op.bulk_mass.sum(), W = p.op.iface_mass.sum();
    CHECK(p.op.mass().dot(up) == doctest::Approx(c * (area + W) - dt * c * area).epsilon(1e-12));
  }
}

TEST_CASE("equilibria are fixed") {
  const auto p = fixture::segment_problem(8);
  const auto one = Nonlinearity(PowerSeries::constant(1.0));
  // A U* = w solves A U + m f(U) - w h(U) = 0 with f = 0, h = 1.
  Eigen::SimplicialLDLT<SpMat> ldlt(p.op.A);
  const Vec ustar = ldlt.solve(p.op.iface_mass);
  const Vec up = imex_step(p.op, ustar, 0.05, kZero, one);
  CHECK((up - ustar).cwiseAbs().maxCoeff() <= 1e-10 * ustar.cwiseAbs().maxCoeff());
}

TEST_CASE("step control validation") {
  StepControl c;
  c.dt_min = c.dt0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  const auto p = fixture::segment_problem(4);
  CHECK_THROWS_AS(integrate(p.op, Vec::Zero(p.op.size()), kZero, kZero, 1.0, c), ValidationError);
}

TEST_CASE("linear dissipative run decays at the spectral rate") {
  const auto p = fixture::segment_problem(16);
  const double l1 = spectrum(p.op, 1).eigenvalues[0];
  const Vec u0 = random_vec(p.op.size(), 4);
  const double T = 2.0;
  const auto tr = integrate(p.op, u0, kZero, kZero, T, StepControl::fixed(1e-2));
  CHECK(tr.outcome == Outcome::Completed);
  CHECK(tr.t.back() == T);
  CHECK(m_norm(p.op, tr.states.back()) <= std::exp(-l1 * T * 0.8) * m_norm(p.op, u0));
  for (std::size_t k = 1; k < tr.size(); ++k) {
    CHECK(tr.t[k] > tr.t[k - 1]);
    CHECK(tr.dissipation[k] >= tr.dissipation[k - 1]);
  }
}

TEST_CASE("dichotomy") {
  const auto p = fixture::segment_problem(16);
  SUBCASE("bulk sink dominates the interface source") {
    const auto f = Nonlinearity::power(1.0, 2.0), h = Nonlinearity::power(1.0, 0.0);
    Vec u0 = random_vec(p.op.size(), 5, 0.0, 1.0);
    u0 *= 10.0 / u0.cwiseAbs().maxCoeff();
    StepControl c;
    const auto tr = integrate(p.op, u0, f, h, 5.0, c);
    CHECK(tr.outcome == Outcome::Completed);
    CHECK(*std::max_element(tr.sup_norm.begin(), tr.sup_norm.end()) <= 10.0 + 1e-9);
  }
  SUBCASE("both terms destabilizing") {
    const auto f = Nonlinearity::power(-1.0, 2.0), h = Nonlinearity::power(-1.0, 0.0);
    const auto spec = spectrum(p.op, 1);
    Vec u0 = spec.eigenvectors.col(0);
    u0 *= 10.0 / u0.cwiseAbs().maxCoeff();
    const auto tr = integrate(p.op, u0, f, h, 10.0, StepControl{});
    CHECK(tr.outcome == Outcome::BlowUp);
    CHECK(tr.outcome_time < 10.0);
    MESSAGE("t* = " << tr.outcome_time << " steps " << tr.accepted_steps << "/" << tr.rejected_steps);
    CHECK(tr.sup_norm.back() > 1e8);
    for (const auto& s : tr.states) CHECK(s.allFinite());

    StepControl higher;
    higher.blow_up_threshold = 1e9;
    const auto again = integrate(p.op, u0, f, h, 10.0, higher);
    CHECK(again.outcome == Outcome::BlowUp);
    CHECK(again.outcome_time >= tr.outcome_time);
  }
}

TEST_CASE("raising the threshold keeps completed runs completed") {
  const auto p = fixture::segment_problem(8);
  const auto f = Nonlinearity::power(1.0, 2.0), h = Nonlinearity::power(1.0, 0.0);
  const Vec u0 = 3.0 * random_vec(p.op.size(), 6);
  for (double thr : {1e3, 1e6, 1e9}) {
    StepControl c;
    c.blow_up_threshold = thr;
    CHECK(integrate(p.op, u0, f, h, 1.0, c).outcome == Outcome::Completed);
  }
}

TEST_CASE("positivity with a sink and an absorbing interface") {
  const auto p = fixture::segment_problem(16);
  const auto f = Nonlinearity::power(1.0, 2.0), h = Nonlinearity::power(-1.0, 0.0);
  const Vec u0 = random_vec(p.op.size(), 7, 0.0, 2.0);
  const auto tr = integrate(p.op, u0, f, h, 1.0, StepControl::fixed(1e-3));
  double lo = 0.0;
  for (const auto& s : tr.states) lo = std::min(lo, s.minCoeff());
  CHECK(lo >= -1e-10);
}

TEST_CASE("first-order convergence in dt") {
  const auto p = fixture::segment_problem(8);
  const auto f = Nonlinearity::power(1.0, 2.0), h = Nonlinearity::power(1.0, 0.0);
  const Vec u0 = random_vec(p.op.size(), 8);
  const double T = 0.5;
  auto run = [&](double dt) { return integrate(p.op, u0, f, h, T, StepControl::fixed(dt)).states.back(); };
  const Vec a = run(0.02), b = run(0.01), c = run(0.005);
  const double r = (a - b).cwiseAbs().maxCoeff() / (b - c).cwiseAbs().maxCoeff();
  MESSAGE("dt refinement ratio " << r);
  CHECK(r >= 1.5);
  CHECK(r <= 2.5);
}

TEST_CASE("semigroup property") {
  const auto p = fixture::segment_problem(8);
  const Vec u0 = random_vec(p.op.size(), 9);
  const auto spec = spectrum(p.op);
  CHECK(semigroup_defect_linear(p.op, spec, u0, 0.1, 0.0) <= 1e-12);
  CHECK(semigroup_defect_linear(p.op, spec, u0, 0.1, 0.1) <= 1e-8);
  const auto f = Nonlinearity::power(1.0, 2.0), h = Nonlinearity::power(-1.0, 0.0);
  const auto ctrl = StepControl::fixed(0.01);
  CHECK(semigroup_defect_imex(p.op, u0, f, h, 0.1, 0.0, ctrl).defect == 0.0);
  CHECK(semigroup_defect_imex(p.op, u0, f, h, 0.3, 0.2, ctrl).defect == 0.0);
  CHECK(semigroup_defect_imex(p.op, u0, f, h, 0.07, 0.13, ctrl).defect == 0.0);
}

TEST_CASE("Picard map") {
  const auto p = fixture::segment_problem(6);
  const auto spec = spectrum(p.op);
  const Vec u0 = random_vec(p.op.size(), 10);
  SUBCASE("linear problem converges in one step") {
    const auto r = picard_mild(p.op, spec, u0, kZero, kZero, 0.5, 20, 5);
    REQUIRE(r.differences.size() == 2);
    CHECK(r.differences[1] == 0.0);
    const Vec exact = semigroup_apply(spec, 0.5, u0).state;
    CHECK((r.final_iterate.back() - exact).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("contraction for small T*") {
    const auto f = Nonlinearity::power(1.0, 2.0), h = Nonlinearity::power(1.0, 0.0);
    const double T = 0.02;
    const auto r = picard_mild(p.op, spec, u0, f, h, T, 40, 8);
    CHECK_FALSE(r.diverged);
    CHECK(T * r.Q < 1.0);
    for (double ratio : r.ratios) {
      CHECK(ratio < 1.0);
      CHECK(ratio <= T * r.Q);
    }
  }
  SUBCASE("needs the complete spectrum") {
    CHECK_THROWS_AS(picard_mild(p.op, spectrum(p.op, 3), u0, kZero, kZero, 0.1, 4, 2), ValidationError);
  }
}

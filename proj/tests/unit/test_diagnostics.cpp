#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "transmission/constants.hpp"
#include "transmission/diagnostics.hpp"
#include "transmission/dynamics.hpp"
#include "transmission/errors.hpp"
#include "transmission/operators.hpp"

using namespace transmission;

namespace {

const Nonlinearity kZero = Nonlinearity::zero();

Nonlinearity pw(double c, double q) { return Nonlinearity::power(c, q); }

// f = u^3 in the bulk, h = -u - 1 on the interface: dissipative with a
// nonzero attractor.
Nonlinearity sink_h() { return Nonlinearity(PowerSeries::odd_power(-1.0, 0.0) + PowerSeries::constant(-1.0)); }

Vec smooth_datum(const DiscreteOperator& op, double amplitude) {
  const auto spec = spectrum(op, 3);
  Vec u = spec.eigenvectors.leftCols(3) * Eigen::Vector3d(1.0, 0.5, -0.25);
  return u * (amplitude / u.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("energy closed forms") {
  const auto p = fixture::segment_problem(8, 1.0, DirichletSides::none());
  const auto cube = pw(1, 2);
  CHECK(energy(p.op, Vec::Zero(p.op.size()), cube, cube).total == 0.0);

  for (double c : {0.5, 1.0, 3.0}) {
    const Vec U = Vec::Constant(p.op.size(), c);
    const auto e = energy(p.op, U, cube, kZero);
    const double W = p.op.iface_mass.sum();
    const double area = p.op.bulk_mass.sum();
    CHECK(area == doctest::Approx(1.0));
    CHECK(e.total == doctest::Approx(0.5 * c * c * W + std::pow(c, 4) / 4.0 * area).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(e.form + e.bulk_primitive + e.iface_primitive));
    CHECK(e.iface_primitive == 0.0);
  }
}

TEST_CASE("energy report and inequality") {
  const auto p = fixture::segment_problem(16);
  SUBCASE("linear run dissipates energy exactly") {
    const auto tr = integrate(p.op, smooth_datum(p.op, 1.0), kZero, kZero, 0.5, StepControl::fixed(1e-3));
    const auto r = energy_inequality_residual(tr, p.op, kZero, kZero);
    CHECK(r.max_residual <= 1e-10);
    const auto rep = energy_report(tr, p.op, kZero, kZero);
    for (std::size_t i = 1; i < rep.D.size(); ++i) {
      CHECK(rep.D[i] >= rep.D[i - 1]);
      CHECK(rep.E[i] <= rep.E[i - 1] + 1e-14);
    }
  }
  SUBCASE("gradient flow with a cubic") {
    const auto f = pw(1, 2), h = pw(-1, 0);
    const Vec U0 = smooth_datum(p.op, 1.0);
    const auto r = energy_inequality_residual(integrate(p.op, U0, f, h, 0.2, StepControl::fixed(1e-3)), p.op, f, h);
    CHECK(r.max_residual <= 1e-6 * (1.0 + std::abs(r.e0)));
    CHECK(r.dt == doctest::Approx(1e-3));
  }
  SUBCASE("positive residual shrinks with dt") {
    const auto f = pw(1, 2), h = pw(-1, 0);
    // Large enough that the explicit nonlinear term leaves a positive residual.
    const Vec U0 = smooth_datum(p.op, 3.0);
    const auto a = energy_inequality_residual(integrate(p.op, U0, f, h, 1.0, StepControl::fixed(2e-3)), p.op, f, h);
    const auto b = energy_inequality_residual(integrate(p.op, U0, f, h, 1.0, StepControl::fixed(1e-3)), p.op, f, h);
    REQUIRE(b.max_positive > 0.0);
    CHECK(a.max_positive / b.max_positive >= 1.5);
  }
}

TEST_CASE("linear decay rate matches the first eigenvalue") {
  const auto p = fixture::segment_problem(16);
  const double l1 = spectrum(p.op, 1).eigenvalues(0);
  const auto tr = integrate(p.op, smooth_datum(p.op, 1.0), kZero, kZero, 3.0, StepControl::fixed(1e-3));
  CHECK(decay_rate_fit(tr, p.op, 1.0, 3.0) == doctest::Approx(2.0 * l1).epsilon(0.2));
}

TEST_CASE("absorbing ball") {
  const auto p = fixture::segment_problem(8);
  ConstantsOptions opt;
  opt.zeta_trials = 4;
  opt.poincare.starts = 8;
  opt.poincare.iterations = 50;
  const auto c = compute_constants(p.mesh, p.measure, p.op, 1.0, opt);
  const auto f = pw(1, 2), h = sink_h();
  std::vector<Trajectory> trs;
  for (double a : {1.0, 10.0, 50.0}) {
    StepControl ctrl;
    ctrl.dt_max = 0.02;
    trs.push_back(integrate(p.op, smooth_datum(p.op, a), f, h, 6.0, ctrl));
    REQUIRE(trs.back().outcome == Outcome::Completed);
  }
  const auto fit = absorbing_ball_check(trs, p.op, c, 0.0, Verdict::GlobalBounded);
  CHECK(fit.threshold == doctest::Approx(0.8 * 2.0 * c.C_bar));
  CHECK(fit.eta_fit > 0.0);
  CHECK(fit.terminal_ok);
  CHECK(fit.terminal_sup_spread < 0.1);
  CHECK_THROWS_AS(absorbing_ball_check(trs, p.op, c, 0.0, Verdict::Indeterminate), ValidationError);
  trs.pop_back();
  CHECK_THROWS_AS(absorbing_ball_check(trs, p.op, c, 0.0, Verdict::GlobalBounded), ValidationError);
}

TEST_CASE("squeezing") {
  const auto p = fixture::segment_problem(8);
  const Vec a = smooth_datum(p.op, 1.0);
  const auto ctrl = StepControl::fixed(2e-3);
  const auto same = squeezing_check(p.op, a, a, pw(1, 2), sink_h(), 0.5, ctrl);
  CHECK(same.identical);
  CHECK(same.terminal_distance == 0.0);

  const Vec b = a + 1e-2 * smooth_datum(p.op, 1.0).reverse();
  const auto lin = squeezing_check(p.op, a, b, kZero, kZero, 2.0, ctrl);
  CHECK(lin.omega > 0.0);
  CHECK(lin.terminal_distance < lin.initial_distance);
  const auto cub = squeezing_check(p.op, a, b, pw(1, 2), sink_h(), 2.0, ctrl);
  CHECK(cub.omega > 0.0);
  CHECK(cub.r_squared > 0.9);

  StepControl blow = StepControl::fixed(1e-3, 1e3);
  CHECK_THROWS_AS(squeezing_check(p.op, 10.0 * a, 10.0 * b, pw(-1, 2), kZero, 1.0, blow), NumericError);
}

TEST_CASE("holder modulus") {
  const auto p = fixture::segment_problem(8);
  const auto eq = integrate(p.op, Vec::Zero(p.op.size()), kZero, kZero, 1.0, StepControl::fixed(1e-2));
  const auto d = holder_time_modulus(eq, 0.1);
  CHECK(d.degenerate);
  CHECK(d.rho == 1.0);

  const auto tr = integrate(p.op, smooth_datum(p.op, 1.0), kZero, kZero, 1.0, StepControl::fixed(1e-3));
  // Away from t = 0 the exponential decay does not bend the fit.
  const auto fit = holder_time_modulus(tr, 0.5);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.decades >= 1.5);
  CHECK(fit.rho > 0.9);
  CHECK(fit.rho <= 1.0);
}

TEST_CASE("moser domination") {
  const auto p = fixture::segment_problem(8);
  const Vec U = smooth_datum(p.op, 2.0);
  Trajectory tr;
  for (int i = 0; i <= 10; ++i) {
    tr.t.push_back(0.1 * i);
    tr.dt.push_back(i ? 0.1 : 0.0);
    tr.states.push_back(U);
    tr.sup_norm.push_back(U.cwiseAbs().maxCoeff());
    tr.dissipation.push_back(0.0);
  }
  const auto r = moser_domination_check(tr, p.op, 0.0, 1.0);
  const double x2 = x2_norm(p.op, U);
  CHECK(r.ratio == doctest::Approx(2.0 / std::max(2.0, x2)));
  CHECK(r.C_inf == 2.0);
  CHECK(moser_domination_check(tr, p.op, 0.0, 1.0, 1e-3).ratio == doctest::Approx(2.0 / x2));
}

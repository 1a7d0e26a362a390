#include "transmission/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "transmission/errors.hpp"
#include "transmission/kernels/kernels.hpp"

namespace transmission {

EnergyBreakdown energy(const DiscreteOperator& op, const Vec& U, const Nonlinearity& f,
                       const Nonlinearity& h) {
  EnergyBreakdown e;
  e.form = 0.5 * quadratic_form(op, U, U);
  Vec fb(U.size()), hb(U.size());
  f.primitive_series().evaluate(view(U), view(fb));
  h.primitive_series().evaluate(view(U), view(hb));
  e.bulk_primitive = kernels::dot(view(op.bulk_mass), view(fb));
  e.iface_primitive = -kernels::dot(view(op.iface_mass), view(hb));
  e.total = e.form + e.bulk_primitive + e.iface_primitive;
  return e;
}

double e1(const DiscreteOperator& op, const Vec& U) {
  const Vec m = op.full_mass();
  return kernels::weighted_sq_norm(view(m), view(U));
}

EnergyReport energy_report(const Trajectory& tr, const DiscreteOperator& op, const Nonlinearity& f,
                           const Nonlinearity& h) {
  EnergyReport r;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double x2 = e1(op, tr.states[k]);
    r.t.push_back(tr.t[k]);
    r.E.push_back(energy(op, tr.states[k], f, h).total);
    r.G.push_back(0.5 * x2);
    r.D.push_back(tr.dissipation[k]);
    r.sup_norm.push_back(tr.sup_norm[k]);
    r.x2_norm.push_back(std::sqrt(x2));
  }
  return r;
}

EnergyResidual energy_inequality_residual(const Trajectory& tr, const DiscreteOperator& op,
                                          const Nonlinearity& f, const Nonlinearity& h) {
  EnergyResidual r;
  if (tr.size() == 0) return r;
  r.e0 = energy(op, tr.states[0], f, h).total;
  r.max_residual = -HUGE_VAL;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.outcome == Outcome::BlowUp && tr.t[k] > tr.outcome_time) break;
    r.max_residual = std::max(r.max_residual, energy(op, tr.states[k], f, h).total + tr.dissipation[k] - r.e0);
    r.dt = std::max(r.dt, tr.dt[k]);
  }
  r.max_positive = std::max(0.0, r.max_residual);
  return r;
}

double decay_rate_fit(const Trajectory& tr, const DiscreteOperator& op, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < tr.size(); ++k)
    if (tr.t[k] >= t_lo && tr.t[k] <= t_hi) {
      const double v = e1(op, tr.states[k]);
      if (v > 0.0) {
        x.push_back(tr.t[k]);
        y.push_back(std::log(v));
      }
    }
  if (x.size() < 3) throw ValidationError("decay fit needs at least 3 samples in the window");
  return -fit_line(x, y).slope;
}

AbsorbingFit absorbing_ball_check(const std::vector<Trajectory>& trajectories, const DiscreteOperator& op,
                                  const ConstantsReport& constants, double lambda_star, Verdict verdict) {
  if (verdict != Verdict::GlobalBounded)
    throw ValidationError(fmt::format("absorbing ball check refuses verdict {}", to_string(verdict)));
  if (trajectories.size() < 3) throw ValidationError("absorbing ball check needs at least 3 trajectories");
  AbsorbingFit fit;
  fit.threshold = 0.8 * 2.0 * (constants.C_bar - lambda_star);
  std::vector<double> term_e1, term_sup;
  for (const auto& tr : trajectories) {
    if (tr.outcome != Outcome::Completed) throw NumericError("absorbing ball check needs completed runs");
    term_e1.push_back(e1(op, tr.states.back()));
    term_sup.push_back(tr.sup_norm.back());
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  };
  fit.terminal_e1_spread = spread(term_e1);
  fit.terminal_sup_spread = spread(term_sup);
  fit.C_fit = *std::max_element(term_e1.begin(), term_e1.end());
  // Smallest rate making E1(0) e^{-eta t} + C_fit an envelope of every sample.
  fit.eta_fit = HUGE_VAL;
  for (const auto& tr : trajectories) {
    const double base = e1(op, tr.states[0]);
    for (std::size_t k = 1; k < tr.size(); ++k) {
      const double excess = e1(op, tr.states[k]) - fit.C_fit;
      if (excess <= 0.0 || base <= 0.0) continue;
      fit.eta_fit = std::min(fit.eta_fit, -std::log(excess / base) / tr.t[k]);
    }
  }
  if (fit.eta_fit == HUGE_VAL) fit.eta_fit = 0.0;
  fit.rate_ok = fit.eta_fit >= fit.threshold;
  fit.terminal_ok = fit.terminal_e1_spread <= 0.1;
  return fit;
}

SqueezeFit squeezing_check(const DiscreteOperator& op, const Vec& U0a, const Vec& U0b,
                           const Nonlinearity& f, const Nonlinearity& h, double T, const StepControl& ctrl) {
  const auto a = integrate(op, U0a, f, h, T, ctrl);
  const auto b = integrate(op, U0b, f, h, T, ctrl);
  if (a.outcome != Outcome::Completed || b.outcome != Outcome::Completed)
    throw NumericError("squeezing check refuses: a trajectory did not complete");
  if (a.t != b.t) throw ValidationError("squeezing check needs identical time grids; use a fixed step");
  SqueezeFit fit;
  fit.t = a.t;
  for (std::size_t k = 0; k < a.size(); ++k) fit.distance_sq.push_back(e1(op, a.states[k] - b.states[k]));
  fit.initial_distance = std::sqrt(fit.distance_sq.front());
  fit.terminal_distance = std::sqrt(fit.distance_sq.back());
  if (fit.distance_sq.front() == 0.0) {
    fit.identical = true;
    return fit;
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < fit.t.size(); ++k)
    if (fit.distance_sq[k] > 1e-300) {
      x.push_back(fit.t[k]);
      y.push_back(std::log(fit.distance_sq[k]));
    }
  if (x.size() < 3) throw ValidationError("squeezing fit needs at least 3 nonzero distances");
  const auto line = fit_line(x, y);
  fit.omega = -line.slope;
  fit.r_squared = line.r_squared;
  for (std::size_t k = 0; k < fit.t.size(); ++k)
    fit.M = std::max(fit.M, fit.distance_sq[k] * std::exp(fit.omega * fit.t[k]) / fit.distance_sq.front());
  return fit;
}

HolderFit holder_time_modulus(const Trajectory& tr, double t_lo) {
  if (!(t_lo > 0.0)) throw ValidationError("Holder fit window must exclude t = 0");
  std::size_t first = 0;
  while (first < tr.size() && tr.t[first] < t_lo) ++first;
  const std::size_t n = tr.size() - first;
  if (n < 2) throw ValidationError("Holder fit needs samples after t_lo");
  const double step = tr.t[first + 1] - tr.t[first];
  for (std::size_t k = first + 1; k < tr.size(); ++k)
    if (std::abs((tr.t[k] - tr.t[k - 1]) - step) > 1e-9 * step)
      throw ValidationError("Holder fit needs uniformly spaced samples");
  HolderFit fit;
  std::vector<std::size_t> lags;
  for (std::size_t k = 1; k < n; k *= 2) lags.push_back(k);
  if (lags.size() < 4)
    throw ValidationError(fmt::format("Holder fit needs at least 4 gap scales, got {}", lags.size()));
  fit.decades = std::log10(static_cast<double>(lags.back()) / lags.front());
  std::vector<double> x, y;
  for (std::size_t lag : lags) {
    double inc = 0.0;
    for (std::size_t i = first; i + lag < tr.size(); ++i)
      inc = std::max(inc, (tr.states[i + lag] - tr.states[i]).cwiseAbs().maxCoeff());
    fit.gaps.push_back(lag * step);
    fit.increments.push_back(inc);
    if (inc > 0.0) {
      x.push_back(std::log(lag * step));
      y.push_back(std::log(inc));
    }
  }
  if (x.size() < 2) {
    fit.degenerate = true;
    fit.rho = 1.0;
    return fit;
  }
  const auto line = fit_line(x, y);
  fit.rho = std::clamp(line.slope, 1e-12, 1.0);
  fit.constant = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  return fit;
}

MoserReport moser_domination_check(const Trajectory& tr, const DiscreteOperator& op, double t_lo,
                                   double t_hi, double C_inf) {
  MoserReport r;
  r.C_inf = C_inf > 0.0 ? C_inf : kernels::max_abs(view(tr.states.front()));
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.t[k] < t_lo || tr.t[k] > t_hi) continue;
    r.sup_inf = std::max(r.sup_inf, tr.sup_norm[k]);
    r.sup_x2 = std::max(r.sup_x2, std::sqrt(e1(op, tr.states[k])));
  }
  const double den = std::max(r.C_inf, r.sup_x2);
  r.ratio = den > 0.0 ? r.sup_inf / den : 0.0;
  return r;
}

}  // namespace transmission

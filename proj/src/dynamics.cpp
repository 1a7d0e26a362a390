#include "transmission/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "transmission/errors.hpp"
#include "transmission/kernels/kernels.hpp"

namespace transmission {

void StepControl::validate() const {
  std::vector<std::string> bad;
  if (!(dt0 > 0.0)) bad.push_back(fmt::format("dt0={} must be > 0", dt0));
  if (!(dt_min > 0.0) || dt_min >= dt0) bad.push_back(fmt::format("need 0 < dt_min < dt0 (dt_min={}, dt0={})", dt_min, dt0));
  if (dt_max < dt0) bad.push_back(fmt::format("dt_max={} below dt0={}", dt_max, dt0));
  if (!(growth_cap > 1.0)) bad.push_back(fmt::format("growth_cap={} must be > 1", growth_cap));
  if (!(blow_up_threshold > 0.0)) bad.push_back("blow_up_threshold must be > 0");
  if (grow_after < 1 || !(grow_factor >= 1.0)) bad.push_back("step growth needs grow_after >= 1 and grow_factor >= 1");
  if (record_every < 1) bad.push_back("record_every must be >= 1");
  if (!bad.empty()) {
    std::string msg = "invalid step control:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ValidationError(msg);
  }
}

StepControl StepControl::fixed(double dt, double blow_up_threshold) {
  StepControl c;
  c.dt0 = dt;
  c.dt_max = dt;
  c.blow_up_threshold = blow_up_threshold;
  return c;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "Completed";
    case Outcome::BlowUp: return "BlowUp";
    case Outcome::StalledStep: return "StalledStep";
  }
  return "?";
}

Vec nonlinear_forcing(const DiscreteOperator& op, const Vec& U, const Nonlinearity& f,
                      const Nonlinearity& h) {
  const auto n = static_cast<std::size_t>(U.size());
  Vec fu(U.size()), hu(U.size());
  f.evaluate(view(U), view(fu));
  h.evaluate(view(U), view(hu));
  Vec g = op.bulk_mass.cwiseProduct(fu);
  const Vec wh = op.iface_mass.cwiseProduct(hu);
  kernels::active().axpy(-1.0, wh.data(), g.data(), n);
  return g;
}

ImexStepper::ImexStepper(const DiscreteOperator& op, const Nonlinearity& f, const Nonlinearity& h)
    : op_(op), f_(f), h_(h), mass_(op.mass()) {}

const ShiftedSolver& ImexStepper::solver(double dt) {
  auto it = cache_.find(dt);
  if (it == cache_.end()) {
    // Step sizes only come from halving and growing; a handful are live at once.
    if (cache_.size() >= 16) cache_.clear();
    it = cache_.emplace(dt, std::make_unique<ShiftedSolver>(op_.A, mass_, dt)).first;
  }
  return *it->second;
}

Vec ImexStepper::step(const Vec& U, double dt) {
  Vec rhs = mass_.cwiseProduct(U);
  if (!f_.is_zero() || !h_.is_zero()) {
    const Vec g = nonlinear_forcing(op_, U, f_, h_);
    kernels::axpy(-dt, view(g), view(rhs));
  }
  return solver(dt).solve(rhs);
}

Vec imex_step(const DiscreteOperator& op, const Vec& U, double dt, const Nonlinearity& f,
              const Nonlinearity& h) {
  ImexStepper stepper(op, f, h);
  return stepper.step(U, dt);
}

namespace {

void record(Trajectory& tr, double t, double dt, const Vec& U, double sup, double diss) {
  tr.t.push_back(t);
  tr.dt.push_back(dt);
  tr.states.push_back(U);
  tr.sup_norm.push_back(sup);
  tr.dissipation.push_back(diss);
}

// Keeps recorded times strictly increasing in double precision. A forced
// record that rounds onto the previous time replaces it.
void record_strict(Trajectory& tr, double t, double dt, const Vec& U, double sup, double diss,
                   bool force) {
  if (tr.t.size() > 1 && t <= tr.t.back()) {
    if (!force) return;
    tr.t.pop_back();
    tr.dt.pop_back();
    tr.states.pop_back();
    tr.sup_norm.pop_back();
    tr.dissipation.pop_back();
    t = std::max(t, tr.t.back());
    if (t <= tr.t.back()) t = std::nextafter(tr.t.back(), HUGE_VAL);
  }
  record(tr, t, dt, U, sup, diss);
}

}  // namespace

Trajectory integrate(const DiscreteOperator& op, const Vec& U0, const Nonlinearity& f,
                     const Nonlinearity& h, double T, const StepControl& ctrl) {
  ctrl.validate();
  if (U0.size() != op.size()) throw ValidationError("initial state has the wrong size");
  if (!U0.allFinite()) throw ValidationError("initial state is not finite");
  if (!(T >= 0.0)) throw ValidationError("horizon T must be >= 0");

  ImexStepper stepper(op, f, h);
  const Vec mass = op.mass();
  Trajectory tr;
  Vec U = U0;
  // Time is accumulated in extended precision: near blow-up the accepted
  // steps fall far below the double resolution of t.
  long double t = 0.0L;
  double dt = std::min(ctrl.dt0, ctrl.dt_max), diss = 0.0;
  double sup = kernels::max_abs(view(U));
  record(tr, 0.0, 0.0, U, sup, 0.0);
  int since_growth = 0;
  bool last_recorded = true;

  while (t < T) {
    // Snap the final step when it is within rounding of a full step, so runs
    // over [0, a+b] and [0, a] then [0, b] take identical step sequences.
    const double remaining = static_cast<double>(static_cast<long double>(T) - t);
    bool last = false;
    double h_step = dt;
    if (remaining <= dt * (1.0 + 1e-9)) {
      last = true;
      if (std::abs(remaining - dt) > 1e-9 * dt) h_step = remaining;
    }
    if (t + h_step == t) {
      tr.outcome = Outcome::StalledStep;
      tr.outcome_time = static_cast<double>(t);
      break;
    }
    Vec next;
    bool solved = true;
    try {
      next = stepper.step(U, h_step);
    } catch (const NumericError&) {
      solved = false;
    }
    if (solved) {
      const double sup_next = kernels::max_abs(view(next));
      if (sup_next > ctrl.blow_up_threshold) {
        const Vec dU = next - U;
        diss += kernels::weighted_sq_norm(view(mass), view(dU)) / h_step;
        record_strict(tr, static_cast<double>(t + h_step), h_step, next, sup_next, diss, true);
        ++tr.accepted_steps;
        tr.outcome = Outcome::BlowUp;
        tr.outcome_time = static_cast<double>(t);
        return tr;
      }
      // Relative growth measured against max(|U|, 1) so small states driven
      // by a source term do not count as explosive.
      const double growth = std::max(sup_next, 1.0) / std::max(sup, 1.0);
      if (growth <= ctrl.growth_cap) {
        const Vec dU = next - U;
        diss += kernels::weighted_sq_norm(view(mass), view(dU)) / h_step;
        t = last ? static_cast<long double>(T) : t + h_step;
        U = std::move(next);
        sup = sup_next;
        ++tr.accepted_steps;
        last_recorded = (tr.accepted_steps % ctrl.record_every == 0) || last;
        if (last_recorded) record_strict(tr, static_cast<double>(t), h_step, U, sup, diss, last);
        if (++since_growth >= ctrl.grow_after) {
          dt = std::min(dt * ctrl.grow_factor, ctrl.dt_max);
          since_growth = 0;
        }
        continue;
      }
    }
    ++tr.rejected_steps;
    dt = h_step * 0.5;
    since_growth = 0;
    if (dt < ctrl.dt_min) {
      tr.outcome = Outcome::StalledStep;
      tr.outcome_time = static_cast<double>(t);
      break;
    }
  }
  if (!last_recorded) record_strict(tr, static_cast<double>(t), tr.dt.back(), U, sup, diss, true);
  if (tr.outcome == Outcome::Completed) tr.outcome_time = static_cast<double>(t);
  return tr;
}

double lipschitz_modulus(const Nonlinearity& f, const Nonlinearity& h, double R) {
  double mf = 0.0, mh = 0.0;
  const int n = 2001;
  for (int i = 0; i < n; ++i) {
    const double tau = -R + 2.0 * R * i / (n - 1);
    mf = std::max(mf, std::abs(f.derivative(tau)));
    mh = std::max(mh, std::abs(h.derivative(tau)));
  }
  return mf + mh;
}

namespace {

// Weights of the product trapezoidal rule for int_0^D e^{-lambda(D - s)} b(s) ds
// with b linear between its endpoint values: w_left b(0) + w_right b(D).
void product_weights(double lambda, double D, double& w_left, double& w_right) {
  const double z = lambda * D;
  double phi1, phi2;  // (1 - e^-z)/z, (1 - e^-z (1 + z))/z^2
  if (std::abs(z) < 1e-3) {
    phi1 = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    phi2 = 0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0;
  } else {
    const double e = std::exp(-z);
    phi1 = (1.0 - e) / z;
    phi2 = (1.0 - e * (1.0 + z)) / (z * z);
  }
  w_left = D * phi2;
  w_right = D * (phi1 - phi2);
}

}  // namespace

PicardResult picard_mild(const DiscreteOperator& op, const SpectralData& spec, const Vec& U0,
                         const Nonlinearity& f, const Nonlinearity& h, double T_star, int n_grid,
                         int n_iter, double R_star) {
  if (!spec.complete) throw ValidationError("Picard map needs the complete spectrum");
  if (op.delta != 1) throw ValidationError("Picard map is implemented for the dynamic condition delta=1");
  if (!(T_star > 0.0) || n_grid < 1 || n_iter < 1)
    throw ValidationError("Picard map needs T* > 0, n_grid >= 1, n_iter >= 1");
  PicardResult res;
  const double u0max = kernels::max_abs(view(U0));
  res.R_star = R_star > 0.0 ? R_star : std::max(2.0 * u0max, 1.0);
  res.Q = lipschitz_modulus(f, h, res.R_star);
  const double D = T_star / n_grid;
  for (int j = 0; j <= n_grid; ++j) res.grid.push_back(j * D);

  const Mat& Phi = spec.eigenvectors;
  const Vec& lam = spec.eigenvalues;
  const Eigen::Index K = lam.size();
  const Vec a0 = Phi.transpose() * spec.mass.cwiseProduct(U0);
  Vec wl(K), wr(K), decay(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    product_weights(lam[k], D, wl[k], wr[k]);
    decay[k] = std::exp(-lam[k] * D);
  }
  // Free evolution on the grid.
  std::vector<Vec> free(n_grid + 1);
  for (int j = 0; j <= n_grid; ++j)
    free[j] = Phi * (a0.array() * (-lam.array() * res.grid[j]).exp()).matrix();

  std::vector<Vec> V(n_grid + 1, U0), next(n_grid + 1);
  for (int it = 0; it < n_iter; ++it) {
    std::vector<Vec> b(n_grid + 1);
    for (int j = 0; j <= n_grid; ++j) b[j] = Phi.transpose() * nonlinear_forcing(op, V[j], f, h);
    Vec I = Vec::Zero(K);
    double diff = 0.0, vmax = 0.0;
    for (int j = 0; j <= n_grid; ++j) {
      if (j > 0) I = decay.cwiseProduct(I) + wl.cwiseProduct(b[j - 1]) + wr.cwiseProduct(b[j]);
      next[j] = free[j] - Phi * I;
      diff = std::max(diff, (next[j] - V[j]).cwiseAbs().maxCoeff());
      vmax = std::max(vmax, next[j].cwiseAbs().maxCoeff());
    }
    V.swap(next);
    res.iterations = it + 1;
    if (!res.differences.empty() && res.differences.back() > 0.0)
      res.ratios.push_back(diff / res.differences.back());
    res.differences.push_back(diff);
    if (!std::isfinite(vmax) || vmax > 10.0 * res.R_star) {
      res.diverged = true;
      break;
    }
    if (diff <= 1e-14 * std::max(1.0, vmax)) break;
  }
  res.final_iterate = std::move(V);
  return res;
}

double x2_norm(const DiscreteOperator& op, const Vec& U) {
  const Vec m = op.full_mass();
  return std::sqrt(kernels::weighted_sq_norm(view(m), view(U)));
}

double semigroup_defect_linear(const DiscreteOperator& op, const SpectralData& spec, const Vec& U0,
                               double t, double s) {
  const Vec whole = semigroup_apply(spec, t + s, U0).state;
  const Vec split = semigroup_apply(spec, t, semigroup_apply(spec, s, U0).state).state;
  return x2_norm(op, whole - split);
}

ImexDefect semigroup_defect_imex(const DiscreteOperator& op, const Vec& U0, const Nonlinearity& f,
                                 const Nonlinearity& h, double t, double s, const StepControl& ctrl) {
  ImexDefect out;
  out.dt = ctrl.dt0;
  const auto whole = integrate(op, U0, f, h, t + s, ctrl);
  const auto first = integrate(op, U0, f, h, s, ctrl);
  const auto second = integrate(op, first.states.back(), f, h, t, ctrl);
  if (whole.outcome != Outcome::Completed || first.outcome != Outcome::Completed ||
      second.outcome != Outcome::Completed)
    throw NumericError("semigroup check needs completed runs");
  out.defect = x2_norm(op, whole.states.back() - second.states.back());
  out.constant = out.defect / out.dt;
  return out;
}

}  // namespace transmission

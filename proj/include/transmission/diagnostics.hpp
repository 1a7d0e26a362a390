#pragma once

#include <vector>

#include "transmission/constants.hpp"
#include "transmission/dynamics.hpp"
#include "transmission/verdict.hpp"

namespace transmission {

struct EnergyBreakdown {
  double form = 0.0;             // A(U,U)/2
  double bulk_primitive = 0.0;   // sum m_i fbar(u_i)
  double iface_primitive = 0.0;  // -sum w_i hbar(u_i)
  double total = 0.0;
};

EnergyBreakdown energy(const DiscreteOperator& op, const Vec& U, const Nonlinearity& f,
                       const Nonlinearity& h);

// ||U||^2 in X2(Omega, Sigma).
double e1(const DiscreteOperator& op, const Vec& U);

struct EnergyReport {
  std::vector<double> t, E, G, D, sup_norm, x2_norm;
};

EnergyReport energy_report(const Trajectory& tr, const DiscreteOperator& op, const Nonlinearity& f,
                           const Nonlinearity& h);

struct EnergyResidual {
  double max_residual = 0.0;  // max_n E(t_n) + D(t_n) - E(0)
  double max_positive = 0.0;  // max(0, max_residual)
  double e0 = 0.0;
  double dt = 0.0;            // largest step in the trajectory
};

// Needs a trajectory recorded at every step.
EnergyResidual energy_inequality_residual(const Trajectory& tr, const DiscreteOperator& op,
                                          const Nonlinearity& f, const Nonlinearity& h);

// Exponential rate of E1 from a least-squares fit of log E1 over [t_lo, t_hi].
double decay_rate_fit(const Trajectory& tr, const DiscreteOperator& op, double t_lo, double t_hi);

struct AbsorbingFit {
  double eta_fit = 0.0;
  double C_fit = 0.0;
  double threshold = 0.0;  // 0.8 * 2 (C_bar - lambda*)
  double terminal_e1_spread = 0.0;   // (max - min) / max over the ensemble
  double terminal_sup_spread = 0.0;
  bool rate_ok = false;
  bool terminal_ok = false;
};

// E1(t) <= E1(0) e^{-eta t} + C over the ensemble. Refuses anything but a
// GlobalBounded verdict.
AbsorbingFit absorbing_ball_check(const std::vector<Trajectory>& trajectories, const DiscreteOperator& op,
                                  const ConstantsReport& constants, double lambda_star, Verdict verdict);

struct SqueezeFit {
  double M = 0.0;
  double omega = 0.0;
  double K = 0.0;
  double initial_distance = 0.0;   // X2 norm
  double terminal_distance = 0.0;
  double r_squared = 0.0;
  std::vector<double> t, distance_sq;
  bool identical = false;
};

// Runs both trajectories with the same controller; the time grids must agree.
SqueezeFit squeezing_check(const DiscreteOperator& op, const Vec& U0a, const Vec& U0b,
                           const Nonlinearity& f, const Nonlinearity& h, double T, const StepControl& ctrl);

struct HolderFit {
  double rho = 1.0;
  double constant = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;
  std::vector<double> gaps, increments;
  double decades = 0.0;
};

// Records with t >= t_lo > 0 must be uniformly spaced.
HolderFit holder_time_modulus(const Trajectory& tr, double t_lo);

struct MoserReport {
  double ratio = 0.0;
  double sup_inf = 0.0;
  double sup_x2 = 0.0;
  double C_inf = 0.0;
};

// sup ||U||_inf / max(C_inf, sup ||U||_X2) over [t_lo, t_hi]; C_inf <= 0
// selects ||U0||_inf.
MoserReport moser_domination_check(const Trajectory& tr, const DiscreteOperator& op, double t_lo,
                                   double t_hi, double C_inf = 0.0);

}  // namespace transmission

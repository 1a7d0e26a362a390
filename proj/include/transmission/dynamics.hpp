#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "transmission/assembly.hpp"
#include "transmission/nonlinearity.hpp"
#include "transmission/operators.hpp"

namespace transmission {

struct StepControl {
  double dt0 = 1e-3;
  double dt_min = 1e-18;
  double dt_max = 0.1;
  double growth_cap = 1.5;
  double blow_up_threshold = 1e8;
  int grow_after = 5;
  double grow_factor = 1.2;
  int record_every = 1;  // keep every k-th accepted state (the last one is always kept)

  void validate() const;
  // dt0 == dt_max, so the step never changes unless the growth cap fires.
  static StepControl fixed(double dt, double blow_up_threshold = 1e8);
};

enum class Outcome { Completed, BlowUp, StalledStep };
std::string to_string(Outcome o);

struct Trajectory {
  std::vector<double> t;
  std::vector<double> dt;           // step that produced each record (0 for the first)
  std::vector<Vec> states;
  std::vector<double> sup_norm;
  std::vector<double> dissipation;  // cumulative sum dt ||dU/dt||_M^2
  Outcome outcome = Outcome::Completed;
  double outcome_time = 0.0;
  int accepted_steps = 0;
  int rejected_steps = 0;

  std::size_t size() const { return t.size(); }
};

// m.f(U) - w.h(U): the nodal nonlinear load, m bulk and w interface masses.
Vec nonlinear_forcing(const DiscreteOperator& op, const Vec& U, const Nonlinearity& f,
                      const Nonlinearity& h);

// Keeps factorizations of M + dt A for the step sizes in use.
class ImexStepper {
 public:
  ImexStepper(const DiscreteOperator& op, const Nonlinearity& f, const Nonlinearity& h);
  Vec step(const Vec& U, double dt);

 private:
  const ShiftedSolver& solver(double dt);

  const DiscreteOperator& op_;
  const Nonlinearity& f_;
  const Nonlinearity& h_;
  Vec mass_;
  std::map<double, std::unique_ptr<ShiftedSolver>> cache_;
};

// (M + dt A) U+ = M U - dt (m.f(U) - w.h(U))
Vec imex_step(const DiscreteOperator& op, const Vec& U, double dt, const Nonlinearity& f,
              const Nonlinearity& h);

Trajectory integrate(const DiscreteOperator& op, const Vec& U0, const Nonlinearity& f,
                     const Nonlinearity& h, double T, const StepControl& ctrl);

struct PicardResult {
  std::vector<double> grid;
  std::vector<Vec> final_iterate;  // nodal values on the grid
  std::vector<double> differences;  // ||V^{k+1} - V^k|| in C([0,T*]; X_inf)
  std::vector<double> ratios;       // differences[k] / differences[k-1]
  double Q = 0.0;       // local Lipschitz modulus on [-R*, R*]
  double R_star = 0.0;
  bool diverged = false;
  int iterations = 0;
};

// Picard iteration of the mild-solution map on a uniform grid of n_grid
// intervals; needs the complete spectrum.
PicardResult picard_mild(const DiscreteOperator& op, const SpectralData& spec, const Vec& U0,
                         const Nonlinearity& f, const Nonlinearity& h, double T_star, int n_grid,
                         int n_iter, double R_star = 0.0);

// max |f'| + max |h'| over [-R, R].
double lipschitz_modulus(const Nonlinearity& f, const Nonlinearity& h, double R);

// X2 norm (bulk plus interface mass).
double x2_norm(const DiscreteOperator& op, const Vec& U);

// ||S(t+s)U0 - S(t)S(s)U0||_{X2} with the linear eigenexpansion.
double semigroup_defect_linear(const DiscreteOperator& op, const SpectralData& spec, const Vec& U0,
                               double t, double s);

struct ImexDefect {
  double defect = 0.0;
  double dt = 0.0;
  double constant = 0.0;  // defect / dt
};

// Same with the IMEX integrator restarted from S(s)U0.
ImexDefect semigroup_defect_imex(const DiscreteOperator& op, const Vec& U0, const Nonlinearity& f,
                                 const Nonlinearity& h, double t, double s, const StepControl& ctrl);

}  // namespace transmission

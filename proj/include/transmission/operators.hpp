#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCholesky>

#include "transmission/assembly.hpp"

namespace transmission {

// Lowest eigenpairs of A v = lambda M v, M = M_bulk + delta M_iface.
struct SpectralData {
  Vec eigenvalues;   // nondecreasing
  Mat eigenvectors;  // M-orthonormal columns
  Vec mass;          // diagonal of M
  bool complete = false;  // all DOFs resolved

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

double quadratic_form(const DiscreteOperator& op, const Vec& U, const Vec& V);

// count < 0 requests the full spectrum.
SpectralData spectrum(const DiscreteOperator& op, int count = -1);
// Same, against an arbitrary positive diagonal mass.
SpectralData spectrum_with_mass(const SpMat& A, const Vec& mass, int count = -1);

struct SemigroupResult {
  Vec state;
  // M-norm of the part of F outside the computed eigenspace (0 for a full spectrum).
  double truncation_residual = 0.0;
};

// e^{-t M^{-1} A} F by eigenexpansion.
SemigroupResult semigroup_apply(const SpectralData& spec, double t, const Vec& F);

// Factorization of (M + dt A) for implicit steps.
class ShiftedSolver {
 public:
  ShiftedSolver(const SpMat& A, const Vec& mass, double dt);
  Vec solve(const Vec& rhs) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

struct MarkovReport {
  double min_entry = 0.0;  // smallest entry seen over all trials and steps
  double sup_ratio = 0.0;  // largest ||u+||_inf / ||u||_inf
  int steps = 0;
};

// Implicit-Euler marching (M + dt A) u+ = M u along the time grid, from
// `trials` random nonnegative initial vectors.
MarkovReport markov_check(const DiscreteOperator& op, int trials, std::span<const double> t_grid,
                          std::uint64_t seed = 1);
// Same marching from a single given initial vector.
MarkovReport markov_check_from(const DiscreteOperator& op, const Vec& u0,
                               std::span<const double> t_grid);

// gamma = 2d/(d - N + 2).
double ultracontractivity_gamma(double d, int N = 2);

struct UltracontractivityFit {
  std::vector<double> t;
  std::vector<double> norm_2_to_inf;
  double slope = 0.0;
  double log_constant = 0.0;
  double r_squared = 0.0;
  double gamma = 2.0;
  double target_slope = -0.5;  // -gamma/4
  double flat_scale = 0.0;         // 1/lambda_max: below it the finite-dimensional norm flattens
  double exponential_scale = 0.0;  // 1/lambda_1: beyond it decay is exponential
  bool flat_regime = false;
  bool exponential_regime = false;
};

// Discrete 2->inf norm: max_i sqrt(sum_k e^{-2 t lambda_k} v_k(i)^2), with the
// M-weighted l2 norm on the input.
double semigroup_norm_2_to_inf(const SpectralData& spec, double t);

UltracontractivityFit ultracontractivity_fit(const SpectralData& spec, std::span<const double> t_grid,
                                             double dim_d, int N = 2);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace transmission

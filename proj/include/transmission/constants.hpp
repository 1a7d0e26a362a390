#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "transmission/assembly.hpp"

namespace transmission {

struct ConstantsReport {
  double C_sigma_omega_L2 = 0.0;
  double C_sigma_omega_L1_lower = 0.0;
  double safety_factor = 2.0;
  double C_sigma_omega = 0.0;  // safety_factor * max(L2, L1 lower)
  double C_star = 0.0;         // C_sigma_omega * total_mass / |Omega|
  double total_mass = 0.0;
  double domain_area = 0.0;
  double d0 = 1.0;
  double eps = 0.0;
  double C_bar = 0.0;                                // at eps
  double lambda1 = 0.0;                              // of (A, M_full)
  std::vector<std::pair<double, double>> C_bar_table;  // (eps, C_bar)
  std::vector<std::pair<double, double>> zeta_table;   // (eps, zeta), negative = unbounded
  // (theta, lowest eigenvalue of A + theta M_bulk against M_bulk + M_iface),
  // theta ascending from 0. Lower bound for the blow-up rate constant.
  std::vector<std::pair<double, double>> bulk_shift_table;

  // Flat "key=value" lines, doubles printed round-trip exact.
  std::string serialize() const;
  static ConstantsReport parse(const std::string& text);
  friend bool operator==(const ConstantsReport&, const ConstantsReport&) = default;
};

enum class PoincareMode { L2_eig, L1_empirical };

struct PoincareOptions {
  int starts = 50;
  int iterations = 200;
  std::uint64_t seed = 1;
};

struct PoincareEstimate {
  double value = 0.0;
  int iterations = 0;      // L1: total ascent steps taken
  bool capped = false;     // L1: some start hit the iteration cap while still improving
};

// Mean-zero-on-Sigma Poincare constant on the full (unconstrained) mesh with
// the D = I stiffness: sup ||u - mean_Sigma u|| / ||grad u||.
PoincareEstimate poincare_mean_sigma(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                                     PoincareMode mode, const PoincareOptions& options = {});

// Lowest eigenvalue of ((1 - eps/d0) K + B + Theta, M_bulk + M_iface).
double best_embedding_constant(const DiscreteOperator& op, double eps, double d0);

// Lowest eigenvalue of (A, M_bulk + M_iface).
double embedding_lambda1(const DiscreteOperator& op);

struct ZetaResult {
  double zeta = 0.0;
  bool unbounded = false;
  int worst_sample = -1;  // sample needing the largest zeta
  int samples = 0;
};

inline constexpr double kZetaMax = 64.0;

// Smallest zeta with ||U||_{X2}^2 <= eps A(U,U) + eps^-zeta ||U||_{X1}^2 on
// random smooth fields and the lowest ten eigenvectors.
ZetaResult interpolation_zeta(const DiscreteOperator& op, double eps, int trials,
                              std::uint64_t seed = 1);

// Same search on an explicit sample set.
ZetaResult interpolation_zeta_on(const DiscreteOperator& op, double eps,
                                 const std::vector<Vec>& samples);
std::vector<Vec> zeta_samples(const DiscreteOperator& op, int trials, std::uint64_t seed = 1);
bool zeta_feasible(const DiscreteOperator& op, double eps, double zeta, const std::vector<Vec>& samples);

struct ConstantsOptions {
  double safety_factor = 2.0;
  double eps_fraction = 0.5;  // eps = fraction * d0
  std::vector<double> eps_table_fractions{0.125, 0.25, 0.5};
  std::vector<double> zeta_eps{0.05, 0.1, 0.2, 0.4, 0.8};
  int zeta_trials = 20;
  PoincareOptions poincare;
};

// Lowest eigenvalue of (A + theta M_bulk, M_bulk + M_iface).
double bulk_shifted_lambda1(const DiscreteOperator& op, double theta);

// `op` must be constrained already; `mesh` and `measure` feed the Poincare part.
ConstantsReport compute_constants(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                                  const DiscreteOperator& op, double d0,
                                  const ConstantsOptions& options = {});

}  // namespace transmission

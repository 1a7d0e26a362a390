#pragma once

#include <array>
#include <vector>

#include "transmission/geometry.hpp"
#include "transmission/linalg.hpp"

namespace transmission {

// Per-triangle symmetric 2x2 diffusion matrices with ellipticity floor d0.
struct DiffusionTensor {
  std::vector<std::array<double, 4>> entries;  // d11, d12, d21, d22
  double d0 = 1.0;

  static DiffusionTensor isotropic(std::size_t triangles, double value = 1.0);
  static DiffusionTensor uniform(std::size_t triangles, double d11, double d12, double d22,
                                 double d0);
  static double min_eigenvalue(const std::array<double, 4>& e);
  void validate(std::size_t triangles) const;
};

struct KernelSpec {
  enum class Rule { PowerLaw, Modulated };
  double s = 0.5;
  double d = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;
  Rule rule = Rule::PowerLaw;

  // PowerLaw: c1 |x-y|^-(d+2s). Modulated: (c0 + (c1-c0) e^{-|x-y|}) |x-y|^-(d+2s).
  double operator()(Point x, Point y) const;
  void validate() const;
};

struct BetaCoefficient {
  std::vector<double> values;  // one per interface node
  double beta0 = 0.0;

  static BetaCoefficient uniform(std::size_t nodes, double value, double floor);
};

// The nonlocal form sums over ordered pairs (x,y) in Sigma x Sigma, so every
// unordered pair enters twice. Flip to 1.0 for the half-sum convention.
inline constexpr double kOrderedPairFactor = 2.0;

struct BulkMatrices {
  Vec lumped_mass;  // nodal area shares
  SpMat stiffness;
};

struct InterfaceMatrices {
  Vec mass;  // w_i on interface vertices, 0 elsewhere
  SpMat beta_mass;
};

struct AssemblyOptions {
  int delta = 1;                  // 1: dynamic interface condition, 0: static
  bool allow_noncoercive = false;  // diagnostics only: beta == 0 with empty Gamma_D
};

// Matrices of the bilinear form over free DOFs. Masses are lumped (diagonal)
// and stored as vectors.
struct DiscreteOperator {
  Vec bulk_mass;
  Vec iface_mass;
  SpMat K_stiff;
  SpMat B_beta;
  SpMat Theta;
  SpMat A;  // K_stiff + B_beta + Theta
  int delta = 1;
  std::vector<int> dirichlet_dofs;  // mesh vertex ids on Gamma_D
  std::vector<int> free_dofs;       // mesh vertex id of each retained DOF
  std::vector<int> interface_dofs;  // retained DOF index of each interface node, -1 if removed
  int num_vertices = 0;
  bool constrained = false;

  Eigen::Index size() const { return bulk_mass.size(); }
  SpMat M_bulk() const { return diagonal_matrix(bulk_mass); }
  SpMat M_iface() const { return diagonal_matrix(iface_mass); }
  // Mass weighting of the time derivative: bulk + delta * interface.
  Vec mass() const { return bulk_mass + static_cast<double>(delta) * iface_mass; }
  // X^2(Omega, Sigma) mass: bulk + interface.
  Vec full_mass() const { return bulk_mass + iface_mass; }
  // Extends a free-DOF vector to all mesh vertices (zero on Gamma_D).
  Vec lift(const Vec& u) const;
  // Restricts a vertex vector to free DOFs.
  Vec restrict(const Vec& global) const;
};

BulkMatrices assemble_bulk(const MeshedDomain& mesh, const DiffusionTensor& D);
InterfaceMatrices assemble_interface_mass(int num_vertices, const InterfaceMeasure& measure,
                                          const BetaCoefficient& beta);
SpMat assemble_nonlocal(int num_vertices, const InterfaceMeasure& measure,
                        const KernelSpec& kernel);

// Unconstrained operator over all mesh vertices.
DiscreteOperator assemble_operator(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                                   const DiffusionTensor& D, const BetaCoefficient& beta,
                                   const KernelSpec& kernel, const AssemblyOptions& options = {});

// Symmetric elimination of the Gamma_D rows and columns.
DiscreteOperator apply_dirichlet(const DiscreteOperator& op, const MeshedDomain& mesh);

}  // namespace transmission

#pragma once

#include "transmission/assembly.hpp"
#include "transmission/geometry.hpp"

namespace fixture {

struct Problem {
  transmission::MeshedDomain mesh;
  transmission::InterfaceMeasure measure;
  transmission::DiscreteOperator full;  // unconstrained
  transmission::DiscreteOperator op;    // Gamma_D eliminated
};

inline Problem segment_problem(int n, double beta = 1.0,
                               transmission::DirichletSides sides = {}, int delta = 1,
                               bool allow_noncoercive = false) {
  using namespace transmission;
  Problem p;
  const auto spec = InterfaceSpec::segment(0.5);
  p.mesh = build_square_mesh(n, spec, sides);
  p.measure = build_interface_measure(p.mesh, spec);
  const auto D = DiffusionTensor::isotropic(p.mesh.triangles.size());
  const auto b = BetaCoefficient::uniform(p.measure.size(), beta, beta);
  KernelSpec k;
  k.d = p.measure.dim_d;
  p.full = assemble_operator(p.mesh, p.measure, D, b, k, {delta, allow_noncoercive});
  p.op = apply_dirichlet(p.full, p.mesh);
  return p;
}

}  // namespace fixture

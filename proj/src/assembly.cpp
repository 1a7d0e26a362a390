#include "transmission/assembly.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "transmission/errors.hpp"

namespace transmission {

DiffusionTensor DiffusionTensor::isotropic(std::size_t triangles, double value) {
  return uniform(triangles, value, 0.0, value, value);
}

DiffusionTensor DiffusionTensor::uniform(std::size_t triangles, double d11, double d12, double d22,
                                         double d0) {
  DiffusionTensor D;
  D.entries.assign(triangles, {d11, d12, d12, d22});
  D.d0 = d0;
  return D;
}

double DiffusionTensor::min_eigenvalue(const std::array<double, 4>& e) {
  const double tr = e[0] + e[3];
  const double det = e[0] * e[3] - e[1] * e[2];
  return 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
}

void DiffusionTensor::validate(std::size_t triangles) const {
  if (entries.size() != triangles)
    throw ValidationError(fmt::format("diffusion tensor has {} entries for {} triangles",
                                      entries.size(), triangles));
  if (!(d0 > 0.0)) throw ValidationError("ellipticity floor d0 must be > 0");
  for (std::size_t t = 0; t < entries.size(); ++t) {
    const auto& e = entries[t];
    if (e[1] != e[2]) throw ValidationError(fmt::format("diffusion tensor not symmetric on triangle {}", t));
    if (min_eigenvalue(e) < d0 * (1.0 - 1e-12))
      throw ValidationError(fmt::format("diffusion tensor on triangle {} has eigenvalue {} < d0={}",
                                        t, min_eigenvalue(e), d0));
  }
}

double KernelSpec::operator()(Point x, Point y) const {
  const double r = distance(x, y);
  const double base = std::pow(r, -(d + 2.0 * s));
  if (rule == Rule::PowerLaw) return c1 * base;
  return (c0 + (c1 - c0) * std::exp(-r)) * base;
}

void KernelSpec::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw ValidationError(fmt::format("kernel exponent s={} outside (0,1)", s));
  if (!(d > 0.0 && d < 2.0)) throw ValidationError(fmt::format("dimension d={} outside (0,2)", d));
  if (!(c0 > 0.0 && c0 <= c1))
    throw ValidationError(fmt::format("kernel constants need 0 < c0 <= c1 (c0={}, c1={})", c0, c1));
}

BetaCoefficient BetaCoefficient::uniform(std::size_t nodes, double value, double floor) {
  return {std::vector<double>(nodes, value), floor};
}

Vec DiscreteOperator::lift(const Vec& u) const {
  Vec g = Vec::Zero(num_vertices);
  for (Eigen::Index k = 0; k < u.size(); ++k) g[free_dofs[k]] = u[k];
  return g;
}

Vec DiscreteOperator::restrict(const Vec& global) const {
  Vec u(size());
  for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = global[free_dofs[k]];
  return u;
}

BulkMatrices assemble_bulk(const MeshedDomain& mesh, const DiffusionTensor& D) {
  D.validate(mesh.triangles.size());
  const int nv = mesh.num_vertices();
  BulkMatrices out;
  out.lumped_mass = Vec::Zero(nv);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const double area = 0.5 * std::abs(det);
    if (!(area > 0.0)) throw AssemblyError(fmt::format("triangle {} has zero area", t));
    // Gradients of the barycentric coordinates.
    const std::array<double, 3> gx{(p1.y - p2.y) / det, (p2.y - p0.y) / det, (p0.y - p1.y) / det};
    const std::array<double, 3> gy{(p2.x - p1.x) / det, (p0.x - p2.x) / det, (p1.x - p0.x) / det};
    const auto& e = D.entries[t];
    for (int a = 0; a < 3; ++a) {
      out.lumped_mass[tri[a]] += area / 3.0;
      for (int b = 0; b < 3; ++b) {
        const double dgx = e[0] * gx[b] + e[1] * gy[b];
        const double dgy = e[2] * gx[b] + e[3] * gy[b];
        trip.emplace_back(tri[a], tri[b], area * (gx[a] * dgx + gy[a] * dgy));
      }
    }
  }
  out.stiffness.resize(nv, nv);
  out.stiffness.setFromTriplets(trip.begin(), trip.end());
  // Symmetrize exactly: floating sums of a_ij and a_ji can differ in the last bit.
  const SpMat st = out.stiffness.transpose();
  out.stiffness = 0.5 * (out.stiffness + st);
  return out;
}

InterfaceMatrices assemble_interface_mass(int num_vertices, const InterfaceMeasure& measure,
                                          const BetaCoefficient& beta) {
  if (beta.values.size() != measure.size())
    throw ValidationError(fmt::format("beta has {} values for {} interface nodes",
                                      beta.values.size(), measure.size()));
  if (beta.beta0 < 0.0) throw ValidationError("beta floor must be >= 0");
  InterfaceMatrices out;
  out.mass = Vec::Zero(num_vertices);
  Vec bw = Vec::Zero(num_vertices);
  for (std::size_t i = 0; i < measure.size(); ++i) {
    if (!(measure.weights[i] > 0.0))
      throw ValidationError(fmt::format("interface weight {} at node {} is not positive",
                                        measure.weights[i], i));
    if (beta.values[i] < beta.beta0)
      throw ValidationError(fmt::format("beta={} below floor beta0={} at interface node {}",
                                        beta.values[i], beta.beta0, i));
    out.mass[measure.nodes[i]] += measure.weights[i];
    bw[measure.nodes[i]] += beta.values[i] * measure.weights[i];
  }
  out.beta_mass = diagonal_matrix(bw);
  return out;
}

SpMat assemble_nonlocal(int num_vertices, const InterfaceMeasure& measure, const KernelSpec& kernel) {
  kernel.validate();
  const std::size_t m = measure.size();
  if (m < 2) throw AssemblyError("nonlocal operator needs at least two interface nodes");
  std::vector<double> diag(m, 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const Point xi = measure.node_positions[i], xj = measure.node_positions[j];
      if (distance(xi, xj) == 0.0)
        throw AssemblyError(fmt::format("coincident interface nodes {} and {}", i, j));
      const double c = kOrderedPairFactor * kernel(xi, xj) * measure.weights[i] * measure.weights[j];
      trip.emplace_back(measure.nodes[i], measure.nodes[j], -c);
      trip.emplace_back(measure.nodes[j], measure.nodes[i], -c);
      diag[i] += c;
      diag[j] += c;
    }
  for (std::size_t i = 0; i < m; ++i) trip.emplace_back(measure.nodes[i], measure.nodes[i], diag[i]);
  SpMat theta(num_vertices, num_vertices);
  theta.setFromTriplets(trip.begin(), trip.end());
  return theta;
}

DiscreteOperator assemble_operator(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                                   const DiffusionTensor& D, const BetaCoefficient& beta,
                                   const KernelSpec& kernel, const AssemblyOptions& options) {
  if (options.delta != 0 && options.delta != 1)
    throw ValidationError(fmt::format("delta must be 0 or 1, got {}", options.delta));
  const bool beta_vanishes =
      std::all_of(beta.values.begin(), beta.values.end(), [](double b) { return b == 0.0; });
  if (!mesh.has_dirichlet() && beta_vanishes && !options.allow_noncoercive)
    throw ValidationError("beta vanishes identically and Gamma_D is empty: form is not coercive");

  DiscreteOperator op;
  const int nv = mesh.num_vertices();
  BulkMatrices bulk = assemble_bulk(mesh, D);
  InterfaceMatrices iface = assemble_interface_mass(nv, measure, beta);
  op.bulk_mass = std::move(bulk.lumped_mass);
  op.K_stiff = std::move(bulk.stiffness);
  op.iface_mass = std::move(iface.mass);
  op.B_beta = std::move(iface.beta_mass);
  op.Theta = assemble_nonlocal(nv, measure, kernel);
  op.A = op.K_stiff + op.B_beta + op.Theta;
  op.delta = options.delta;
  op.num_vertices = nv;
  op.dirichlet_dofs = mesh.dirichlet_vertices();
  op.free_dofs.resize(nv);
  for (int v = 0; v < nv; ++v) op.free_dofs[v] = v;
  for (int v : measure.nodes) op.interface_dofs.push_back(v);
  return op;
}

namespace {

SpMat select(const SpMat& a, const std::vector<int>& keep_index) {
  // keep_index[v] = new index or -1
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nonZeros());
  Eigen::Index n = 0;
  for (int k : keep_index) n += (k >= 0);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const int r = keep_index[it.row()], c = keep_index[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  SpMat out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

DiscreteOperator apply_dirichlet(const DiscreteOperator& op, const MeshedDomain& mesh) {
  if (op.constrained) return op;
  const auto dir = mesh.dirichlet_vertices();
  // Only the polyline endpoints may sit on the boundary.
  for (std::size_t p = 1; p + 1 < mesh.interface_nodes.size(); ++p)
    if (std::binary_search(dir.begin(), dir.end(), mesh.interface_nodes[p]))
      throw GeometryError("interface node on Gamma_D");

  const int nv = op.num_vertices;
  std::vector<int> keep(nv, 0);
  for (int v : dir) keep[v] = -1;
  int next = 0;
  DiscreteOperator out;
  for (int v = 0; v < nv; ++v)
    if (keep[v] == 0) {
      keep[v] = next++;
      out.free_dofs.push_back(v);
    }
  out.bulk_mass.resize(next);
  out.iface_mass.resize(next);
  for (int k = 0; k < next; ++k) {
    out.bulk_mass[k] = op.bulk_mass[out.free_dofs[k]];
    out.iface_mass[k] = op.iface_mass[out.free_dofs[k]];
  }
  out.K_stiff = select(op.K_stiff, keep);
  out.B_beta = select(op.B_beta, keep);
  out.Theta = select(op.Theta, keep);
  out.A = out.K_stiff + out.B_beta + out.Theta;
  out.delta = op.delta;
  out.dirichlet_dofs = dir;
  out.num_vertices = nv;
  out.constrained = true;
  for (int v : op.interface_dofs) out.interface_dofs.push_back(keep[v]);
  return out;
}

}  // namespace transmission

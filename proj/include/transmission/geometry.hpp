#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace transmission {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

enum class Side : unsigned { Left = 1u, Right = 2u, Bottom = 4u, Top = 8u };

// Bit set of square sides carrying the Dirichlet condition.
struct DirichletSides {
  unsigned bits = static_cast<unsigned>(Side::Left);
  static DirichletSides none() { return {0u}; }
  static DirichletSides all() { return {15u}; }
  bool contains(Side s) const { return (bits & static_cast<unsigned>(s)) != 0u; }
  bool empty() const { return bits == 0u; }
  friend bool operator==(const DirichletSides&, const DirichletSides&) = default;
};

struct InterfaceSpec {
  enum class Kind { Segment, KochPrefractal };
  Kind kind = Kind::Segment;
  double y0 = 0.5;
  int level = 0;            // Koch only
  double total_mass = 1.0;  // Koch only; a segment carries its arc length

  static InterfaceSpec segment(double y0) { return {Kind::Segment, y0, 0, 1.0}; }
  static InterfaceSpec koch(int level, double y0, double total_mass = 1.0) {
    return {Kind::KochPrefractal, y0, level, total_mass};
  }
  friend bool operator==(const InterfaceSpec&, const InterfaceSpec&) = default;
};

enum class BoundaryTag { DirichletGammaD, NeumannGammaN };

struct BoundaryEdge {
  int v0 = 0;
  int v1 = 0;
  BoundaryTag tag = BoundaryTag::NeumannGammaN;
  Side side = Side::Bottom;
};

// Structured triangulation of the unit square with the interface polyline
// resolved by mesh edges. Immutable once built.
struct MeshedDomain {
  int n = 0;  // cells per side
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> interface_nodes;  // ordered along the polyline
  // Positions in interface_nodes where elementary pieces of the interface start;
  // the last entry is interface_nodes.size() - 1.
  std::vector<std::size_t> interface_breaks;
  double domain_area = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  std::vector<int> dirichlet_vertices() const;
  bool has_dirichlet() const;
  bool on_boundary(int v) const;
};

// Vertically compressed Koch prefractal (factor 1/sqrt(3)) so that every
// vertex and edge lies on the square lattice. The map is bi-Lipschitz, so the
// dimension ln4/ln3 and the self-similar equal-mass structure are kept.
MeshedDomain build_square_mesh(int n, const InterfaceSpec& interface,
                               DirichletSides dirichlet = {});

// Every triangle edge shared by <= 2 triangles, boundary edges by exactly one.
bool is_conforming(const MeshedDomain& mesh);

// Connected components of the triangle adjacency graph once interface edges are cut.
int components_without_interface(const MeshedDomain& mesh);

struct InterfaceMeasure {
  std::vector<int> nodes;  // mesh vertex ids
  std::vector<Point> node_positions;
  std::vector<double> weights;
  // Mass per unit length on each sub-edge (nodes[i], nodes[i+1]).
  std::vector<double> edge_density;
  double dim_d = 1.0;
  double total_mass = 0.0;

  std::size_t size() const { return nodes.size(); }
};

InterfaceMeasure build_interface_measure(const MeshedDomain& mesh, const InterfaceSpec& interface);

struct AhlforsReport {
  double max_ratio = 0.0;
  std::vector<double> per_radius;  // max ratio for each radius
};

// max over sampled centers x on the interface and the given radii of
// mu(B(x,r))/r^d, with mu evaluated exactly on the piecewise-uniform density.
AhlforsReport ahlfors_upper_check(const InterfaceMeasure& measure, int n_samples,
                                  std::span<const double> radii, std::uint64_t seed = 1);

}  // namespace transmission

#include "transmission/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "transmission/errors.hpp"

namespace transmission {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

using Lattice = std::pair<int, int>;

bool is_integer(double v, double tol = 1e-9) { return std::abs(v - std::round(v)) <= tol; }

int ipow(int base, int p) {
  int r = 1;
  for (int i = 0; i < p; ++i) r *= base;
  return r;
}

// Koch turtle directions in multiples of 60 degrees.
std::vector<int> koch_directions(int level) {
  std::vector<int> dirs{0};
  for (int l = 0; l < level; ++l) {
    std::vector<int> next;
    next.reserve(dirs.size() * 4);
    for (int d : dirs) {
      next.push_back(d);
      next.push_back((d + 1) % 6);
      next.push_back((d + 5) % 6);
      next.push_back(d);
    }
    dirs = std::move(next);
  }
  return dirs;
}

// Lattice displacement of one elementary piece, k = cells per half piece.
Lattice koch_step(int dir, int k) {
  switch (dir) {
    case 0: return {2 * k, 0};
    case 1: return {k, k};
    case 2: return {-k, k};
    case 3: return {-2 * k, 0};
    case 4: return {-k, -k};
    default: return {k, -k};
  }
}

struct Polyline {
  std::vector<Lattice> points;
  std::vector<std::size_t> breaks;
};

Polyline lattice_polyline(int n, const InterfaceSpec& spec) {
  if (!(spec.y0 > 0.0 && spec.y0 < 1.0))
    throw GeometryError(fmt::format("interface baseline y0={} touches the boundary", spec.y0));
  const double j0_real = spec.y0 * n;
  if (!is_integer(j0_real))
    throw ResolutionError(fmt::format("interface baseline y0={} is not a mesh line for n={}",
                                      spec.y0, n));
  const int j0 = static_cast<int>(std::lround(j0_real));
  Polyline line;
  if (spec.kind == InterfaceSpec::Kind::Segment) {
    for (int i = 0; i <= n; ++i) line.points.emplace_back(i, j0);
    line.breaks = {0, static_cast<std::size_t>(n)};
    return line;
  }
  if (spec.level < 0) throw GeometryError("Koch level must be nonnegative");
  const int pieces_span = 2 * ipow(3, spec.level);  // half-piece units across the square
  if (pieces_span > n)
    throw ResolutionError(fmt::format(
        "Koch level {} too fine for n={}: polyline edges shorter than mesh edges", spec.level, n));
  if (n % pieces_span != 0)
    throw ResolutionError(fmt::format("Koch level {} needs n divisible by {} (got n={})",
                                      spec.level, pieces_span, n));
  const int k = n / pieces_span;
  Lattice cur{0, j0};
  line.points.push_back(cur);
  line.breaks.push_back(0);
  for (int d : koch_directions(spec.level)) {
    const auto [dx, dy] = koch_step(d, k);
    const int steps = std::max(std::abs(dx), std::abs(dy));
    const int sx = (dx > 0) - (dx < 0);
    const int sy = (dy > 0) - (dy < 0);
    for (int s = 0; s < steps; ++s) {
      cur = {cur.first + sx, cur.second + sy};
      line.points.push_back(cur);
    }
    line.breaks.push_back(line.points.size() - 1);
  }
  return line;
}

}  // namespace

std::vector<int> MeshedDomain::dirichlet_vertices() const {
  std::set<int> v;
  for (const auto& e : boundary_edges)
    if (e.tag == BoundaryTag::DirichletGammaD) {
      v.insert(e.v0);
      v.insert(e.v1);
    }
  return {v.begin(), v.end()};
}

bool MeshedDomain::has_dirichlet() const {
  return std::any_of(boundary_edges.begin(), boundary_edges.end(),
                     [](const BoundaryEdge& e) { return e.tag == BoundaryTag::DirichletGammaD; });
}

bool MeshedDomain::on_boundary(int v) const {
  const int i = v % (n + 1);
  const int j = v / (n + 1);
  return i == 0 || j == 0 || i == n || j == n;
}

MeshedDomain build_square_mesh(int n, const InterfaceSpec& interface, DirichletSides dirichlet) {
  if (n < 2) throw GeometryError(fmt::format("need at least 2 cells per side, got n={}", n));
  const Polyline line = lattice_polyline(n, interface);

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  // Cell diagonal orientation: true = "/" joins (i,j)-(i+1,j+1).
  std::vector<char> forced(static_cast<std::size_t>(n) * n, 0);  // 0 free, 1 "/", 2 "\"
  for (std::size_t p = 0; p + 1 < line.points.size(); ++p) {
    const auto [a, b] = line.points[p];
    const auto [c, d] = line.points[p + 1];
    if (c < 0 || c > n || d < 0 || d > n)
      throw GeometryError("interface polyline leaves the domain");
    if (a != c && b != d) {
      const int ci = std::min(a, c);
      const int cj = std::min(b, d);
      const char want = ((c - a) == (d - b)) ? 1 : 2;
      char& slot = forced[static_cast<std::size_t>(cj) * n + ci];
      if (slot != 0 && slot != want) throw GeometryError("interface crosses itself inside a cell");
      slot = want;
    }
  }
  // Interior interface vertices must stay away from the boundary; only the two
  // endpoints sit on the left and right sides.
  {
    std::set<Lattice> seen;
    for (std::size_t p = 0; p < line.points.size(); ++p) {
      const auto [i, j] = line.points[p];
      if (!seen.insert(line.points[p]).second)
        throw GeometryError("interface polyline is not simple");
      const bool interior = (p != 0 && p + 1 != line.points.size());
      if (j <= 0 || j >= n || (interior && (i <= 0 || i >= n)))
        throw GeometryError(fmt::format("interface touches the boundary at ({}, {})",
                                        static_cast<double>(i) / n, static_cast<double>(j) / n));
    }
  }

  MeshedDomain mesh;
  mesh.n = n;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (forced[static_cast<std::size_t>(j) * n + i] == 2) {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      } else {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      }
    }

  const auto tag_for = [&](Side s) {
    return dirichlet.contains(s) ? BoundaryTag::DirichletGammaD : BoundaryTag::NeumannGammaN;
  };
  for (int i = 0; i < n; ++i) {
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), tag_for(Side::Bottom), Side::Bottom});
    mesh.boundary_edges.push_back({vid(i, n), vid(i + 1, n), tag_for(Side::Top), Side::Top});
  }
  for (int j = 0; j < n; ++j) {
    mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), tag_for(Side::Left), Side::Left});
    mesh.boundary_edges.push_back({vid(n, j), vid(n, j + 1), tag_for(Side::Right), Side::Right});
  }

  for (const auto& [i, j] : line.points) mesh.interface_nodes.push_back(vid(i, j));
  mesh.interface_breaks = line.breaks;
  mesh.domain_area = 1.0;

  if (!is_conforming(mesh)) throw GeometryError("mesh is not conforming");
  if (const int comps = components_without_interface(mesh); comps != 2)
    throw GeometryError(fmt::format("interface splits the domain into {} parts, expected 2", comps));
  return mesh;
}

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::map<std::pair<int, int>, std::vector<int>> edge_to_triangles(const MeshedDomain& mesh) {
  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) edges[edge_key(tri[k], tri[(k + 1) % 3])].push_back(t);
  }
  return edges;
}

}  // namespace

bool is_conforming(const MeshedDomain& mesh) {
  const auto edges = edge_to_triangles(mesh);
  for (const auto& [key, tris] : edges)
    if (tris.size() > 2) return false;
  for (const auto& e : mesh.boundary_edges) {
    const auto it = edges.find(edge_key(e.v0, e.v1));
    if (it == edges.end() || it->second.size() != 1) return false;
  }
  return true;
}

int components_without_interface(const MeshedDomain& mesh) {
  const auto edges = edge_to_triangles(mesh);
  std::set<std::pair<int, int>> cut;
  for (std::size_t p = 0; p + 1 < mesh.interface_nodes.size(); ++p)
    cut.insert(edge_key(mesh.interface_nodes[p], mesh.interface_nodes[p + 1]));

  const int nt = static_cast<int>(mesh.triangles.size());
  std::vector<std::vector<int>> adj(nt);
  for (const auto& [key, tris] : edges)
    if (tris.size() == 2 && !cut.contains(key)) {
      adj[tris[0]].push_back(tris[1]);
      adj[tris[1]].push_back(tris[0]);
    }
  std::vector<int> label(nt, -1);
  int comps = 0;
  for (int s = 0; s < nt; ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[s] = comps;
    while (!q.empty()) {
      const int t = q.front();
      q.pop();
      for (int u : adj[t])
        if (label[u] < 0) {
          label[u] = comps;
          q.push(u);
        }
    }
    ++comps;
  }
  return comps;
}

InterfaceMeasure build_interface_measure(const MeshedDomain& mesh, const InterfaceSpec& interface) {
  const auto& nodes = mesh.interface_nodes;
  if (nodes.size() < 2) throw GeometryError("interface needs at least two nodes");
  InterfaceMeasure m;
  m.nodes = nodes;
  for (int v : nodes) m.node_positions.push_back(mesh.vertices[v]);

  const std::size_t ne = nodes.size() - 1;
  std::vector<double> length(ne), mass(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    length[e] = distance(m.node_positions[e], m.node_positions[e + 1]);
    if (!(length[e] > 0.0)) throw GeometryError("degenerate interface measure: zero-length edge");
  }

  if (interface.kind == InterfaceSpec::Kind::Segment) {
    m.dim_d = 1.0;
    mass = length;
  } else {
    if (!(interface.total_mass > 0.0)) throw ValidationError("interface total_mass must be > 0");
    m.dim_d = std::log(4.0) / std::log(3.0);
    const auto& br = mesh.interface_breaks;
    const double piece_mass = interface.total_mass / static_cast<double>(br.size() - 1);
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      const double sub = static_cast<double>(br[p + 1] - br[p]);
      for (std::size_t e = br[p]; e < br[p + 1]; ++e) mass[e] = piece_mass / sub;
    }
  }

  m.weights.assign(nodes.size(), 0.0);
  m.edge_density.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    m.weights[e] += 0.5 * mass[e];
    m.weights[e + 1] += 0.5 * mass[e];
    m.edge_density[e] = mass[e] / length[e];
  }
  m.total_mass = 0.0;
  for (double w : m.weights) m.total_mass += w;
  return m;
}

namespace {

// Length of the part of segment [a,b] inside the closed disk B(c,r).
double chord_length(Point a, Point b, Point c, double r) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double fx = a.x - c.x, fy = a.y - c.y;
  const double qa = dx * dx + dy * dy;
  const double qb = 2.0 * (fx * dx + fy * dy);
  const double qc = fx * fx + fy * fy - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double t0 = std::clamp((-qb - sq) / (2.0 * qa), 0.0, 1.0);
  const double t1 = std::clamp((-qb + sq) / (2.0 * qa), 0.0, 1.0);
  return (t1 - t0) * std::sqrt(qa);
}

}  // namespace

AhlforsReport ahlfors_upper_check(const InterfaceMeasure& measure, int n_samples,
                                  std::span<const double> radii, std::uint64_t seed) {
  AhlforsReport report;
  report.per_radius.assign(radii.size(), 0.0);
  if (radii.empty() || n_samples < 1 || measure.size() < 2) return report;

  const std::size_t ne = measure.size() - 1;
  std::vector<double> edge_mass(ne);
  for (std::size_t e = 0; e < ne; ++e)
    edge_mass[e] =
        measure.edge_density[e] * distance(measure.node_positions[e], measure.node_positions[e + 1]);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(edge_mass.begin(), edge_mass.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int s = 0; s < n_samples; ++s) {
    const std::size_t e = pick(rng);
    const double t = unit(rng);
    const Point a = measure.node_positions[e], b = measure.node_positions[e + 1];
    const Point c{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double r = radii[k];
      double mu = 0.0;
      for (std::size_t f = 0; f < ne; ++f)
        mu += measure.edge_density[f] *
              chord_length(measure.node_positions[f], measure.node_positions[f + 1], c, r);
      const double ratio = mu / std::pow(r, measure.dim_d);
      report.per_radius[k] = std::max(report.per_radius[k], ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
    }
  }
  return report;
}

}  // namespace transmission

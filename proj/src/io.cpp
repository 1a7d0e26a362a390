#include "transmission/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "transmission/diagnostics.hpp"
#include "transmission/errors.hpp"

namespace transmission::io {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_mesh(const fs::path& dir, const MeshedDomain& mesh) {
  std::string v = "id,x,y\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    v += fmt::format("{},{:.17g},{:.17g}\n", i, mesh.vertices[i].x, mesh.vertices[i].y);
  std::string t = "id,v0,v1,v2\n";
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& tri = mesh.triangles[i];
    t += fmt::format("{},{},{},{}\n", i, tri[0], tri[1], tri[2]);
  }
  std::string e = "v0,v1,tag\n";
  for (const auto& be : mesh.boundary_edges)
    e += fmt::format("{},{},{}\n", be.v0, be.v1, be.tag == BoundaryTag::DirichletGammaD ? "GammaD" : "GammaN");
  write_text(dir / "vertices.csv", v);
  write_text(dir / "triangles.csv", t);
  write_text(dir / "edges.csv", e);
}

void write_measure(const fs::path& path, const InterfaceMeasure& measure) {
  std::string s = "node_id,x,y,w\n";
  for (std::size_t i = 0; i < measure.size(); ++i)
    s += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", measure.nodes[i], measure.node_positions[i].x,
                     measure.node_positions[i].y, measure.weights[i]);
  write_text(path, s);
}

void write_spectrum(const fs::path& path, const SpectralData& spec) {
  std::string s = "k,lambda_k\n";
  for (int k = 0; k < spec.count(); ++k) s += fmt::format("{},{:.17g}\n", k + 1, spec.eigenvalues[k]);
  write_text(path, s);
}

void write_ultracontractivity(const fs::path& path, const UltracontractivityFit& fit) {
  std::string s = "t,norm_2_to_inf\n";
  for (std::size_t i = 0; i < fit.t.size(); ++i) s += fmt::format("{:.17g},{:.17g}\n", fit.t[i], fit.norm_2_to_inf[i]);
  write_text(path, s);
}

std::string trajectory_csv(const Trajectory& tr, const DiscreteOperator& op, const Nonlinearity& f,
                           const Nonlinearity& h) {
  const auto rep = energy_report(tr, op, f, h);
  std::string s = "t,dt,sup_norm,l2_norm,E,G,dissipation_integral\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const Vec& u = tr.states[k];
    const double l2 = std::sqrt(u.dot(op.bulk_mass.cwiseProduct(u)));
    s += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", tr.t[k], tr.dt[k], tr.sup_norm[k],
                     l2, rep.E[k], rep.G[k], rep.D[k]);
  }
  return s;
}

std::string outcome_line(const Trajectory& tr) {
  return fmt::format("OUTCOME, {}, {:.17g}", to_string(tr.outcome), tr.outcome_time);
}

void write_snapshot(const fs::path& path, const MeshedDomain& mesh, const DiscreteOperator& op, const Vec& U) {
  const Vec g = op.lift(U);
  std::string s = "vertex,x,y,u\n";
  for (int i = 0; i < mesh.num_vertices(); ++i)
    s += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", i, mesh.vertices[i].x, mesh.vertices[i].y, g[i]);
  write_text(path, s);
}

Vec read_nodal(const fs::path& path, int num_vertices) {
  if (!fs::is_regular_file(path)) throw ConfigError({fmt::format("nodal file '{}' does not exist", path.string())});
  std::istringstream in(read_text(path));
  std::vector<double> v;
  double x = 0.0;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw ConfigError({fmt::format("nodal file '{}': non-numeric entry after {} values", path.string(), v.size())});
  if (static_cast<int>(v.size()) != num_vertices)
    throw ConfigError({fmt::format("nodal file '{}' has {} values, mesh has {} vertices", path.string(), v.size(),
                                   num_vertices)});
  return Eigen::Map<const Vec>(v.data(), num_vertices);
}

}  // namespace transmission::io

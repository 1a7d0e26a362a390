#pragma once

#include <filesystem>
#include <string>

#include "transmission/assembly.hpp"
#include "transmission/dynamics.hpp"
#include "transmission/geometry.hpp"
#include "transmission/nonlinearity.hpp"
#include "transmission/operators.hpp"

namespace transmission::io {

namespace fs = std::filesystem;

// Writes through a temporary file and a rename so readers never see a
// partial file. Throws Error on I/O failure.
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

// vertices.csv, triangles.csv, edges.csv inside `dir`.
void write_mesh(const fs::path& dir, const MeshedDomain& mesh);
void write_measure(const fs::path& path, const InterfaceMeasure& measure);
void write_spectrum(const fs::path& path, const SpectralData& spec);
void write_ultracontractivity(const fs::path& path, const UltracontractivityFit& fit);

// t, dt, sup_norm, l2_norm, E, G, dissipation_integral
std::string trajectory_csv(const Trajectory& tr, const DiscreteOperator& op, const Nonlinearity& f,
                           const Nonlinearity& h);
std::string outcome_line(const Trajectory& tr);

// vertex, x, y, u with Dirichlet nodes filled by zero.
void write_snapshot(const fs::path& path, const MeshedDomain& mesh, const DiscreteOperator& op, const Vec& U);

// One value per mesh vertex, whitespace or newline separated.
Vec read_nodal(const fs::path& path, int num_vertices);

}  // namespace transmission::io

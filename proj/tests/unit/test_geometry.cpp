#include <doctest.h>

#include <cmath>
#include <numeric>

#include "transmission/errors.hpp"
#include "transmission/geometry.hpp"

using namespace transmission;

TEST_CASE("smallest structured mesh") {
  const auto mesh = build_square_mesh(2, InterfaceSpec::segment(0.5));
  CHECK(mesh.num_vertices() == 9);
  CHECK(mesh.triangles.size() == 8);
  REQUIRE(mesh.interface_nodes.size() == 3);
  for (int v : mesh.interface_nodes) CHECK(mesh.vertices[v].y == 0.5);
  CHECK(is_conforming(mesh));
  CHECK(components_without_interface(mesh) == 2);
}

TEST_CASE("segment on n=16") {
  const auto mesh = build_square_mesh(16, InterfaceSpec::segment(0.5));
  CHECK(mesh.interface_nodes.size() == 17);
  CHECK(mesh.domain_area == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mesh.dirichlet_vertices().size() == 17);
  CHECK(components_without_interface(mesh) == 2);
}

TEST_CASE("Koch prefractal meshes") {
  SUBCASE("level 2 has 16 elementary pieces") {
    const auto mesh = build_square_mesh(18, InterfaceSpec::koch(2, 0.5));
    CHECK(mesh.interface_breaks.size() == 17);
    CHECK(is_conforming(mesh));
    CHECK(components_without_interface(mesh) == 2);
  }
  SUBCASE("n not divisible by 2*3^L is rejected") {
    CHECK_THROWS_AS(build_square_mesh(81, InterfaceSpec::koch(2, 0.5)), ResolutionError);
  }
  SUBCASE("level too fine") {
    CHECK_THROWS_AS(build_square_mesh(6, InterfaceSpec::koch(2, 0.5)), ResolutionError);
  }
}

TEST_CASE("interface touching the boundary") {
  CHECK_THROWS_AS(build_square_mesh(8, InterfaceSpec::segment(0.0)), GeometryError);
  CHECK_THROWS_AS(build_square_mesh(8, InterfaceSpec::segment(1.0)), GeometryError);
}

TEST_CASE("segment measure") {
  const auto mesh = build_square_mesh(2, InterfaceSpec::segment(0.5));
  const auto mu = build_interface_measure(mesh, InterfaceSpec::segment(0.5));
  REQUIRE(mu.size() == 3);
  CHECK(mu.weights[0] == 0.25);
  CHECK(mu.weights[1] == 0.5);
  CHECK(mu.weights[2] == 0.25);
  CHECK(mu.total_mass == 1.0);
  CHECK(mu.dim_d == 1.0);
}

TEST_CASE("Koch measure carries equal mass per piece") {
  const auto spec = InterfaceSpec::koch(1, 0.5, 1.0);
  const auto mesh = build_square_mesh(12, spec);
  const auto mu = build_interface_measure(mesh, spec);
  CHECK(mu.dim_d == doctest::Approx(std::log(4.0) / std::log(3.0)));
  const double sum = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(mesh.interface_breaks.size() == 5);
  for (std::size_t p = 0; p + 1 < mesh.interface_breaks.size(); ++p) {
    double piece = 0.0;
    for (std::size_t e = mesh.interface_breaks[p]; e < mesh.interface_breaks[p + 1]; ++e)
      piece += mu.edge_density[e] * distance(mu.node_positions[e], mu.node_positions[e + 1]);
    CHECK(piece == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("Ahlfors ratios") {
  SUBCASE("segment, r = 0.1") {
    const auto mesh = build_square_mesh(32, InterfaceSpec::segment(0.5));
    const auto mu = build_interface_measure(mesh, InterfaceSpec::segment(0.5));
    const double radii[] = {0.1};
    const auto rep = ahlfors_upper_check(mu, 200, radii, 3);
    CHECK(rep.max_ratio <= 2.0 + 1e-12);
    CHECK(rep.max_ratio >= 1.9);
    const double small[] = {1.0 / 32, 0.5 / 32};
    CHECK(ahlfors_upper_check(mu, 200, small, 3).max_ratio <= 2.05);
  }
  SUBCASE("Koch level 3 stays bounded across scales") {
    const auto spec = InterfaceSpec::koch(3, 0.5);
    const auto mesh = build_square_mesh(54, spec);
    const auto mu = build_interface_measure(mesh, spec);
    const double radii[] = {1.0 / 3, 1.0 / 9, 1.0 / 27};
    const auto rep = ahlfors_upper_check(mu, 300, radii, 5);
    REQUIRE(rep.per_radius.size() == 3);
    const auto [lo, hi] = std::minmax_element(rep.per_radius.begin(), rep.per_radius.end());
    CHECK(*hi / *lo < 3.0);
    CHECK(std::isfinite(rep.max_ratio));
  }
  SUBCASE("no radii") {
    const auto mesh = build_square_mesh(4, InterfaceSpec::segment(0.5));
    const auto mu = build_interface_measure(mesh, InterfaceSpec::segment(0.5));
    CHECK(ahlfors_upper_check(mu, 10, {}, 1).max_ratio == 0.0);
  }
}

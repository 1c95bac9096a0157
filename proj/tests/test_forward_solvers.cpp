#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steklov/fem.hpp>
#include <steklov/topology.hpp>

#include <cstdio>
#include <filesystem>

#include "oracles.hpp"

using namespace steklov;
using oracle::cd;

namespace {

SurfaceMesh flipped(SurfaceMesh mesh) {
  for (int f = 0; f < mesh.face_count(); ++f)
    std::swap(mesh.faces(f, 1), mesh.faces(f, 2));
  return mesh;
}

/// Lowest discrete Steklov eigenvalues, via the symmetric pencil behind
/// the vertex DN map.
Eigen::VectorXd steklov_spectrum(const DiscreteDN& dn, int count) {
  Eigen::MatrixXd a = dn.mass.asDiagonal() * dn.matrix;
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::MatrixXd b = dn.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, b);
  return eig.eigenvalues().head(count);
}

}  // namespace

TEST_CASE("disk mesh is a valid topological disk") {
  auto mesh = mesh_disk(0.1);
  CHECK(euler_characteristic(mesh) == 1);
  auto loops = boundary_loops(mesh);
  REQUIRE(loops.size() == 1);
  // Boundary vertex spacing tracks the requested edge length.
  const int nb = static_cast<int>(loops[0].size());
  CHECK(nb >= 55);
  CHECK(nb <= 70);
  // The loop runs counterclockwise: positive enclosed area.
  double area2 = 0;
  for (int k = 0; k < nb; ++k) {
    const auto& p = mesh.vertices.row(loops[0][k]);
    const auto& q = mesh.vertices.row(loops[0][(k + 1) % nb]);
    area2 += p.x() * q.y() - q.x() * p.y();
  }
  CHECK(area2 > 0);
  CHECK(area2 / 2 == doctest::Approx(oracle::pi).epsilon(0.02));
}

TEST_CASE("mesh generators reject out-of-range parameters") {
  CHECK_THROWS_AS((void)mesh_disk(0.9), DegenerateMesh);
  CHECK_THROWS_AS((void)mesh_disk(-0.1), DegenerateMesh);
  CHECK_THROWS_AS((void)mesh_torus_minus_cap(1.0, 2.0, 0.1), DegenerateMesh);
  CHECK_THROWS_AS((void)mesh_torus_minus_cap(2.0, 1.0, 0.9), DegenerateMesh);
}

TEST_CASE("torus with a cap removed has handle topology and one rim") {
  auto mesh = mesh_torus_minus_cap(2.0, 1.0, 0.2);
  CHECK(euler_characteristic(mesh) == -1);
  auto loops = boundary_loops(mesh);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() >= 30);
  // Rim vertices lie on the cap circle in the parameter chart, so the rim
  // curve itself does not move when the mesh is refined.
  const double rho = 1.2;
  for (int v : loops[0]) {
    const Eigen::Vector3d p = mesh.vertices.row(v);
    const double u = std::atan2(p.y(), p.x());
    const double w = std::atan2(p.z(), std::hypot(p.x(), p.y()) - 2.0);
    CHECK(std::hypot(3.0 * u, 1.0 * w) == doctest::Approx(rho).epsilon(1e-9));
  }
}

TEST_CASE("disk Steklov spectrum approaches 0,1,1,2,2") {
  auto dn = dn_from_mesh(mesh_disk(0.05));
  auto ev = steklov_spectrum(dn, 5);
  CHECK(std::abs(ev[0]) < 1e-8);
  CHECK(ev[1] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(ev[2] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(ev[3] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(ev[4] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("projected disk DN converges to the closed form") {
  GridSpec grid{8, 2 * oracle::pi};
  auto exact = dn_disk(grid);
  double err_coarse = 0, err_fine = 0;
  for (double h : {0.1, 0.05}) {
    auto op = to_fourier(dn_from_mesh(mesh_disk(h)), grid);
    CHECK(op.real_flag);
    CHECK(op.orientation == +1);
    const double err = operator_norm(op - exact);
    (h == 0.1 ? err_coarse : err_fine) = err;
  }
  CHECK(err_fine < 0.15);
  CHECK(err_fine < err_coarse);
}

TEST_CASE("reflected disk mesh projects to the same operator") {
  // Reversing all faces reads the boundary the other way round, which
  // yields the operator of the mirror surface. The mirror of a disk is a
  // disk, so both walks land on the closed form.
  GridSpec grid{8, 2 * oracle::pi};
  auto mesh = mesh_disk(0.1);
  auto fwd = to_fourier(dn_from_mesh(mesh), grid);
  auto rev = to_fourier(dn_from_mesh(flipped(mesh)), grid);
  CHECK(fwd.orientation == +1);
  CHECK(rev.orientation == +1);
  CHECK(operator_norm(rev - dn_disk(grid)) < 0.15);
  CHECK(operator_norm(fwd - rev) < 0.02);
}

TEST_CASE("projection demands enough boundary resolution") {
  auto dn = dn_from_mesh(mesh_disk(0.3));
  CHECK_THROWS_AS((void)to_fourier(dn, GridSpec{8, 2 * oracle::pi}),
                  Underresolved);
}

TEST_CASE("conformal factor is checked but does not alter the map") {
  auto mesh = mesh_disk(0.15);
  auto plain = dn_from_mesh(mesh);

  // Interior-only scaling: the Dirichlet energy is conformally invariant.
  mesh.conformal_factor = Eigen::VectorXd::Constant(mesh.vertex_count(), 3.0);
  auto loops = boundary_loops(mesh);
  for (int v : loops[0]) mesh.conformal_factor(v) = 1.0;
  auto scaled = dn_from_mesh(mesh);
  CHECK((scaled.matrix - plain.matrix).cwiseAbs().maxCoeff() == 0.0);

  mesh.conformal_factor(loops[0][0]) = 2.0;
  CHECK_THROWS_AS((void)dn_from_mesh(mesh), DegenerateMesh);
  mesh.conformal_factor(loops[0][0]) = -1.0;
  CHECK_THROWS_AS((void)dn_from_mesh(mesh), DegenerateMesh);
}

TEST_CASE("capped torus operator reveals one handle") {
  GridSpec grid{8, 2 * oracle::pi};
  auto op = to_fourier(dn_from_mesh(mesh_torus_minus_cap(2.0, 1.0, 0.1)), grid);
  auto topo = topology_of(op);
  CHECK(topo.handle_rank == 2);
  CHECK(topo.euler_characteristic == -1);
  CHECK(topo.genus == 1);
  CHECK(topo.gap >= 10.0);
}

TEST_CASE("disk operators report genus zero") {
  GridSpec grid{8, 2 * oracle::pi};
  auto exact = topology_of(dn_disk(grid));
  CHECK(exact.handle_rank == 0);
  CHECK(exact.euler_characteristic == 1);
  auto fem = topology_of(to_fourier(dn_from_mesh(mesh_disk(0.1)), grid));
  CHECK(fem.handle_rank == 0);
  CHECK(fem.gap >= 10.0);
}

TEST_CASE("OFF files round-trip exactly") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "steklov_offtest.off";
  auto mesh = mesh_torus_minus_cap(2.0, 1.0, 0.25);
  write_off(path.string(), mesh);
  auto back = read_off(path.string());
  fs::remove(path);
  REQUIRE(back.vertex_count() == mesh.vertex_count());
  REQUIRE(back.face_count() == mesh.face_count());
  CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.faces - mesh.faces).cwiseAbs().maxCoeff() == 0);
  CHECK(euler_characteristic(back) == -1);
}

TEST_CASE("OFF reader rejects malformed input") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "steklov_offbad.off";
  {
    std::ofstream out(path);
    out << "# not an OFF file\nNOFF\n1 1 0\n";
  }
  CHECK_THROWS_AS((void)read_off(path.string()), Error);
  fs::remove(path);
  CHECK_THROWS_AS((void)read_off("/nonexistent/steklov.off"), Error);
}

#pragma once

// Forward solvers: the closed-form Dirichlet-to-Neumann map of the unit
// disk, and a P1 finite element DN map for triangulated surfaces with one
// boundary circle. The stiffness matrix uses cotangent weights from the
// embedding metric; a conformal factor never enters the Dirichlet energy
// in two dimensions, so it is validated (positive, 1 on the boundary) and
// otherwise ignored. The discrete DN is the boundary Schur complement in
// the lumped boundary mass inner product.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "steklov/boundary_operator.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// DN map of the unit disk in the Fourier basis: diag(|n|). Requires the
/// standard boundary length 2 pi.
template <typename Scalar>
BoundaryOperatorT<Scalar> dn_disk(const GridSpecT<Scalar>& grid) {
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  if (std::abs(grid.length - two_pi) > Scalar(1e-12) * two_pi)
    throw Error("dn_disk: unit disk requires boundary length 2*pi");
  MatC<Scalar> m = MatC<Scalar>::Zero(grid.samples(), grid.samples());
  for (int i = 0; i < grid.samples(); ++i)
    m(i, i) = std::complex<Scalar>(std::abs(grid.mode(i)), 0);
  return make_operator(grid, m);
}

inline BoundaryOperator dn_disk(const GridSpec& grid) {
  return dn_disk<double>(grid);
}

/// DN map discretized on the boundary vertices of a mesh.
struct DiscreteDN {
  Eigen::MatrixXd matrix;     // n_B x n_B, acts on boundary vertex values
  std::vector<int> boundary;  // mesh vertex ids in loop order
  Eigen::VectorXd arclength;  // s_k along the loop, s_0 = 0
  Eigen::VectorXd mass;       // lumped boundary masses (adjacent half-edges)
  double length = 0;          // total boundary length
};

inline DiscreteDN dn_from_mesh(const SurfaceMesh& mesh) {
  validate(mesh);
  if (mesh.conformal_factor.size() != 0) {
    auto loops = boundary_loops(mesh);
    for (int v : loops[0])
      if (std::abs(mesh.conformal_factor(v) - 1.0) > 1e-12)
        throw DegenerateMesh("dn_from_mesh: conformal factor must be 1 on the boundary");
  }

  const int nv = mesh.vertex_count();
  std::vector<int> loop = boundary_loops(mesh)[0];
  const int nb = static_cast<int>(loop.size());

  std::vector<int> role(nv, -1);  // boundary position or -1
  for (int k = 0; k < nb; ++k) role[loop[k]] = k;
  std::vector<int> interior;
  interior.reserve(nv - nb);
  std::vector<int> iidx(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (role[v] < 0) {
      iidx[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  const int ni = static_cast<int>(interior.size());

  // Cotangent stiffness, assembled by triangle.
  std::vector<Eigen::Triplet<double>> tbb, tbi, tib, tii;
  auto add = [&](int a, int b, double w) {
    const bool ab = role[a] >= 0, bb = role[b] >= 0;
    const int ia = ab ? role[a] : iidx[a];
    const int ib = bb ? role[b] : iidx[b];
    if (ab && bb)
      tbb.emplace_back(ia, ib, w);
    else if (ab && !bb)
      tbi.emplace_back(ia, ib, w);
    else if (!ab && bb)
      tib.emplace_back(ia, ib, w);
    else
      tii.emplace_back(ia, ib, w);
  };
  for (int f = 0; f < mesh.face_count(); ++f) {
    const int i = mesh.faces(f, 0), j = mesh.faces(f, 1), k = mesh.faces(f, 2);
    const Eigen::Vector3d p[3] = {mesh.vertices.row(i), mesh.vertices.row(j),
                                  mesh.vertices.row(k)};
    const double area2 = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    const int vid[3] = {i, j, k};
    for (int c = 0; c < 3; ++c) {
      // cot of the angle at corner c weights the opposite edge (c+1, c+2)
      const Eigen::Vector3d e1 = p[(c + 1) % 3] - p[c];
      const Eigen::Vector3d e2 = p[(c + 2) % 3] - p[c];
      const double w = 0.5 * e1.dot(e2) / area2;
      const int a = vid[(c + 1) % 3], b = vid[(c + 2) % 3];
      add(a, b, -w);
      add(b, a, -w);
      add(a, a, w);
      add(b, b, w);
    }
  }

  Eigen::SparseMatrix<double> abb(nb, nb), abi(nb, ni), aib(ni, nb), aii(ni, ni);
  abb.setFromTriplets(tbb.begin(), tbb.end());
  abi.setFromTriplets(tbi.begin(), tbi.end());
  aib.setFromTriplets(tib.begin(), tib.end());
  aii.setFromTriplets(tii.begin(), tii.end());

  Eigen::MatrixXd schur;
  if (ni > 0) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(aii);
    if (solver.info() != Eigen::Success)
      throw SingularInterior("dn_from_mesh: interior stiffness factorization failed");
    Eigen::MatrixXd x = solver.solve(Eigen::MatrixXd(aib));
    if (solver.info() != Eigen::Success)
      throw SingularInterior("dn_from_mesh: interior solve failed");
    schur = Eigen::MatrixXd(abb) - Eigen::MatrixXd(abi) * x;
  } else {
    schur = Eigen::MatrixXd(abb);
  }
  schur = 0.5 * (schur + schur.transpose()).eval();  // exact up to roundoff

  DiscreteDN dn;
  dn.boundary = loop;
  dn.arclength.resize(nb);
  dn.mass.resize(nb);
  std::vector<double> elen(nb);
  for (int k = 0; k < nb; ++k) {
    const Eigen::Vector3d a = mesh.vertices.row(loop[k]);
    const Eigen::Vector3d b = mesh.vertices.row(loop[(k + 1) % nb]);
    elen[k] = (b - a).norm();
  }
  dn.arclength[0] = 0;
  for (int k = 1; k < nb; ++k) dn.arclength[k] = dn.arclength[k - 1] + elen[k - 1];
  dn.length = dn.arclength[nb - 1] + elen[nb - 1];
  for (int k = 0; k < nb; ++k)
    dn.mass[k] = 0.5 * (elen[k] + elen[(k + nb - 1) % nb]);
  dn.matrix = dn.mass.cwiseInverse().asDiagonal() * schur;
  return dn;
}

/// Project a discrete DN map onto the Fourier basis of `grid`, rescaling
/// the boundary arclength to the grid length. The mode functions are
/// least-squares fitted at the boundary vertices with the lumped mass as
/// quadrature weight. The positive direction is the one induced by the
/// face orientation of the mesh; reading the boundary the other way gives
/// the operator of the mirror surface, which is just as valid, so no
/// direction is second-guessed here.
template <typename Scalar>
BoundaryOperatorT<Scalar> to_fourier(const DiscreteDN& dn,
                                     const GridSpecT<Scalar>& grid) {
  const int nb = static_cast<int>(dn.boundary.size());
  const int w = grid.samples();
  if (nb < 2 * w)
    throw Underresolved("to_fourier: boundary has " + std::to_string(nb) +
                        " vertices, need at least " + std::to_string(2 * w));

  MatC<Scalar> e(nb, w);
  for (int k = 0; k < nb; ++k) {
    const Scalar t = Scalar(dn.arclength[k]) * grid.length / Scalar(dn.length);
    for (int j = 0; j < w; ++j)
      e(k, j) = std::polar(Scalar(1), grid.frequency(grid.mode(j)) * t);
  }
  Eigen::VectorX<Scalar> wts = dn.mass.cast<Scalar>();
  MatC<Scalar> ew = wts.asDiagonal() * e;
  MatC<Scalar> gram = e.adjoint() * ew;
  // Images of the modes under the vertex DN, then weighted LS back to modes.
  MatC<Scalar> de = dn.matrix.cast<Scalar>() * e;
  MatC<Scalar> rhs = ew.adjoint() * de;
  MatC<Scalar> b = gram.ldlt().solve(rhs);
  // Homothety normalization: scaling the surface so the boundary length
  // becomes grid.length scales the DN by len/L. This keeps the operator
  // paired with d/dt on the length-L circle (the Cauchy-Riemann relation
  // holds in one common parametrization).
  b *= Scalar(dn.length) / grid.length;

  auto op = make_operator(grid, b);
  if (!op.real_flag)
    throw NotRealOperator("to_fourier: projected operator lost realness");
  return op;
}

}  // namespace steklov

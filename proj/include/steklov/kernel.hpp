#pragma once

// Numerical rank and kernel extraction. Rank decisions are only reported
// when a clear singular-value gap brackets the tolerance; otherwise the
// caller gets RankAmbiguous with both candidate values. Kernel bases are
// returned orthonormal and ordered smoothest-first so that low-bandwidth
// holomorphic coordinates appear early.

#include <Eigen/Dense>
#include <limits>

#include "steklov/boundary_operator.hpp"

namespace steklov {

struct RankPolicy {
  double rel_tol = -1;      // threshold factor on sigma_max; -1 = n * 1e-13
  double abs_floor = 0;     // absolute singular value floor (solver noise)
  double gap_factor = 1e3;  // required ratio across the cut
};

template <typename Scalar>
struct RankResultT {
  int rank = 0;
  Scalar gap = 0;  // achieved ratio across the cut (inf-like when clean)
  Scalar tol = 0;
  Eigen::VectorX<Scalar> sigmas;  // descending
};

using RankResult = RankResultT<double>;

template <typename Scalar>
RankResultT<Scalar> estimate_rank(const MatC<Scalar>& m,
                                  const RankPolicy& policy = {},
                                  const char* where = "estimate_rank") {
  Eigen::JacobiSVD<MatC<Scalar>> svd(m);
  Eigen::VectorX<Scalar> s = svd.singularValues();
  const int w = static_cast<int>(s.size());
  const Scalar smax = s(0);
  const Scalar rel = policy.rel_tol > 0 ? Scalar(policy.rel_tol)
                                        : Scalar(w) * Scalar(1e-13);
  const Scalar tol =
      std::max(rel * smax, static_cast<Scalar>(policy.abs_floor));

  int rank = 0;
  while (rank < w && s(rank) > tol) ++rank;

  const Scalar huge = std::numeric_limits<Scalar>::infinity();
  Scalar gap;
  if (rank == 0)
    gap = s(0) > 0 ? tol / s(0) : huge;
  else if (rank == w)
    gap = huge;
  else
    gap = s(rank) > 0 ? s(rank - 1) / s(rank) : huge;

  if (gap < Scalar(policy.gap_factor)) {
    std::ostringstream msg;
    msg << where << ": no clear spectral gap at the tolerance cut (ratio "
        << gap << ", tol " << tol << ")";
    throw RankAmbiguous(msg.str(), rank, rank + 1, static_cast<double>(gap));
  }
  return RankResultT<Scalar>{rank, gap, tol, s};
}

/// Rank by the first clear relative gap, scanning from the top of the
/// spectrum; an external scale plays the role of sigma_{-1}. Suited to
/// operators expected to be low-rank plus a noise tail whose own internal
/// drops must not be mistaken for the cut. The rank-0 decision (everything
/// is noise) can be held to a stricter ratio via zero_gap; -1 means the
/// same as min_gap. Falls back to full rank (the final drop to zero always
/// qualifies) and never throws; the caller judges the returned gap.
template <typename Scalar>
RankResultT<Scalar> rank_by_gap(const MatC<Scalar>& m, Scalar scale,
                                Scalar min_gap = Scalar(10),
                                Scalar zero_gap = Scalar(-1)) {
  Eigen::JacobiSVD<MatC<Scalar>> svd(m);
  Eigen::VectorX<Scalar> s = svd.singularValues();
  const int w = static_cast<int>(s.size());
  if (zero_gap <= 0) zero_gap = min_gap;
  RankResultT<Scalar> out;
  out.sigmas = s;
  out.tol = std::max(scale, s(0)) * Scalar(w) * Scalar(1e-13);
  out.rank = w;
  out.gap = std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k <= w; ++k) {
    const Scalar above = k == 0 ? scale : s(k - 1);
    const Scalar below = k == w ? Scalar(0) : s(k);
    const Scalar ratio = below > 0 ? above / below
                                   : std::numeric_limits<Scalar>::infinity();
    if (ratio >= (k == 0 ? zero_gap : min_gap)) {
      out.rank = k;
      out.gap = ratio;
      break;
    }
  }
  return out;
}

template <typename Scalar>
struct KernelBasisT {
  GridSpecT<Scalar> grid;
  MatC<Scalar> basis;             // orthonormal columns, smoothest first
  Eigen::VectorX<Scalar> sigmas;  // full spectrum of the parent operator
  Scalar tol = 0;
  Scalar gap = 0;

  int dim() const { return static_cast<int>(basis.cols()); }

  BoundaryFunctionT<Scalar> function(int i) const {
    return from_coeffs(grid, VecC<Scalar>(basis.col(i)));
  }
};

using KernelBasis = KernelBasisT<double>;

/// Orthonormal basis of the numerical kernel of U, smoothest-first by the
/// Sobolev weight sum (1+n^2)|c_n|^2, each column phase-normalized.
template <typename Scalar>
KernelBasisT<Scalar> kernel_basis(const BoundaryOperatorT<Scalar>& u,
                                  const RankPolicy& policy = {}) {
  const int w = u.grid.samples();
  Eigen::JacobiSVD<MatC<Scalar>> svd(u.matrix, Eigen::ComputeFullV);
  Eigen::VectorX<Scalar> s = svd.singularValues();
  const Scalar rel = policy.rel_tol > 0 ? Scalar(policy.rel_tol)
                                        : Scalar(w) * Scalar(1e-13);
  const Scalar tol =
      std::max(rel * s(0), static_cast<Scalar>(policy.abs_floor));
  int rank = 0;
  while (rank < w && s(rank) > tol) ++rank;
  const Scalar huge = std::numeric_limits<Scalar>::infinity();
  Scalar gap;
  if (rank == 0)
    gap = s(0) > 0 ? tol / s(0) : huge;
  else if (rank == w)
    gap = huge;
  else
    gap = s(rank) > 0 ? s(rank - 1) / s(rank) : huge;
  if (gap < Scalar(policy.gap_factor))
    throw RankAmbiguous("kernel_basis: kernel dimension is ambiguous",
                        w - rank, w - rank - 1, static_cast<double>(gap));

  MatC<Scalar> k = svd.matrixV().rightCols(w - rank);

  if (k.cols() > 0) {
    // Rotate within the kernel to diagonalize the Sobolev form, ascending.
    Eigen::VectorX<Scalar> sob(w);
    for (int i = 0; i < w; ++i) {
      const Scalar n = Scalar(u.grid.mode(i));
      sob(i) = Scalar(1) + n * n;
    }
    MatC<Scalar> h = k.adjoint() * sob.asDiagonal() * k;
    Eigen::SelfAdjointEigenSolver<MatC<Scalar>> eig(h);
    k = (k * eig.eigenvectors()).eval();
    // Fix phases: largest entry of each column made real positive.
    for (int c = 0; c < k.cols(); ++c) {
      int arg = 0;
      Scalar best = -1;
      for (int i = 0; i < w; ++i)
        if (std::abs(k(i, c)) > best + Scalar(1e-15)) {
          best = std::abs(k(i, c));
          arg = i;
        }
      const std::complex<Scalar> ph = k(arg, c) / std::abs(k(arg, c));
      k.col(c) /= ph;
    }
  }
  return KernelBasisT<Scalar>{u.grid, k, s, tol, gap};
}

/// Rank of U_{eta,z} restricted to a kernel subspace: SVD of the matrix
/// whose columns are the images of the basis vectors. The tolerance is
/// taken relative to the supplied scale (typically the norm of U_{eta,z}).
template <typename Scalar>
int rank_on_subspace(const BoundaryOperatorT<Scalar>& op,
                     const KernelBasisT<Scalar>& kb, Scalar scale,
                     Scalar rel_tol) {
  require_same_grid(op.grid, kb.grid, "rank_on_subspace");
  if (kb.dim() == 0) return 0;
  MatC<Scalar> c = op.matrix * kb.basis;
  Eigen::JacobiSVD<MatC<Scalar>> svd(c);
  Eigen::VectorX<Scalar> s = svd.singularValues();
  const Scalar tol = rel_tol * std::max(scale, Scalar(1e-300));
  int rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  return rank;
}

}  // namespace steklov

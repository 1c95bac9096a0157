#pragma once

// Topology of the underlying surface read off the boundary operator. The
// handle operator of a surface with one boundary circle has rank 1 - chi,
// always even, so the rank fixes the Euler characteristic and the genus.
//
// The rank is decided on the Sobolev-conjugated handle operator
// S^-1 (d + Lambda J Lambda) S^-1 with S = diag(1 + n^2): the conjugation
// is invertible, so the rank is untouched, but discretization noise
// concentrated in high modes is damped enough to open the spectral gap at
// the true rank, independently of the truncation order.
//
// Two thresholds guard the cut. Declaring rank 0 (no handles) requires the
// whole spectrum to sit far below the reference scale (ratio >= 40), since
// a surface with weakly coupled handles produces a genuine but small top
// pair; interior cuts need ratio >= 10.

#include "steklov/kernel.hpp"
#include "steklov/upsilon.hpp"

namespace steklov {

template <typename Scalar>
struct TopologyResultT {
  int handle_rank = 0;
  int euler_characteristic = 1;
  int genus = 0;
  Scalar gap = 0;                 // spectral gap at the rank cut
  Eigen::VectorX<Scalar> sigmas;  // weighted handle spectrum, descending
};

using TopologyResult = TopologyResultT<double>;

template <typename Scalar>
Eigen::VectorX<Scalar> sobolev_weights(const GridSpecT<Scalar>& grid) {
  Eigen::VectorX<Scalar> w(grid.samples());
  for (int i = 0; i < grid.samples(); ++i) {
    const Scalar n = Scalar(grid.mode(i));
    w(i) = Scalar(1) + n * n;
  }
  return w;
}

/// Extract the handle rank and derived topology from a boundary operator.
/// Throws OddRank when the detected rank cannot come from a closed-up
/// surface.
template <typename Scalar>
TopologyResultT<Scalar> topology_of(const BoundaryOperatorT<Scalar>& op,
                                    Scalar min_gap = Scalar(10),
                                    Scalar zero_gap = Scalar(40)) {
  const auto h = handle_operator(op);
  const Eigen::VectorX<Scalar> s = sobolev_weights(op.grid);
  const MatC<Scalar> damped = s.cwiseInverse().asDiagonal() * h.matrix *
                              s.cwiseInverse().asDiagonal();
  // Reference scale: the conjugated derivative is diagonal with entries
  // (2 pi / L) n / (1 + n^2)^2, largest at n = 1.
  Scalar scale = 0;
  for (int i = 0; i < op.grid.samples(); ++i) {
    const Scalar n = Scalar(op.grid.mode(i));
    const Scalar d = Scalar(1) + n * n;
    scale = std::max(
        scale, std::abs(op.grid.frequency(op.grid.mode(i))) / (d * d));
  }
  auto rr = rank_by_gap(damped, scale, min_gap, zero_gap);
  if (rr.rank % 2 != 0)
    throw OddRank("topology_of: handle rank " + std::to_string(rr.rank) +
                  " is odd; not an operator of a closed-up surface");
  TopologyResultT<Scalar> out;
  out.handle_rank = rr.rank;
  out.euler_characteristic = 1 - rr.rank;
  out.genus = rr.rank / 2;
  out.gap = rr.gap;
  out.sigmas = rr.sigmas;
  return out;
}

}  // namespace steklov

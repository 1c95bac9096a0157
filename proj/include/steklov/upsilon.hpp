#pragma once

// Assembly of the generalized Cauchy-Riemann checker and its localized
// variant. For a real operator L (Fourier matrix M) the complex bundling
//
//   U = M + i * Dgamma
//
// acts on zeta = f + i g as (L f - g') + i (L g + f'). Its kernel, when L
// is a Dirichlet-to-Neumann map, consists of boundary traces of holomorphic
// functions. The localized operator U_{eta,z} zeta = U(zeta / (eta - z))
// is U composed with multiplication by the sampled reciprocal.

#include "steklov/boundary_operator.hpp"

namespace steklov {

template <typename Scalar>
BoundaryOperatorT<Scalar> build_upsilon(const BoundaryOperatorT<Scalar>& op) {
  if (!op.real_flag)
    throw NotRealOperator("build_upsilon: operator is not real within tolerance");
  auto d = derivative_operator(op.grid);
  MatC<Scalar> u = op.matrix + std::complex<Scalar>(0, 1) * d.matrix;
  BoundaryOperatorT<Scalar> ups{op.grid, u, op.orientation, false, {}};
  return ups;
}

/// Centered Fourier coefficients of 1/(eta - z) for differences |d| <= 2N,
/// computed on an adaptively refined sample set so that aliasing of the
/// geometric tail stays below ~1e-13 relative. Throws OnBoundaryCurve when
/// z comes within dist_tol * sup|eta| of the sampled curve.
template <typename Scalar>
VecC<Scalar> reciprocal_coeffs(const BoundaryFunctionT<Scalar>& eta,
                               std::complex<Scalar> z,
                               Scalar dist_tol = Scalar(1e-6),
                               Scalar* min_distance_out = nullptr) {
  const int need = 2 * eta.grid.modes;
  const Scalar scale = std::max(sup_norm(eta), Scalar(1e-300));
  int pad = next_pow2(std::max(16 * eta.grid.samples(), 512));
  const int pad_max = 1 << 16;
  VecC<Scalar> coeff;
  while (true) {
    VecC<Scalar> es = idft_centered<Scalar>(eta.coeff, pad);
    Scalar dist = std::numeric_limits<Scalar>::max();
    VecC<Scalar> w(pad);
    for (int k = 0; k < pad; ++k) {
      const std::complex<Scalar> dz = es[k] - z;
      dist = std::min(dist, std::abs(dz));
      w[k] = Scalar(1) / dz;
    }
    if (min_distance_out) *min_distance_out = dist;
    if (dist < dist_tol * scale)
      throw OnBoundaryCurve("reciprocal_coeffs: point is on the image curve");
    const int half = pad / 2 - 1;
    VecC<Scalar> full = dft_centered<Scalar>(w, half);
    Scalar peak = 0, tail = 0;
    for (int n = -half; n <= half; ++n) {
      const Scalar a = std::abs(full[n + half]);
      peak = std::max(peak, a);
      if (std::abs(n) > half / 2) tail = std::max(tail, a);
    }
    if (tail <= Scalar(1e-13) * peak || pad >= pad_max) {
      coeff = VecC<Scalar>(2 * need + 1);
      for (int n = -need; n <= need; ++n) coeff[n + need] = full[n + half];
      return coeff;
    }
    pad *= 2;
  }
}

/// U_{eta,z}: the bundled operator composed with multiplication by
/// 1/(eta - z), truncated to the carrier grid.
template <typename Scalar>
BoundaryOperatorT<Scalar> build_upsilon_eta_z(
    const BoundaryOperatorT<Scalar>& upsilon,
    const BoundaryFunctionT<Scalar>& eta, std::complex<Scalar> z,
    Scalar dist_tol = Scalar(1e-6)) {
  require_same_grid(upsilon.grid, eta.grid, "build_upsilon_eta_z");
  Scalar dist = 0;
  VecC<Scalar> rc = reciprocal_coeffs(eta, z, dist_tol, &dist);
  auto r = multiplication_operator(upsilon.grid, rc);
  BoundaryOperatorT<Scalar> out{upsilon.grid,
                                (upsilon.matrix * r.matrix).eval(),
                                upsilon.orientation,
                                false,
                                {}};
  out.diagnostics["min_distance"] = dist;
  return out;
}

/// Handle detector Dgamma + L J L with the mean projected out around J.
/// Its numerical rank equals 1 - chi(M) for a Dirichlet-to-Neumann map of
/// a surface M with one boundary circle. diagnostics["mean_leak"] records
/// the norm of the mean component of L (the part the projection removes).
template <typename Scalar>
BoundaryOperatorT<Scalar> handle_operator(const BoundaryOperatorT<Scalar>& op) {
  if (!op.real_flag)
    throw NotRealOperator("handle_operator: operator is not real within tolerance");
  auto d = derivative_operator(op.grid);
  auto j = integration_operator(op.grid);
  MatC<Scalar> h = d.matrix + op.matrix * j.matrix * op.matrix;
  BoundaryOperatorT<Scalar> out{op.grid, h, op.orientation, false, {}};
  out.real_flag = realness_defect(h) <=
                  Scalar(1e-10) * std::max(Scalar(1), h.cwiseAbs().maxCoeff());
  out.diagnostics["mean_leak"] =
      op.matrix.row(op.grid.index(0)).norm();
  return out;
}

}  // namespace steklov

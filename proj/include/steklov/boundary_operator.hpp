#pragma once

// Linear operators on boundary functions, stored as dense matrices in the
// centered Fourier basis: column j holds the coefficients of the image of
// mode j-N. A matrix represents a real operator (one mapping real functions
// to real functions) iff M(-m,-n) = conj(M(m,n)); real_flag records that.

#include <Eigen/Dense>
#include <map>
#include <string>

#include "steklov/boundary_function.hpp"

namespace steklov {

template <typename Scalar>
struct BoundaryOperatorT {
  GridSpecT<Scalar> grid;
  MatC<Scalar> matrix;   // (2N+1) x (2N+1)
  int orientation = +1;  // +1 once calibrated to positive boundary traversal
  bool real_flag = false;
  std::map<std::string, Scalar> diagnostics;  // solver or build metadata
};

using BoundaryOperator = BoundaryOperatorT<double>;

/// Largest violation of the real-operator symmetry M(-m,-n) = conj(M(m,n)).
template <typename Scalar>
Scalar realness_defect(const MatC<Scalar>& m) {
  const int w = static_cast<int>(m.rows());
  Scalar worst = 0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      worst = std::max(worst,
                       std::abs(m(w - 1 - i, w - 1 - j) - std::conj(m(i, j))));
  return worst;
}

template <typename Scalar>
BoundaryOperatorT<Scalar> make_operator(const GridSpecT<Scalar>& grid,
                                        const MatC<Scalar>& matrix,
                                        int orientation = +1) {
  if (!grid.valid()) throw Error("make_operator: invalid grid");
  if (matrix.rows() != grid.samples() || matrix.cols() != grid.samples())
    throw GridMismatch("make_operator: matrix size does not match grid");
  BoundaryOperatorT<Scalar> op{grid, matrix, orientation, false, {}};
  const Scalar scale = std::max(Scalar(1), matrix.cwiseAbs().maxCoeff());
  op.real_flag = realness_defect(matrix) <= Scalar(1e-10) * scale;
  return op;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> apply(const BoundaryOperatorT<Scalar>& op,
                                const BoundaryFunctionT<Scalar>& f) {
  require_same_grid(op.grid, f.grid, "apply");
  auto out = from_coeffs(op.grid, (op.matrix * f.coeff).eval());
  out.real_flag = op.real_flag && f.real_flag;
  return out;
}

/// Operator 2-norm (largest singular value).
template <typename Scalar>
Scalar operator_norm(const BoundaryOperatorT<Scalar>& op) {
  Eigen::JacobiSVD<MatC<Scalar>> svd(op.matrix);
  return svd.singularValues()(0);
}

/// d/dgamma as a diagonal matrix: diag(2*pi*i*n/L).
template <typename Scalar>
BoundaryOperatorT<Scalar> derivative_operator(const GridSpecT<Scalar>& grid) {
  MatC<Scalar> m = MatC<Scalar>::Zero(grid.samples(), grid.samples());
  for (int i = 0; i < grid.samples(); ++i)
    m(i, i) = std::complex<Scalar>(0, grid.frequency(grid.mode(i)));
  return make_operator(grid, m);
}

/// Zero-mean antiderivative J: diag(L/(2*pi*i*n)) with 0 at n = 0. Includes
/// the mean projection on both sides, so J = P0 J P0 as a matrix.
template <typename Scalar>
BoundaryOperatorT<Scalar> integration_operator(const GridSpecT<Scalar>& grid) {
  MatC<Scalar> m = MatC<Scalar>::Zero(grid.samples(), grid.samples());
  for (int i = 0; i < grid.samples(); ++i) {
    const int n = grid.mode(i);
    if (n != 0)
      m(i, i) = Scalar(1) / std::complex<Scalar>(0, grid.frequency(n));
  }
  return make_operator(grid, m);
}

template <typename Scalar>
BoundaryOperatorT<Scalar> identity_operator(const GridSpecT<Scalar>& grid) {
  return make_operator(
      grid, MatC<Scalar>(MatC<Scalar>::Identity(grid.samples(), grid.samples())));
}

/// Multiplication by the trigonometric polynomial with the given centered
/// coefficients (any odd width), truncated to the grid: a Toeplitz matrix
/// R(m,n) = w_{m-n}.
template <typename Scalar>
BoundaryOperatorT<Scalar> multiplication_operator(const GridSpecT<Scalar>& grid,
                                                  const VecC<Scalar>& wcoeff) {
  const int wmodes = (static_cast<int>(wcoeff.size()) - 1) / 2;
  const int w = grid.samples();
  MatC<Scalar> m = MatC<Scalar>::Zero(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) {
      const int d = grid.mode(i) - grid.mode(j);
      if (std::abs(d) <= wmodes) m(i, j) = wcoeff[d + wmodes];
    }
  return make_operator(grid, m);
}

/// Conjugate an operator by the index flip n -> -n (reading the boundary
/// with reversed orientation). Spectra are preserved.
template <typename Scalar>
BoundaryOperatorT<Scalar> reverse_orientation(const BoundaryOperatorT<Scalar>& op) {
  const int w = op.grid.samples();
  MatC<Scalar> m(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) m(i, j) = op.matrix(w - 1 - i, w - 1 - j);
  auto out = make_operator(op.grid, m, -op.orientation);
  out.diagnostics = op.diagnostics;
  return out;
}

// ---- arithmetic -----------------------------------------------------------

template <typename Scalar>
BoundaryOperatorT<Scalar> operator+(const BoundaryOperatorT<Scalar>& a,
                                    const BoundaryOperatorT<Scalar>& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  return make_operator(a.grid, (a.matrix + b.matrix).eval(), a.orientation);
}

template <typename Scalar>
BoundaryOperatorT<Scalar> operator-(const BoundaryOperatorT<Scalar>& a,
                                    const BoundaryOperatorT<Scalar>& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  return make_operator(a.grid, (a.matrix - b.matrix).eval(), a.orientation);
}

template <typename Scalar>
BoundaryOperatorT<Scalar> operator*(const BoundaryOperatorT<Scalar>& a,
                                    const BoundaryOperatorT<Scalar>& b) {
  require_same_grid(a.grid, b.grid, "operator*");
  return make_operator(a.grid, (a.matrix * b.matrix).eval(), a.orientation);
}

template <typename Scalar>
BoundaryOperatorT<Scalar> operator*(std::complex<Scalar> c,
                                    const BoundaryOperatorT<Scalar>& a) {
  return make_operator(a.grid, (c * a.matrix).eval(), a.orientation);
}

}  // namespace steklov

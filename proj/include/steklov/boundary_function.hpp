#pragma once

// Complex-valued functions on the boundary circle, held in both sample and
// Fourier form (the two are DFT-consistent by construction). Operations are
// free functions returning new values. Products are formed alias-free on a
// padded grid and truncated back to the carrier bandwidth.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "steklov/fourier.hpp"
#include "steklov/grid.hpp"

namespace steklov {

template <typename Scalar>
struct BoundaryFunctionT {
  GridSpecT<Scalar> grid;
  VecC<Scalar> samples;  // values at the 2N+1 uniform arclength points
  VecC<Scalar> coeff;    // centered modes -N..N
  bool real_flag = false;

  std::complex<Scalar> operator()(Scalar s) const {
    return trig_eval(coeff, grid.length, s);
  }
};

using BoundaryFunction = BoundaryFunctionT<double>;

namespace detail {

template <typename Scalar>
bool samples_look_real(const VecC<Scalar>& v) {
  Scalar peak = 0, imag = 0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    peak = std::max(peak, std::abs(v[k]));
    imag = std::max(imag, std::abs(v[k].imag()));
  }
  return imag <= Scalar(1e-12) * std::max(Scalar(1), peak);
}

}  // namespace detail

template <typename Scalar>
BoundaryFunctionT<Scalar> from_samples(const GridSpecT<Scalar>& grid,
                                       const VecC<Scalar>& samples) {
  if (!grid.valid()) throw Error("from_samples: invalid grid");
  if (samples.size() != grid.samples())
    throw GridMismatch("from_samples: sample count does not match grid");
  BoundaryFunctionT<Scalar> f{grid, samples,
                              dft_centered<Scalar>(samples, grid.modes),
                              detail::samples_look_real(samples)};
  return f;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> from_coeffs(const GridSpecT<Scalar>& grid,
                                      const VecC<Scalar>& coeff) {
  if (!grid.valid()) throw Error("from_coeffs: invalid grid");
  if (coeff.size() != grid.samples())
    throw GridMismatch("from_coeffs: coefficient count does not match grid");
  BoundaryFunctionT<Scalar> f{grid, idft_centered<Scalar>(coeff, grid.samples()),
                              coeff, false};
  f.real_flag = detail::samples_look_real(f.samples);
  return f;
}

template <typename Scalar, typename F>
BoundaryFunctionT<Scalar> from_callable(const GridSpecT<Scalar>& grid, F&& fn) {
  VecC<Scalar> v(grid.samples());
  for (int k = 0; k < grid.samples(); ++k)
    v[k] = std::complex<Scalar>(fn(grid.point(k)));
  return from_samples(grid, v);
}

template <typename Scalar>
BoundaryFunctionT<Scalar> zero(const GridSpecT<Scalar>& grid) {
  return from_coeffs(grid, VecC<Scalar>::Zero(grid.samples()));
}

/// The pure mode exp(2*pi*i*n*s/L), |n| <= N.
template <typename Scalar>
BoundaryFunctionT<Scalar> basis_mode(const GridSpecT<Scalar>& grid, int n) {
  if (std::abs(n) > grid.modes)
    throw Error("basis_mode: mode outside grid bandwidth");
  VecC<Scalar> c = VecC<Scalar>::Zero(grid.samples());
  c[grid.index(n)] = std::complex<Scalar>(1, 0);
  return from_coeffs(grid, c);
}

// ---- calculus -------------------------------------------------------------

/// Spectral arclength derivative: c_n -> (2*pi*i*n/L) c_n.
template <typename Scalar>
BoundaryFunctionT<Scalar> derivative(const BoundaryFunctionT<Scalar>& f) {
  VecC<Scalar> c(f.coeff.size());
  for (int i = 0; i < f.grid.samples(); ++i)
    c[i] = f.coeff[i] * std::complex<Scalar>(0, f.grid.frequency(f.grid.mode(i)));
  auto g = from_coeffs(f.grid, c);
  g.real_flag = f.real_flag;
  return g;
}

template <typename Scalar>
std::complex<Scalar> mean(const BoundaryFunctionT<Scalar>& f) {
  return f.coeff[f.grid.modes];
}

/// L2 norm in the normalized circle inner product: sqrt(sum |c_n|^2).
template <typename Scalar>
Scalar norm(const BoundaryFunctionT<Scalar>& f) {
  return f.coeff.norm();
}

template <typename Scalar>
std::complex<Scalar> inner(const BoundaryFunctionT<Scalar>& f,
                           const BoundaryFunctionT<Scalar>& g) {
  require_same_grid(f.grid, g.grid, "inner");
  return f.coeff.dot(g.coeff);  // conjugates the left argument
}

/// Max modulus, estimated on a 4x refined sample set.
template <typename Scalar>
Scalar sup_norm(const BoundaryFunctionT<Scalar>& f) {
  VecC<Scalar> fine = idft_centered<Scalar>(f.coeff, next_pow2(4 * f.grid.samples()));
  Scalar m = 0;
  for (Eigen::Index k = 0; k < fine.size(); ++k)
    m = std::max(m, std::abs(fine[k]));
  return m;
}

/// Min modulus, estimated on a 4x refined sample set.
template <typename Scalar>
Scalar inf_modulus(const BoundaryFunctionT<Scalar>& f) {
  VecC<Scalar> fine = idft_centered<Scalar>(f.coeff, next_pow2(4 * f.grid.samples()));
  Scalar m = std::numeric_limits<Scalar>::max();
  for (Eigen::Index k = 0; k < fine.size(); ++k)
    m = std::min(m, std::abs(fine[k]));
  return m;
}

/// Antiderivative with zero mean: c_n -> c_n L/(2*pi*i*n), c_0 -> 0.
/// Inverse of `derivative` on zero-mean functions.
template <typename Scalar>
BoundaryFunctionT<Scalar> integrate_J(const BoundaryFunctionT<Scalar>& f,
                                      Scalar mean_tol = Scalar(1e-12)) {
  const Scalar scale = std::max(norm(f), Scalar(1e-300));
  if (std::abs(mean(f)) > mean_tol * std::max(scale, Scalar(1)))
    throw NonZeroMean("integrate_J: input has nonzero mean");
  VecC<Scalar> c(f.coeff.size());
  for (int i = 0; i < f.grid.samples(); ++i) {
    const int n = f.grid.mode(i);
    c[i] = n == 0 ? std::complex<Scalar>(0, 0)
                  : f.coeff[i] / std::complex<Scalar>(0, f.grid.frequency(n));
  }
  auto g = from_coeffs(f.grid, c);
  g.real_flag = f.real_flag;
  return g;
}

struct MultiplyInfo {
  double truncation_loss = 0;  // relative energy in modes beyond the grid
  bool truncated = false;
};

/// Pointwise product, computed on a padded grid so that modes up to 2N are
/// alias-free, then truncated to the carrier. Energy lost to truncation is
/// reported through `info` when supplied.
template <typename Scalar>
BoundaryFunctionT<Scalar> multiply(const BoundaryFunctionT<Scalar>& f,
                                   const BoundaryFunctionT<Scalar>& g,
                                   MultiplyInfo* info = nullptr) {
  require_same_grid(f.grid, g.grid, "multiply");
  const int big = 2 * f.grid.modes;     // exact bandwidth of the product
  const int pad = next_pow2(2 * big + 2);
  VecC<Scalar> pf = idft_centered<Scalar>(f.coeff, pad);
  VecC<Scalar> pg = idft_centered<Scalar>(g.coeff, pad);
  VecC<Scalar> prod = pf.cwiseProduct(pg);
  VecC<Scalar> full = dft_centered<Scalar>(prod, big);

  VecC<Scalar> kept = VecC<Scalar>::Zero(f.grid.samples());
  Scalar lost2 = 0, total2 = 0;
  for (int i = 0; i < static_cast<int>(full.size()); ++i) {
    const int n = i - big;
    const Scalar a2 = std::norm(full[i]);
    total2 += a2;
    if (std::abs(n) <= f.grid.modes)
      kept[f.grid.index(n)] = full[i];
    else
      lost2 += a2;
  }
  if (info) {
    info->truncation_loss =
        total2 > 0 ? std::sqrt(lost2 / total2) : 0.0;
    info->truncated = info->truncation_loss > 1e-14;
  }
  auto out = from_coeffs(f.grid, kept);
  out.real_flag = f.real_flag && g.real_flag;
  return out;
}

/// Change truncation: pad with zero modes or drop high modes.
template <typename Scalar>
BoundaryFunctionT<Scalar> resample(const BoundaryFunctionT<Scalar>& f,
                                   int new_modes) {
  GridSpecT<Scalar> g{new_modes, f.grid.length};
  if (!g.valid()) throw Error("resample: invalid target grid");
  VecC<Scalar> c = VecC<Scalar>::Zero(g.samples());
  const int keep = std::min(new_modes, f.grid.modes);
  for (int n = -keep; n <= keep; ++n) c[g.index(n)] = f.coeff[f.grid.index(n)];
  auto out = from_coeffs(g, c);
  out.real_flag = f.real_flag;
  return out;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> real_part(const BoundaryFunctionT<Scalar>& f) {
  VecC<Scalar> v = f.samples.real().template cast<std::complex<Scalar>>();
  return from_samples(f.grid, v);
}

template <typename Scalar>
BoundaryFunctionT<Scalar> imag_part(const BoundaryFunctionT<Scalar>& f) {
  VecC<Scalar> v = f.samples.imag().template cast<std::complex<Scalar>>();
  return from_samples(f.grid, v);
}

template <typename Scalar>
BoundaryFunctionT<Scalar> conj_fn(const BoundaryFunctionT<Scalar>& f) {
  return from_samples(f.grid, f.samples.conjugate().eval());
}

// ---- arithmetic -----------------------------------------------------------

template <typename Scalar>
BoundaryFunctionT<Scalar> operator+(const BoundaryFunctionT<Scalar>& f,
                                    const BoundaryFunctionT<Scalar>& g) {
  require_same_grid(f.grid, g.grid, "operator+");
  auto out = from_coeffs(f.grid, (f.coeff + g.coeff).eval());
  out.real_flag = f.real_flag && g.real_flag;
  return out;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> operator-(const BoundaryFunctionT<Scalar>& f,
                                    const BoundaryFunctionT<Scalar>& g) {
  require_same_grid(f.grid, g.grid, "operator-");
  auto out = from_coeffs(f.grid, (f.coeff - g.coeff).eval());
  out.real_flag = f.real_flag && g.real_flag;
  return out;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> operator*(std::complex<Scalar> a,
                                    const BoundaryFunctionT<Scalar>& f) {
  auto out = from_coeffs(f.grid, (a * f.coeff).eval());
  out.real_flag = f.real_flag && a.imag() == Scalar(0);
  return out;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> operator*(Scalar a, const BoundaryFunctionT<Scalar>& f) {
  return std::complex<Scalar>(a, 0) * f;
}

template <typename Scalar>
BoundaryFunctionT<Scalar> operator-(const BoundaryFunctionT<Scalar>& f) {
  return Scalar(-1) * f;
}

}  // namespace steklov

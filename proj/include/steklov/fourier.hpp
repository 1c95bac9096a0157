#pragma once

// Thin DFT layer mapping between uniform samples on the boundary circle
// and centered Fourier coefficients (index i of a coefficient vector is
// mode i-N). The sample convention is
//
//   f(s_k) = sum_n c_n exp(2*pi*i*n*k/M),   s_k = k L / M,
//
// which is exact for trigonometric polynomials of bandwidth <= (M-1)/2.

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "steklov/errors.hpp"

namespace steklov {

template <typename Scalar>
using VecC = Eigen::VectorX<std::complex<Scalar>>;
template <typename Scalar>
using MatC = Eigen::MatrixX<std::complex<Scalar>>;

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

/// Forward transform: centered coefficients for modes -nmodes..nmodes from
/// M >= 2*nmodes+1 uniform samples. Modes beyond nmodes are discarded.
template <typename Scalar>
VecC<Scalar> dft_centered(const VecC<Scalar>& samples, int nmodes) {
  const int m = static_cast<int>(samples.size());
  if (m < 2 * nmodes + 1)
    throw Error("dft_centered: fewer samples than requested modes");
  Eigen::FFT<Scalar> fft;
  VecC<Scalar> bins(m);
  VecC<Scalar> in = samples;
  fft.fwd(bins, in);
  VecC<Scalar> c(2 * nmodes + 1);
  for (int n = -nmodes; n <= nmodes; ++n)
    c[n + nmodes] = bins[(n % m + m) % m] / Scalar(m);
  return c;
}

/// Inverse transform: evaluate centered coefficients at sample_count
/// uniform points. sample_count may exceed the bandwidth (zero padding).
template <typename Scalar>
VecC<Scalar> idft_centered(const VecC<Scalar>& coeffs, int sample_count) {
  const int width = static_cast<int>(coeffs.size());
  const int nmodes = (width - 1) / 2;
  if (sample_count < width)
    throw Error("idft_centered: sample count below bandwidth");
  Eigen::FFT<Scalar> fft;
  VecC<Scalar> bins = VecC<Scalar>::Zero(sample_count);
  for (int n = -nmodes; n <= nmodes; ++n)
    bins[(n % sample_count + sample_count) % sample_count] = coeffs[n + nmodes];
  VecC<Scalar> out(sample_count);
  fft.inv(out, bins);
  return out * Scalar(sample_count);
}

/// Evaluate a centered coefficient vector at one arclength point.
template <typename Scalar>
std::complex<Scalar> trig_eval(const VecC<Scalar>& coeffs, Scalar length,
                               Scalar s) {
  const int nmodes = (static_cast<int>(coeffs.size()) - 1) / 2;
  const Scalar w = Scalar(2) * std::numbers::pi_v<Scalar> * s / length;
  std::complex<Scalar> acc(0, 0);
  // Horner in e^{i w} over n = -N..N, factored as e^{-iNw} * poly(e^{iw}).
  const std::complex<Scalar> z = std::polar(Scalar(1), w);
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
    acc = acc * z + coeffs[i];
  return acc * std::polar(Scalar(1), -Scalar(nmodes) * w);
}

}  // namespace steklov

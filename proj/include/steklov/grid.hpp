#pragma once

// Truncation grid shared by every spectral object: 2N+1 uniform arclength
// samples of a closed boundary curve of length L, paired with Fourier
// modes n = -N..N. Index i of any coefficient vector refers to mode i-N.

#include <cmath>
#include <numbers>
#include <sstream>

#include "steklov/errors.hpp"

namespace steklov {

template <typename Scalar>
struct GridSpecT {
  int modes = 0;       // N, highest retained frequency; N >= 4
  Scalar length = Scalar(2) * std::numbers::pi_v<Scalar>;  // L > 0

  int samples() const { return 2 * modes + 1; }

  /// Arclength of sample k, k = 0..2N.
  Scalar point(int k) const { return length * Scalar(k) / Scalar(samples()); }

  /// Physical wavenumber of mode n: 2*pi*n/L.
  Scalar frequency(int n) const {
    return Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(n) / length;
  }

  /// Mode of coefficient index i (inverse of `index`).
  int mode(int i) const { return i - modes; }
  int index(int n) const { return n + modes; }

  bool valid() const { return modes >= 4 && length > Scalar(0); }

  friend bool operator==(const GridSpecT& a, const GridSpecT& b) {
    const Scalar scale = std::max(std::abs(a.length), std::abs(b.length));
    return a.modes == b.modes &&
           std::abs(a.length - b.length) <= Scalar(1e-12) * scale;
  }
};

template <typename Scalar>
void require_same_grid(const GridSpecT<Scalar>& a, const GridSpecT<Scalar>& b,
                       const char* where) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << where << ": grids differ (N=" << a.modes << ", L=" << a.length
        << ") vs (N=" << b.modes << ", L=" << b.length << ")";
    throw GridMismatch(msg.str());
  }
}

using GridSpec = GridSpecT<double>;

}  // namespace steklov

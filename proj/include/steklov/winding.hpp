#pragma once

// Winding number of the image curve eta(Gamma) around a point, through the
// argument-principle integral
//
//   d(z) = 1/(2 pi i) * integral eta'(s) / (eta(s) - z) ds.
//
// The trapezoid rule on uniform samples is spectrally accurate here; the
// sample count is refined (doubling, shared across queries via a ladder)
// until the raw value settles on an integer within the requested defect.

#include <complex>
#include <optional>
#include <vector>

#include "steklov/boundary_function.hpp"

namespace steklov {

struct WindingOptions {
  double defect_tol = 0.01;  // |raw - nearest integer| allowed
  int min_samples = 256;
  int max_samples = 1 << 15;
};

template <typename Scalar>
struct WindingT {
  int value = 0;
  Scalar defect = 0;        // |raw - value| before rounding
  std::complex<Scalar> raw{0, 0};
  int samples = 0;
};

using Winding = WindingT<double>;

/// Shared refinement ladder of curve samples. Level p holds the curve and
/// its derivative at next_pow2(max(min_samples, 4*(2N+1))) * 2^p points.
template <typename Scalar>
class CurveSampler {
 public:
  explicit CurveSampler(const BoundaryFunctionT<Scalar>& eta,
                        int min_samples = 256)
      : eta_(eta),
        deta_coeff_(derivative(eta).coeff),
        base_(next_pow2(std::max(min_samples, 4 * eta.grid.samples()))) {}

  int count(int level) const { return base_ << level; }
  Scalar length() const { return eta_.grid.length; }
  const GridSpecT<Scalar>& grid() const { return eta_.grid; }

  const VecC<Scalar>& values(int level) {
    ensure(level);
    return values_[level];
  }
  const VecC<Scalar>& derivatives(int level) {
    ensure(level);
    return derivs_[level];
  }

 private:
  void ensure(int level) {
    while (static_cast<int>(values_.size()) <= level) {
      const int p = count(static_cast<int>(values_.size()));
      values_.push_back(idft_centered<Scalar>(eta_.coeff, p));
      derivs_.push_back(idft_centered<Scalar>(deta_coeff_, p));
    }
  }

  BoundaryFunctionT<Scalar> eta_;
  VecC<Scalar> deta_coeff_;
  int base_;
  std::vector<VecC<Scalar>> values_;
  std::vector<VecC<Scalar>> derivs_;
};

template <typename Scalar>
std::complex<Scalar> winding_raw(const VecC<Scalar>& vals,
                                 const VecC<Scalar>& ders, Scalar length,
                                 std::complex<Scalar> z) {
  const int m = static_cast<int>(vals.size());
  std::complex<Scalar> acc(0, 0);
  for (int k = 0; k < m; ++k) acc += ders[k] / (vals[k] - z);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  return acc * (length / Scalar(m)) / std::complex<Scalar>(0, two_pi);
}

/// Adaptive winding evaluation against a shared sampler. Returns nothing
/// when the defect cannot be brought under defect_tol (point too close to
/// the curve for the sample budget).
template <typename Scalar>
std::optional<WindingT<Scalar>> winding_adaptive(CurveSampler<Scalar>& curve,
                                                 std::complex<Scalar> z,
                                                 const WindingOptions& opt = {}) {
  std::complex<Scalar> prev(0, 0);
  bool have_prev = false;
  for (int level = 0; curve.count(level) <= opt.max_samples; ++level) {
    const std::complex<Scalar> raw =
        winding_raw(curve.values(level), curve.derivatives(level),
                    curve.length(), z);
    const Scalar rounded = std::round(raw.real());
    const Scalar defect = std::abs(raw - std::complex<Scalar>(rounded, 0));
    const bool settled =
        have_prev && std::abs(raw - prev) <= Scalar(0.25) * opt.defect_tol;
    if (defect <= Scalar(0.25) * opt.defect_tol && settled) {
      WindingT<Scalar> w;
      w.value = static_cast<int>(rounded);
      w.defect = defect;
      w.raw = raw;
      w.samples = curve.count(level);
      return w;
    }
    prev = raw;
    have_prev = true;
  }
  return std::nullopt;
}

template <typename Scalar>
WindingT<Scalar> winding_number(const BoundaryFunctionT<Scalar>& eta,
                                std::complex<Scalar> z,
                                const WindingOptions& opt = {}) {
  CurveSampler<Scalar> curve(eta, opt.min_samples);
  auto w = winding_adaptive(curve, z, opt);
  if (!w)
    throw WindingIllConditioned(
        "winding_number: integral does not settle on an integer");
  return *w;
}

/// Distance from z to the curve, measured against a fine polyline.
template <typename Scalar>
Scalar curve_distance(CurveSampler<Scalar>& curve, std::complex<Scalar> z,
                      int level = 4) {
  const VecC<Scalar>& v = curve.values(level);
  const int m = static_cast<int>(v.size());
  Scalar best = std::numeric_limits<Scalar>::max();
  for (int k = 0; k < m; ++k) {
    const std::complex<Scalar> a = v[k];
    const std::complex<Scalar> b = v[(k + 1) % m];
    const std::complex<Scalar> ab = b - a;
    const Scalar len2 = std::norm(ab);
    Scalar t = len2 > 0 ? ((z - a) * std::conj(ab)).real() / len2 : Scalar(0);
    t = std::clamp(t, Scalar(0), Scalar(1));
    best = std::min(best, std::abs(z - (a + t * ab)));
  }
  return best;
}

}  // namespace steklov

#pragma once

// Recovery of the conformal image region from boundary data alone. A
// candidate coordinate eta (a boundary trace of a holomorphic map) sends
// the boundary circle to a closed plane curve; the image of the surface is
// the set of points the curve winds around positively. This file rasterizes
// that winding field, extracts the region (area, boundary polyline, covering
// multiplicity), and evaluates other holomorphic traces at interior points
// by removing the pole of zeta / (eta - z) in least squares.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "steklov/kernel.hpp"
#include "steklov/upsilon.hpp"
#include "steklov/winding.hpp"

namespace steklov {

template <typename Scalar>
struct FieldBoxT {
  Scalar xlo = 0, xhi = 0, ylo = 0, yhi = 0;
};

using FieldBox = FieldBoxT<double>;

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Rasterized winding numbers of an image curve. Cells whose center lies
/// within 1.5 cell diagonals of the curve (or where the winding integral
/// does not settle) are masked; d is 0 there. Indexing is (iy, ix) with
/// ix along x.
template <typename Scalar>
struct WindingFieldT {
  FieldBoxT<Scalar> box;
  int nx = 0, ny = 0;
  Eigen::ArrayXXi d;
  MaskArray masked;

  Scalar dx() const { return (box.xhi - box.xlo) / Scalar(nx); }
  Scalar dy() const { return (box.yhi - box.ylo) / Scalar(ny); }
  Scalar cell_area() const { return dx() * dy(); }
  Scalar cell_diagonal() const { return std::hypot(dx(), dy()); }
  std::complex<Scalar> center(int ix, int iy) const {
    return {box.xlo + (Scalar(ix) + Scalar(0.5)) * dx(),
            box.ylo + (Scalar(iy) + Scalar(0.5)) * dy()};
  }
};

using WindingField = WindingFieldT<double>;

/// Winding field of eta over the given box at nx * ny cells. The curve is
/// first stamped onto the grid to mask a corridor of half-width 1.5 cell
/// diagonals; every unmasked center then gets an adaptively refined winding
/// number. Workers share nothing mutable (each gets its own sample ladder),
/// so the result is identical for any thread count.
template <typename Scalar>
WindingFieldT<Scalar> winding_field(const BoundaryFunctionT<Scalar>& eta,
                                    const FieldBoxT<Scalar>& box, int nx,
                                    int ny = -1, int threads = 1,
                                    const WindingOptions& opt = {}) {
  if (ny < 0) ny = nx;
  if (nx < 2 || ny < 2) throw Error("winding_field: resolution below 2");
  if (!(box.xhi > box.xlo) || !(box.yhi > box.ylo))
    throw Error("winding_field: empty box");

  WindingFieldT<Scalar> fd;
  fd.box = box;
  fd.nx = nx;
  fd.ny = ny;
  fd.d = Eigen::ArrayXXi::Zero(ny, nx);
  fd.masked = MaskArray::Constant(ny, nx, false);

  const Scalar dx = fd.dx(), dy = fd.dy();
  const Scalar radius = Scalar(1.5) * fd.cell_diagonal();

  // Corridor mask: stamp disks of the corridor radius around a dense curve
  // polyline. The sample spacing is far below the radius, so the stamped
  // set is a faithful corridor and not a string of beads.
  const int fine = next_pow2(std::max(4096, 8 * std::max(nx, ny)));
  const VecC<Scalar> pts = idft_centered<Scalar>(eta.coeff, fine);
  for (int k = 0; k < fine; ++k) {
    const Scalar px = pts[k].real(), py = pts[k].imag();
    const int ix0 = static_cast<int>(
        std::floor((px - radius - box.xlo) / dx - Scalar(0.5)));
    const int ix1 = static_cast<int>(
        std::ceil((px + radius - box.xlo) / dx - Scalar(0.5)));
    const int iy0 = static_cast<int>(
        std::floor((py - radius - box.ylo) / dy - Scalar(0.5)));
    const int iy1 = static_cast<int>(
        std::ceil((py + radius - box.ylo) / dy - Scalar(0.5)));
    for (int iy = std::max(iy0, 0); iy <= std::min(iy1, ny - 1); ++iy)
      for (int ix = std::max(ix0, 0); ix <= std::min(ix1, nx - 1); ++ix) {
        if (fd.masked(iy, ix)) continue;
        if (std::abs(fd.center(ix, iy) - pts[k]) < radius)
          fd.masked(iy, ix) = true;
      }
  }

  auto run_rows = [&fd, nx, &opt](int y0, int y1, CurveSampler<Scalar>& curve) {
    for (int iy = y0; iy < y1; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        if (fd.masked(iy, ix)) continue;
        const auto w = winding_adaptive(curve, fd.center(ix, iy), opt);
        if (w)
          fd.d(iy, ix) = w->value;
        else
          fd.masked(iy, ix) = true;
      }
  };

  const int nthreads = std::clamp(threads, 1, std::max(1, ny / 8));
  CurveSampler<Scalar> base(eta, opt.min_samples);
  if (nthreads == 1) {
    run_rows(0, ny, base);
  } else {
    std::vector<CurveSampler<Scalar>> samplers(nthreads, base);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      const int y0 = (ny * t) / nthreads;
      const int y1 = (ny * (t + 1)) / nthreads;
      pool.emplace_back(run_rows, y0, y1, std::ref(samplers[t]));
    }
    for (auto& th : pool) th.join();
  }
  return fd;
}

/// The positively wound part of a winding field, with its area and boundary.
/// Masked corridor cells straddle the true boundary symmetrically, so they
/// enter the area at half weight; the boundary polyline is the midline of
/// the corridor and stays within about one cell of the true curve.
template <typename Scalar>
struct RegionImageT {
  FieldBoxT<Scalar> box;
  int nx = 0, ny = 0;
  MaskArray positive;  // unmasked cells with d > 0
  Scalar area = 0;
  int positive_cells = 0;
  int boundary_cells = 0;    // masked corridor cells
  int multivalent_cells = 0; // unmasked cells with d >= 2
  int max_winding = 0;
  std::vector<std::vector<std::complex<Scalar>>> boundary;  // closed loops
};

using RegionImage = RegionImageT<double>;

namespace detail {

// Splits the masked corridor into an inner half (adjacent side wound
// positively) and an outer half by breadth-first distance through the mask.
// Ties go inner so the midline is never starved.
inline MaskArray corridor_inner(const MaskArray& masked,
                                const MaskArray& positive) {
  const int ny = static_cast<int>(masked.rows());
  const int nx = static_cast<int>(masked.cols());
  Eigen::ArrayXXi dpos = Eigen::ArrayXXi::Constant(ny, nx, -1);
  Eigen::ArrayXXi dneg = Eigen::ArrayXXi::Constant(ny, nx, -1);
  const int step_x[4] = {1, -1, 0, 0};
  const int step_y[4] = {0, 0, 1, -1};

  auto sweep = [&](Eigen::ArrayXXi& dist, bool from_positive) {
    std::deque<std::pair<int, int>> queue;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        if (!masked(iy, ix)) continue;
        bool seeded = false;
        for (int s = 0; s < 4 && !seeded; ++s) {
          const int jx = ix + step_x[s], jy = iy + step_y[s];
          if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) {
            // Outside the box counts as the non-positive side.
            seeded = !from_positive;
            continue;
          }
          if (masked(jy, jx)) continue;
          seeded = from_positive ? positive(jy, jx) : !positive(jy, jx);
        }
        if (seeded) {
          dist(iy, ix) = 0;
          queue.emplace_back(ix, iy);
        }
      }
    while (!queue.empty()) {
      const auto [ix, iy] = queue.front();
      queue.pop_front();
      for (int s = 0; s < 4; ++s) {
        const int jx = ix + step_x[s], jy = iy + step_y[s];
        if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
        if (!masked(jy, jx) || dist(jy, jx) >= 0) continue;
        dist(jy, jx) = dist(iy, ix) + 1;
        queue.emplace_back(jx, jy);
      }
    }
  };
  sweep(dpos, true);
  sweep(dneg, false);

  MaskArray inner = MaskArray::Constant(ny, nx, false);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (!masked(iy, ix) || dpos(iy, ix) < 0) continue;
      if (dneg(iy, ix) < 0 || dpos(iy, ix) <= dneg(iy, ix))
        inner(iy, ix) = true;
    }
  return inner;
}

}  // namespace detail

/// Extracts the positively wound region from a winding field. Throws
/// EmptyRegion when no unmasked cell has d > 0. The boundary polyline is a
/// marching-squares contour of the filled region (positive cells plus the
/// inner half of the corridor) against everything else, assembled into
/// closed loops in a deterministic order.
template <typename Scalar>
RegionImageT<Scalar> image_region(const WindingFieldT<Scalar>& fd) {
  const int nx = fd.nx, ny = fd.ny;
  RegionImageT<Scalar> region;
  region.box = fd.box;
  region.nx = nx;
  region.ny = ny;
  region.positive = MaskArray::Constant(ny, nx, false);

  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (fd.masked(iy, ix)) {
        ++region.boundary_cells;
        continue;
      }
      const int d = fd.d(iy, ix);
      if (d > 0) {
        region.positive(iy, ix) = true;
        ++region.positive_cells;
        if (d >= 2) ++region.multivalent_cells;
        region.max_winding = std::max(region.max_winding, d);
      }
    }
  if (region.positive_cells == 0)
    throw EmptyRegion("image_region: the curve winds around no grid cell");

  const Scalar ca = fd.cell_area();
  region.area = ca * (Scalar(region.positive_cells) +
                      Scalar(0.5) * Scalar(region.boundary_cells));

  // Filled indicator: positive cells plus the inner corridor half. Its
  // marching-squares contour is the corridor midline, i.e. the region
  // boundary up to one cell.
  const MaskArray inner = detail::corridor_inner(fd.masked, region.positive);
  auto filled = [&](int ix, int iy) -> bool {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return false;
    return region.positive(iy, ix) || (fd.masked(iy, ix) && inner(iy, ix));
  };

  // Edge vertices sit on midpoints between adjacent cell centers. Keys are
  // (kind, ix, iy) packed into one integer; kind 0 joins (ix,iy)-(ix+1,iy),
  // kind 1 joins (ix,iy)-(ix,iy+1).
  const std::int64_t stride = nx + 3;
  auto hkey = [&](int ix, int iy) {
    return (((std::int64_t(iy) + 1) * stride + (ix + 1)) << 1) | 0;
  };
  auto vkey = [&](int ix, int iy) {
    return (((std::int64_t(iy) + 1) * stride + (ix + 1)) << 1) | 1;
  };
  auto key_point = [&](std::int64_t key) -> std::complex<Scalar> {
    const int kind = static_cast<int>(key & 1);
    const std::int64_t cell = key >> 1;
    const int ix = static_cast<int>(cell % stride) - 1;
    const int iy = static_cast<int>(cell / stride) - 1;
    const Scalar dx = fd.dx(), dy = fd.dy();
    if (kind == 0)
      return {fd.box.xlo + Scalar(ix + 1) * dx,
              fd.box.ylo + (Scalar(iy) + Scalar(0.5)) * dy};
    return {fd.box.xlo + (Scalar(ix) + Scalar(0.5)) * dx,
            fd.box.ylo + Scalar(iy + 1) * dy};
  };

  std::map<std::int64_t, std::array<std::int64_t, 2>> adj;
  auto link = [&](std::int64_t u, std::int64_t v) {
    auto& eu = adj.try_emplace(u, std::array<std::int64_t, 2>{-1, -1})
                   .first->second;
    (eu[0] == -1 ? eu[0] : eu[1]) = v;
    auto& ev = adj.try_emplace(v, std::array<std::int64_t, 2>{-1, -1})
                   .first->second;
    (ev[0] == -1 ? ev[0] : ev[1]) = u;
  };

  for (int by = -1; by < ny; ++by)
    for (int bx = -1; bx < nx; ++bx) {
      const int m = (filled(bx, by) ? 1 : 0) | (filled(bx + 1, by) ? 2 : 0) |
                    (filled(bx + 1, by + 1) ? 4 : 0) |
                    (filled(bx, by + 1) ? 8 : 0);
      if (m == 0 || m == 15) continue;
      const std::int64_t B = hkey(bx, by), T = hkey(bx, by + 1);
      const std::int64_t L = vkey(bx, by), R = vkey(bx + 1, by);
      switch (m) {
        case 1: case 14: link(L, B); break;
        case 2: case 13: link(B, R); break;
        case 3: case 12: link(L, R); break;
        case 4: case 11: link(R, T); break;
        case 6: case 9: link(B, T); break;
        case 7: case 8: link(L, T); break;
        case 5: link(L, B); link(R, T); break;   // saddle, fixed split
        case 10: link(B, R); link(T, L); break;  // saddle, fixed split
        default: break;
      }
    }

  std::map<std::int64_t, bool> visited;
  for (const auto& [start, edges] : adj) {
    if (visited[start] || edges[1] == -1) continue;
    std::vector<std::complex<Scalar>> loop;
    std::int64_t prev = -1, cur = start;
    do {
      visited[cur] = true;
      loop.push_back(key_point(cur));
      const auto& e = adj[cur];
      const std::int64_t next = (e[0] == prev) ? e[1] : e[0];
      prev = cur;
      cur = next;
    } while (cur != start && cur != -1 && !visited[cur]);
    if (loop.size() >= 3) region.boundary.push_back(std::move(loop));
  }
  return region;
}

/// One interior evaluation of a holomorphic trace.
template <typename Scalar>
struct InteriorValueT {
  std::complex<Scalar> value{0, 0};
  Scalar residual = 0;
  bool determinate = false;
};

using InteriorValue = InteriorValueT<double>;

/// Evaluates the holomorphic extension of zeta at the point z of the eta
/// image: the scalar c minimizing || U_{eta,z} (zeta - c) || is the value,
/// because (zeta - c) / (eta - z) stays holomorphic exactly when c removes
/// the pole. Exterior points leave U_{eta,z} with no kernel direction, so
/// the quotient is meaningless there; that is reported as determinate =
/// false rather than an error. Throws OnBoundaryCurve when z sits on the
/// image curve and Error when zeta or eta is not close to the holomorphic
/// trace span described by kb.
template <typename Scalar>
InteriorValueT<Scalar> evaluate_interior(const BoundaryOperatorT<Scalar>& op,
                                         const KernelBasisT<Scalar>& kb,
                                         const BoundaryFunctionT<Scalar>& zeta,
                                         const BoundaryFunctionT<Scalar>& eta,
                                         std::complex<Scalar> z) {
  require_same_grid(op.grid, eta.grid, "evaluate_interior");
  require_same_grid(op.grid, zeta.grid, "evaluate_interior");
  require_same_grid(op.grid, kb.grid, "evaluate_interior");

  const auto ups = build_upsilon(op);
  const Scalar opn = operator_norm(ups);
  const Scalar member_tol =
      std::max(Scalar(1e-6) * opn, Scalar(10) * kb.tol);
  auto member_defect = [&](const BoundaryFunctionT<Scalar>& f) {
    const Scalar nf = std::max(norm(f), std::numeric_limits<Scalar>::min());
    return (ups.matrix * f.coeff).norm() / nf;
  };
  if (member_defect(zeta) > member_tol)
    throw Error("evaluate_interior: zeta is not a holomorphic trace");
  if (member_defect(eta) > member_tol)
    throw Error("evaluate_interior: eta is not a holomorphic trace");

  const auto uz = build_upsilon_eta_z(ups, eta, z);
  const Scalar uzn = operator_norm(uz);
  const VecC<Scalar> b = uz.matrix * basis_mode(op.grid, 0).coeff;
  const VecC<Scalar> a = uz.matrix * zeta.coeff;

  InteriorValueT<Scalar> out;
  out.determinate =
      b.norm() >= Scalar(1e-6) * std::max(uzn, std::numeric_limits<Scalar>::min());
  if (!out.determinate) return out;

  out.value = b.dot(a) / b.squaredNorm();
  const Scalar scale =
      std::max({a.norm(), b.norm(), Scalar(1e-12) * uzn});
  out.residual = (a - out.value * b).norm() / scale;
  return out;
}

template <typename Scalar>
struct InteriorSampleT {
  std::complex<Scalar> z{0, 0};
  std::vector<std::complex<Scalar>> values;
  std::vector<Scalar> residuals;
  bool determinate = true;
};

using InteriorSample = InteriorSampleT<double>;

template <typename Scalar>
struct ReconstructConfigT {
  int resolution = 256;
  Scalar margin = Scalar(0.15);  // box padding, fraction of curve extent
  int threads = 1;
  Scalar rank_rel = Scalar(-1);     // kernel extraction knobs, as in checks
  Scalar kernel_floor = Scalar(0);
  Scalar kernel_gap = Scalar(-1);
  int interior_samples = 5;
  std::optional<BoundaryFunctionT<Scalar>> coordinate;  // skip the scan
  WindingOptions winding;
};

using ReconstructConfig = ReconstructConfigT<double>;

template <typename Scalar>
struct ReconstructResultT {
  BoundaryFunctionT<Scalar> coordinate;
  int coordinate_index = -1;  // kernel column; -1 when forced by config
  int degree = 0;             // winding of the image curve about its seed
  bool orientation_normalized = false;
  WindingFieldT<Scalar> field;
  RegionImageT<Scalar> region;
  std::vector<int> sample_functions;  // kernel column per sample value
  std::vector<InteriorSampleT<Scalar>> samples;
};

using ReconstructResult = ReconstructResultT<double>;

namespace detail {

// Degree of the image curve about its own interior, probed at the centroid
// and a few fixed offsets. nullopt when no probe point settles.
template <typename Scalar>
std::optional<int> probe_degree(CurveSampler<Scalar>& curve,
                                const WindingOptions& opt) {
  const VecC<Scalar>& pts = curve.values(0);
  std::complex<Scalar> lo = pts[0], hi = pts[0];
  std::complex<Scalar> centroid(0, 0);
  for (int k = 0; k < pts.size(); ++k) {
    const auto p = pts[k];
    lo = {std::min(lo.real(), p.real()), std::min(lo.imag(), p.imag())};
    hi = {std::max(hi.real(), p.real()), std::max(hi.imag(), p.imag())};
    centroid += p;
  }
  centroid /= Scalar(pts.size());
  const Scalar w = hi.real() - lo.real(), h = hi.imag() - lo.imag();
  const Scalar extent = std::max(w, h);
  if (!(extent > 0)) return std::nullopt;

  const std::array<std::complex<Scalar>, 7> offsets = {
      std::complex<Scalar>(0, 0),       std::complex<Scalar>(0.12, 0),
      std::complex<Scalar>(-0.12, 0),   std::complex<Scalar>(0, 0.12),
      std::complex<Scalar>(0, -0.12),   std::complex<Scalar>(0.2, 0.2),
      std::complex<Scalar>(-0.2, -0.2)};
  for (const auto& off : offsets) {
    const std::complex<Scalar> probe =
        centroid + std::complex<Scalar>(off.real() * w, off.imag() * h);
    if (curve_distance(curve, probe, 3) < Scalar(0.02) * extent) continue;
    if (const auto wd = winding_adaptive(curve, probe, opt)) return wd->value;
  }
  return std::nullopt;
}

template <typename Scalar>
FieldBoxT<Scalar> padded_bbox(CurveSampler<Scalar>& curve, Scalar margin) {
  const VecC<Scalar>& pts = curve.values(2);
  FieldBoxT<Scalar> box{pts[0].real(), pts[0].real(), pts[0].imag(),
                        pts[0].imag()};
  for (int k = 0; k < pts.size(); ++k) {
    box.xlo = std::min(box.xlo, pts[k].real());
    box.xhi = std::max(box.xhi, pts[k].real());
    box.ylo = std::min(box.ylo, pts[k].imag());
    box.yhi = std::max(box.yhi, pts[k].imag());
  }
  const Scalar extent = std::max(box.xhi - box.xlo, box.yhi - box.ylo);
  // A constant curve has no extent; give it a unit-scale box so the caller
  // reaches EmptyRegion instead of a degenerate-box error.
  const Scalar center_mag = std::hypot((box.xlo + box.xhi) / 2,
                                       (box.ylo + box.yhi) / 2);
  const Scalar pad = extent > 0 ? margin * extent
                                : Scalar(0.5) * std::max(Scalar(1), center_mag);
  box.xlo -= pad;
  box.xhi += pad;
  box.ylo -= pad;
  box.yhi += pad;
  return box;
}

}  // namespace detail

/// Full image recovery from a boundary operator: extract the holomorphic
/// trace kernel, pick a coordinate whose image curve winds once around its
/// interior (smoothest first; a forced config.coordinate skips the scan),
/// rasterize the winding field, cut out the region, and cross-check by
/// evaluating a few other kernel elements at interior points. Throws
/// NoUnivalentCandidate when no kernel element yields a settled positive
/// winding and EmptyRegion when the chosen curve bounds no cells.
template <typename Scalar>
ReconstructResultT<Scalar> reconstruct(const BoundaryOperatorT<Scalar>& op,
                                       const ReconstructConfigT<Scalar>& cfg = {}) {
  BoundaryOperatorT<Scalar> work = op;
  ReconstructResultT<Scalar> out;
  if (op.orientation < 0) {
    work = reverse_orientation(op);
    out.orientation_normalized = true;
  }

  const auto ups = build_upsilon(work);
  RankPolicy policy;
  if (cfg.rank_rel > 0) policy.rel_tol = static_cast<double>(cfg.rank_rel);
  if (cfg.kernel_floor > 0)
    policy.abs_floor = static_cast<double>(cfg.kernel_floor);
  if (cfg.kernel_gap > 0) policy.gap_factor = static_cast<double>(cfg.kernel_gap);
  const auto kb = kernel_basis(ups, policy);

  const auto e0 = basis_mode(work.grid, 0);
  auto nonconstant = [&](const BoundaryFunctionT<Scalar>& f) {
    return norm(f - mean(f) * e0) >= Scalar(0.1) * norm(f);
  };

  int fallback = -1, fallback_degree = 0;
  bool chosen = false;
  if (cfg.coordinate) {
    require_same_grid(work.grid, cfg.coordinate->grid, "reconstruct");
    out.coordinate = *cfg.coordinate;
    out.coordinate_index = -1;
    CurveSampler<Scalar> curve(out.coordinate, cfg.winding.min_samples);
    const auto deg = detail::probe_degree(curve, cfg.winding);
    out.degree = deg.value_or(0);
    chosen = true;
  } else {
    for (int c = 0; c < kb.dim() && !chosen; ++c) {
      const auto f = kb.function(c);
      if (!nonconstant(f)) continue;
      CurveSampler<Scalar> curve(f, cfg.winding.min_samples);
      const auto deg = detail::probe_degree(curve, cfg.winding);
      if (!deg || *deg < 1) continue;
      if (*deg == 1) {
        out.coordinate = f;
        out.coordinate_index = c;
        out.degree = 1;
        chosen = true;
      } else if (fallback < 0) {
        fallback = c;
        fallback_degree = *deg;
      }
    }
    if (!chosen && fallback >= 0) {
      out.coordinate = kb.function(fallback);
      out.coordinate_index = fallback;
      out.degree = fallback_degree;
      chosen = true;
    }
    if (!chosen)
      throw NoUnivalentCandidate(
          "reconstruct: no kernel element winds positively around its image");
  }

  CurveSampler<Scalar> curve(out.coordinate, cfg.winding.min_samples);
  const auto box = detail::padded_bbox(curve, cfg.margin);
  out.field = winding_field(out.coordinate, box, cfg.resolution,
                            cfg.resolution, cfg.threads, cfg.winding);
  out.region = image_region(out.field);

  // Cross-checks: evaluate the coordinate itself (value should reproduce
  // the cell center) and up to two further kernel elements at a spread of
  // univalently covered cells.
  out.sample_functions.push_back(out.coordinate_index);
  for (int c = 0; c < kb.dim() &&
                  static_cast<int>(out.sample_functions.size()) < 3;
       ++c) {
    if (c == out.coordinate_index) continue;
    if (!nonconstant(kb.function(c))) continue;
    out.sample_functions.push_back(c);
  }

  std::vector<std::complex<Scalar>> centers;
  for (int iy = 0; iy < out.field.ny; ++iy)
    for (int ix = 0; ix < out.field.nx; ++ix)
      if (!out.field.masked(iy, ix) && out.field.d(iy, ix) == 1)
        centers.push_back(out.field.center(ix, iy));
  const int want = std::min<int>(cfg.interior_samples,
                                 static_cast<int>(centers.size()));
  for (int i = 0; i < want; ++i) {
    const std::size_t idx =
        want == 1 ? centers.size() / 2
                  : (static_cast<std::size_t>(i) * (centers.size() - 1)) /
                        (want - 1);
    InteriorSampleT<Scalar> sample;
    sample.z = centers[idx];
    for (const int c : out.sample_functions) {
      const auto f = c < 0 ? out.coordinate : kb.function(c);
      const auto val = evaluate_interior(work, kb, f, out.coordinate, sample.z);
      sample.values.push_back(val.value);
      sample.residuals.push_back(val.residual);
      sample.determinate = sample.determinate && val.determinate;
    }
    out.samples.push_back(std::move(sample));
  }
  return out;
}

}  // namespace steklov

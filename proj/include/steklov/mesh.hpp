#pragma once

// Triangulated surfaces with one boundary circle, plus the two reference
// generators used throughout: a structured disk mesh and a torus with a
// cap removed. Faces are consistently oriented; the boundary loop is read
// off in the orientation induced by the faces.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

struct SurfaceMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 3> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> faces;
  Eigen::VectorXd conformal_factor;  // per vertex; empty means identically 1

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }
};

namespace detail {

inline std::int64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::int64_t>(b);
}

}  // namespace detail

/// All boundary loops, each a cyclic vertex list following the orientation
/// induced by the faces (a boundary edge keeps the direction it has in its
/// unique incident face).
inline std::vector<std::vector<int>> boundary_loops(const SurfaceMesh& mesh) {
  std::map<std::int64_t, int> count;
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int e = 0; e < 3; ++e)
      count[detail::edge_key(mesh.faces(f, e), mesh.faces(f, (e + 1) % 3))]++;

  std::map<int, int> next;  // directed boundary edge a -> b
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.faces(f, e), b = mesh.faces(f, (e + 1) % 3);
      if (count[detail::edge_key(a, b)] == 1) {
        if (next.count(a))
          throw DegenerateMesh("boundary_loops: boundary is not a 1-manifold");
        next[a] = b;
      }
    }

  std::vector<std::vector<int>> loops;
  std::map<int, bool> used;
  for (const auto& [start, unused_b] : next) {
    if (used[start]) continue;
    std::vector<int> loop;
    int v = start;
    do {
      loop.push_back(v);
      used[v] = true;
      auto it = next.find(v);
      if (it == next.end())
        throw DegenerateMesh("boundary_loops: boundary walk left the loop");
      v = it->second;
    } while (v != start);
    loops.push_back(std::move(loop));
  }
  return loops;
}

inline int euler_characteristic(const SurfaceMesh& mesh) {
  std::map<std::int64_t, int> edges;
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int e = 0; e < 3; ++e)
      edges[detail::edge_key(mesh.faces(f, e), mesh.faces(f, (e + 1) % 3))] = 1;
  return mesh.vertex_count() - static_cast<int>(edges.size()) +
         mesh.face_count();
}

/// Structural checks: manifold edges, positive triangle areas, positive
/// conformal factor, and (by default) exactly one boundary loop.
inline void validate(const SurfaceMesh& mesh, bool require_single_loop = true) {
  if (mesh.vertex_count() < 3 || mesh.face_count() < 1)
    throw DegenerateMesh("validate: empty mesh");

  double scale = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    scale = std::max(scale, mesh.vertices.row(v).norm());

  std::map<std::int64_t, int> count;
  std::vector<char> referenced(mesh.vertex_count(), 0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.faces(f, e);
      if (a < 0 || a >= mesh.vertex_count())
        throw DegenerateMesh("validate: face index out of range");
      referenced[a] = 1;
      count[detail::edge_key(a, mesh.faces(f, (e + 1) % 3))]++;
    }
    Eigen::Vector3d p0 = mesh.vertices.row(mesh.faces(f, 0));
    Eigen::Vector3d p1 = mesh.vertices.row(mesh.faces(f, 1));
    Eigen::Vector3d p2 = mesh.vertices.row(mesh.faces(f, 2));
    const double area2 = (p1 - p0).cross(p2 - p0).norm();
    if (!(area2 > 1e-14 * scale * scale))
      throw DegenerateMesh("validate: degenerate triangle");
  }
  for (const auto& [k, c] : count)
    if (c > 2) throw DegenerateMesh("validate: nonmanifold edge");
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!referenced[v]) throw DegenerateMesh("validate: isolated vertex");

  if (mesh.conformal_factor.size() != 0) {
    if (mesh.conformal_factor.size() != mesh.vertex_count())
      throw DegenerateMesh("validate: conformal factor size mismatch");
    if ((mesh.conformal_factor.array() <= 0).any())
      throw DegenerateMesh("validate: conformal factor must be positive");
  }

  if (require_single_loop) {
    auto loops = boundary_loops(mesh);
    if (loops.size() != 1)
      throw DegenerateMesh("validate: expected exactly one boundary loop, got " +
                           std::to_string(loops.size()));
    if (loops[0].size() < 8)
      throw DegenerateMesh("validate: boundary loop too short");
  }
}

/// Structured unit-disk mesh with target edge length h. Rings of radius
/// j/m carry vertices at uniform angles; the boundary ring is uniform in
/// arclength. Faces are counterclockwise in the plane.
inline SurfaceMesh mesh_disk(double h) {
  if (!(h > 0) || h > 0.7) throw DegenerateMesh("mesh_disk: edge length out of range");
  const double two_pi = 2 * std::numbers::pi;
  const int m = std::max(2, static_cast<int>(std::llround(1.0 / h)));

  std::vector<Eigen::Vector3d> verts;
  std::vector<int> ring_start(m + 1), ring_count(m + 1);
  verts.emplace_back(0, 0, 0);  // center
  ring_start[0] = 0;
  ring_count[0] = 1;
  for (int j = 1; j <= m; ++j) {
    const double r = static_cast<double>(j) / m;
    const int n = std::max(6, static_cast<int>(std::llround(two_pi * r / h)));
    ring_start[j] = static_cast<int>(verts.size());
    ring_count[j] = n;
    for (int t = 0; t < n; ++t) {
      const double a = two_pi * t / n;
      verts.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
    }
  }

  std::vector<Eigen::Vector3i> tris;
  for (int t = 0; t < ring_count[1]; ++t)  // center fan
    tris.emplace_back(0, ring_start[1] + t,
                      ring_start[1] + (t + 1) % ring_count[1]);
  for (int j = 1; j < m; ++j) {
    const int nu = ring_count[j], nv = ring_count[j + 1];
    const int su = ring_start[j], sv = ring_start[j + 1];
    int i = 0, k = 0;  // advancing by angle between the two rings
    while (i < nu || k < nv) {
      const double next_u = two_pi * (i + 1) / nu;
      const double next_v = two_pi * (k + 1) / nv;
      if (i < nu && (k >= nv || next_u <= next_v)) {
        tris.emplace_back(su + i % nu, sv + k % nv, su + (i + 1) % nu);
        ++i;
      } else {
        tris.emplace_back(su + i % nu, sv + k % nv, sv + (k + 1) % nv);
        ++k;
      }
    }
  }

  SurfaceMesh mesh;
  mesh.vertices.resize(verts.size(), 3);
  for (size_t v = 0; v < verts.size(); ++v) mesh.vertices.row(v) = verts[v];
  mesh.faces.resize(tris.size(), 3);
  for (size_t f = 0; f < tris.size(); ++f) mesh.faces.row(f) = tris[f];
  validate(mesh);
  return mesh;
}

namespace detail {

inline Eigen::Vector3d torus_point(double R, double r, double u, double v) {
  return {(R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u),
          r * std::sin(v)};
}

inline double wrap_angle(double a) {
  const double two_pi = 2 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a > std::numbers::pi) a -= two_pi;
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

}  // namespace detail

/// Torus of radii (R, r) with a round cap removed around the outer equator
/// point (u,v) = (0,0). The cap is the disk of radius cap_radius (default
/// 1.2 r) in the chart q = ((R+r) u, r v), so its rim is a fixed smooth
/// curve independent of the resolution: grid vertices near the rim are
/// snapped onto it and everything inside is dropped. Euler characteristic
/// -1 (one handle, one boundary circle).
inline SurfaceMesh mesh_torus_minus_cap(double R, double r, double h,
                                        double cap_radius = -1) {
  if (!(0 < r && r < R)) throw DegenerateMesh("mesh_torus_minus_cap: need 0 < r < R");
  if (!(h > 0) || h > 0.8 * r)
    throw DegenerateMesh("mesh_torus_minus_cap: edge length out of range");
  if (cap_radius <= 0) cap_radius = 1.2 * r;
  if (cap_radius < 3 * h)
    throw DegenerateMesh("mesh_torus_minus_cap: cap too small for this resolution");
  if (cap_radius > 0.9 * std::numbers::pi * r)
    throw DegenerateMesh("mesh_torus_minus_cap: cap wraps around the tube");
  const double two_pi = 2 * std::numbers::pi;
  const int nu = std::max(8, static_cast<int>(std::llround(two_pi * (R + r) / h)));
  const int nv = std::max(8, static_cast<int>(std::llround(two_pi * r / h)));

  // Signed chart distance to the rim circle, per grid vertex.
  const auto total = static_cast<size_t>(nu) * nv;
  std::vector<double> dist(total);
  for (int iu = 0; iu < nu; ++iu)
    for (int iv = 0; iv < nv; ++iv) {
      const double qu = (R + r) * detail::wrap_angle(two_pi * iu / nu);
      const double qv = r * detail::wrap_angle(two_pi * iv / nv);
      dist[iu * nv + iv] = std::hypot(qu, qv) - cap_radius;
    }

  // Classify: inside the cap, in the snap band, or kept as is.
  const double band = 0.35 * h;
  enum : char { kInside, kSnap, kKeep };
  std::vector<char> status(total);
  for (size_t i = 0; i < total; ++i)
    status[i] = dist[i] < -band ? kInside : (dist[i] <= band ? kSnap : kKeep);

  // Long diagonal edges can jump the band; pull their outside ends in too,
  // so every boundary edge of the cut ends up on the rim circle.
  auto id = [&](int iu, int iv) {
    return ((iu % nu + nu) % nu) * nv + ((iv % nv + nv) % nv);
  };
  std::vector<char> forced(total, 0);
  for (int iu = 0; iu < nu; ++iu)
    for (int iv = 0; iv < nv; ++iv) {
      const int a = id(iu, iv);
      for (auto [du, dv] : {std::pair{1, 0}, {0, 1}, {1, 1}}) {
        const int b = id(iu + du, iv + dv);
        if (status[a] == kKeep && status[b] == kInside) forced[a] = 1;
        if (status[b] == kKeep && status[a] == kInside) forced[b] = 1;
      }
    }
  for (size_t i = 0; i < total; ++i)
    if (forced[i]) status[i] = kSnap;

  Eigen::Matrix<double, Eigen::Dynamic, 3> grid(total, 3);
  for (int iu = 0; iu < nu; ++iu)
    for (int iv = 0; iv < nv; ++iv) {
      const size_t i = iu * nv + iv;
      double u = two_pi * iu / nu, v = two_pi * iv / nv;
      if (status[i] == kSnap) {
        const double qu = (R + r) * detail::wrap_angle(u);
        const double qv = r * detail::wrap_angle(v);
        const double scale = cap_radius / std::hypot(qu, qv);
        u = qu * scale / (R + r);
        v = qv * scale / r;
      }
      grid.row(i) = detail::torus_point(R, r, u, v);
    }

  std::vector<Eigen::Vector3i> tris;
  for (int iu = 0; iu < nu; ++iu)
    for (int iv = 0; iv < nv; ++iv) {
      const int a = id(iu, iv), b = id(iu + 1, iv), c = id(iu + 1, iv + 1),
                d = id(iu, iv + 1);
      if (status[a] != kInside && status[b] != kInside && status[c] != kInside)
        tris.emplace_back(a, b, c);
      if (status[a] != kInside && status[c] != kInside && status[d] != kInside)
        tris.emplace_back(a, c, d);
    }
  if (tris.empty()) throw DegenerateMesh("mesh_torus_minus_cap: cap removed everything");

  // Compact vertex numbering.
  std::vector<int> remap(total, -1);
  std::vector<int> back;
  for (auto& t : tris)
    for (int e = 0; e < 3; ++e) {
      int& v = t[e];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(back.size());
        back.push_back(v);
      }
      v = remap[v];
    }

  SurfaceMesh mesh;
  mesh.vertices.resize(back.size(), 3);
  for (size_t v = 0; v < back.size(); ++v) mesh.vertices.row(v) = grid.row(back[v]);
  mesh.faces.resize(tris.size(), 3);
  for (size_t f = 0; f < tris.size(); ++f) mesh.faces.row(f) = tris[f];

  for (int f = 0; f < mesh.face_count(); ++f)
    for (int e = 0; e < 3; ++e) {
      const Eigen::Vector3d a = mesh.vertices.row(mesh.faces(f, e));
      const Eigen::Vector3d b = mesh.vertices.row(mesh.faces(f, (e + 1) % 3));
      if ((a - b).norm() < 1e-8 * r)
        throw DegenerateMesh(
            "mesh_torus_minus_cap: snapping collapsed an edge; adjust h");
    }

  auto loops = boundary_loops(mesh);
  if (loops.size() != 1)
    throw DegenerateMesh(
        "mesh_torus_minus_cap: cap removal left " + std::to_string(loops.size()) +
        " boundary loops; refine h or enlarge the cap");
  if (loops[0].size() < 16)
    throw DegenerateMesh("mesh_torus_minus_cap: boundary under-resolved; refine h");

  validate(mesh);
  if (euler_characteristic(mesh) != -1)
    throw DegenerateMesh("mesh_torus_minus_cap: cap removal changed topology; adjust h");
  return mesh;
}

// ---- OFF input/output ------------------------------------------------------

inline SurfaceMesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_off: cannot open " + path);
  auto next_token_line = [&](std::istringstream& line) {
    std::string raw;
    while (std::getline(in, raw)) {
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      line = std::istringstream(raw);
      return true;
    }
    return false;
  };
  std::istringstream line;
  if (!next_token_line(line)) throw Error("read_off: empty file " + path);
  std::string magic;
  line >> magic;
  if (magic != "OFF") throw Error("read_off: missing OFF header in " + path);
  if (!next_token_line(line)) throw Error("read_off: missing counts in " + path);
  long nv = 0, nf = 0, ne = 0;
  line >> nv >> nf >> ne;
  if (nv <= 0 || nf <= 0) throw Error("read_off: bad counts in " + path);

  SurfaceMesh mesh;
  mesh.vertices.resize(nv, 3);
  for (long v = 0; v < nv; ++v) {
    if (!next_token_line(line)) throw Error("read_off: truncated vertices");
    line >> mesh.vertices(v, 0) >> mesh.vertices(v, 1) >> mesh.vertices(v, 2);
    if (line.fail()) throw Error("read_off: bad vertex line");
  }
  mesh.faces.resize(nf, 3);
  for (long f = 0; f < nf; ++f) {
    if (!next_token_line(line)) throw Error("read_off: truncated faces");
    int deg = 0;
    line >> deg;
    if (deg != 3) throw Error("read_off: only triangle faces are supported");
    line >> mesh.faces(f, 0) >> mesh.faces(f, 1) >> mesh.faces(f, 2);
    if (line.fail()) throw Error("read_off: bad face line");
  }
  return mesh;
}

inline void write_off(const std::string& path, const SurfaceMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("write_off: cannot open " + path);
  out.precision(17);
  out << "OFF\n" << mesh.vertex_count() << " " << mesh.face_count() << " 0\n";
  for (int v = 0; v < mesh.vertex_count(); ++v)
    out << mesh.vertices(v, 0) << " " << mesh.vertices(v, 1) << " "
        << mesh.vertices(v, 2) << "\n";
  for (int f = 0; f < mesh.face_count(); ++f)
    out << "3 " << mesh.faces(f, 0) << " " << mesh.faces(f, 1) << " "
        << mesh.faces(f, 2) << "\n";
  if (!out) throw Error("write_off: write failed for " + path);
}

}  // namespace steklov

#pragma once

// Persistence for boundary functions, operators, and result types, plus CSV
// and SVG emission for reconstructed regions. All JSON goes through ordered
// maps with a fixed field layout, so a given input yields byte-identical
// output. Files are written to a temporary sibling and renamed into place.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steklov/boundary_operator.hpp"
#include "steklov/characterization.hpp"
#include "steklov/reconstruction.hpp"
#include "steklov/topology.hpp"

namespace steklov {

using ordered_json = nlohmann::ordered_json;

inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_text_atomic: cannot open " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write_text_atomic: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string dump_json(const ordered_json& j, int indent = 2) {
  std::string s = indent >= 0 ? j.dump(indent) : j.dump();
  s.push_back('\n');
  return s;
}

// --- boundary functions ----------------------------------------------------

inline ordered_json to_json(const BoundaryFunction& f) {
  ordered_json j;
  j["length"] = f.grid.length;
  j["modes"] = f.grid.modes;
  ordered_json coeffs = ordered_json::array();
  for (int i = 0; i < f.coeff.size(); ++i)
    coeffs.push_back({f.coeff[i].real(), f.coeff[i].imag()});
  j["coeffs"] = std::move(coeffs);
  return j;
}

inline BoundaryFunction boundary_function_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("length") || !j.contains("modes") ||
      !j.contains("coeffs") || !j["coeffs"].is_array())
    throw Error("boundary function JSON needs length, modes, coeffs");
  GridSpec grid{j["modes"].get<int>(), j["length"].get<double>()};
  if (!grid.valid()) throw Error("boundary function JSON: invalid grid");
  const auto& coeffs = j["coeffs"];
  if (static_cast<int>(coeffs.size()) != grid.samples())
    throw Error("boundary function JSON: coefficient count mismatch");
  VecC<double> c(grid.samples());
  for (int i = 0; i < grid.samples(); ++i) {
    const auto& pair = coeffs[i];
    if (!pair.is_array() || pair.size() != 2)
      throw Error("boundary function JSON: coefficients must be [re, im]");
    c[i] = {pair[0].get<double>(), pair[1].get<double>()};
  }
  return from_coeffs(grid, c);
}

// --- operators ---------------------------------------------------------

/// Operators up to this truncation order keep their matrix inline in the
/// JSON; larger ones move it to a little-endian float64 binary sidecar
/// (interleaved re/im, row-major) referenced by filename.
inline constexpr int kInlineMatrixModes = 64;

inline void save_operator(const BoundaryOperator& op,
                          const std::filesystem::path& path, int indent = 2) {
  ordered_json j;
  j["grid"] = {{"modes", op.grid.modes}, {"length", op.grid.length}};
  j["orientation"] = op.orientation;
  const int w = op.grid.samples();
  if (op.grid.modes <= kInlineMatrixModes) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < w; ++r) {
      ordered_json row = ordered_json::array();
      for (int c = 0; c < w; ++c)
        row.push_back({op.matrix(r, c).real(), op.matrix(r, c).imag()});
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  } else {
    std::filesystem::path bin = path;
    bin.replace_extension(".bin");
    std::string raw(static_cast<std::size_t>(w) * w * 16, '\0');
    double* out = reinterpret_cast<double*>(raw.data());
    for (int r = 0; r < w; ++r)
      for (int c = 0; c < w; ++c) {
        *out++ = op.matrix(r, c).real();
        *out++ = op.matrix(r, c).imag();
      }
    write_text_atomic(bin, raw);
    j["matrix_file"] = bin.filename().string();
  }
  write_text_atomic(path, dump_json(j, indent));
}

inline BoundaryOperator load_operator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_operator: cannot open " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw Error("load_operator: " + path.string() + " is not valid JSON: " +
                e.what());
  }
  if (!j.is_object() || !j.contains("grid") || !j.contains("orientation"))
    throw Error("load_operator: missing grid or orientation in " +
                path.string());
  const auto& jg = j["grid"];
  if (!jg.contains("modes") || !jg.contains("length"))
    throw Error("load_operator: grid needs modes and length");
  GridSpec grid{jg["modes"].get<int>(), jg["length"].get<double>()};
  if (!grid.valid()) throw Error("load_operator: invalid grid");
  const int w = grid.samples();
  MatC<double> m(w, w);

  if (j.contains("matrix")) {
    const auto& rows = j["matrix"];
    if (static_cast<int>(rows.size()) != w)
      throw Error("load_operator: matrix row count mismatch");
    for (int r = 0; r < w; ++r) {
      const auto& row = rows[r];
      if (static_cast<int>(row.size()) != w)
        throw Error("load_operator: matrix column count mismatch");
      for (int c = 0; c < w; ++c) {
        const auto& pair = row[c];
        if (!pair.is_array() || pair.size() != 2)
          throw Error("load_operator: matrix entries must be [re, im]");
        m(r, c) = {pair[0].get<double>(), pair[1].get<double>()};
      }
    }
  } else if (j.contains("matrix_file")) {
    const std::filesystem::path bin =
        path.parent_path() / j["matrix_file"].get<std::string>();
    std::ifstream raw(bin, std::ios::binary);
    if (!raw) throw Error("load_operator: cannot open sidecar " + bin.string());
    std::vector<double> buf(static_cast<std::size_t>(w) * w * 2);
    raw.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (raw.gcount() !=
        static_cast<std::streamsize>(buf.size() * sizeof(double)))
      throw Error("load_operator: sidecar " + bin.string() + " is too short");
    const double* p = buf.data();
    for (int r = 0; r < w; ++r)
      for (int c = 0; c < w; ++c) {
        m(r, c) = {p[0], p[1]};
        p += 2;
      }
  } else {
    throw Error("load_operator: neither matrix nor matrix_file present");
  }
  return make_operator(grid, m, j["orientation"].get<int>());
}

// --- reports -----------------------------------------------------------

inline ordered_json to_json(const ConditionRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["status"] = to_string(r.status);
  j["residual"] = r.residual;
  j["tol"] = r.tol;
  if (!r.witness.empty()) j["witness"] = r.witness;
  ordered_json metrics;
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  j["metrics"] = std::move(metrics);
  return j;
}

inline ordered_json to_json(const CharacterizationReport& rep) {
  ordered_json j;
  j["verdict"] = rep.verdict;
  j["tol"] = rep.tol;
  j["seed"] = rep.seed;
  j["orientation_normalized"] = rep.orientation_normalized;
  j["kernel"] = {{"dim", rep.kernel_dim},
                 {"gap", rep.kernel_gap},
                 {"tol", rep.kernel_tol}};
  ordered_json conditions = ordered_json::array();
  for (const auto& c : rep.conditions) conditions.push_back(to_json(c));
  j["conditions"] = std::move(conditions);
  return j;
}

inline ordered_json to_json(const TopologyResult& t) {
  ordered_json j;
  j["r"] = t.handle_rank;
  j["chi"] = t.euler_characteristic;
  j["genus"] = t.genus;
  j["gap_ratio"] = t.gap;
  return j;
}

// --- region emission -----------------------------------------------------

/// CSV of the winding field: one row per unmasked cell center. Masked
/// corridor cells carry no settled winding value and are omitted.
inline void write_region_csv(const std::filesystem::path& path,
                             const WindingField& fd) {
  std::ostringstream out;
  out << "x,y,d\n";
  out.precision(17);
  for (int iy = 0; iy < fd.ny; ++iy)
    for (int ix = 0; ix < fd.nx; ++ix) {
      if (fd.masked(iy, ix)) continue;
      const auto z = fd.center(ix, iy);
      out << z.real() << ',' << z.imag() << ',' << fd.d(iy, ix) << '\n';
    }
  write_text_atomic(path, out.str());
}

/// Static SVG of the region: filled row runs of positively wound cells,
/// the corridor midline loops, and the image curve itself.
inline void write_region_svg(const std::filesystem::path& path,
                             const BoundaryFunction& eta,
                             const WindingField& fd,
                             const RegionImage& region) {
  const double w = fd.box.xhi - fd.box.xlo, h = fd.box.yhi - fd.box.ylo;
  std::ostringstream out;
  out.precision(8);
  // Flip y so the mathematical orientation survives screen coordinates.
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"640\" viewBox=\"" << fd.box.xlo << ' ' << -fd.box.yhi
      << ' ' << w << ' ' << h << "\">\n";
  out << "<g transform=\"scale(1,-1)\">\n";

  const double dx = fd.dx(), dy = fd.dy();
  out << "<g fill=\"#9ecae1\" stroke=\"none\">\n";
  for (int iy = 0; iy < fd.ny; ++iy) {
    int run = -1;
    for (int ix = 0; ix <= fd.nx; ++ix) {
      const bool on = ix < fd.nx && region.positive(iy, ix);
      if (on && run < 0) run = ix;
      if (!on && run >= 0) {
        out << "<rect x=\"" << fd.box.xlo + run * dx << "\" y=\""
            << fd.box.ylo + iy * dy << "\" width=\"" << (ix - run) * dx
            << "\" height=\"" << dy << "\"/>\n";
        run = -1;
      }
    }
  }
  out << "</g>\n";

  const double stroke = 0.004 * std::max(w, h);
  out << "<g fill=\"none\" stroke=\"#2b5f8a\" stroke-width=\"" << stroke
      << "\">\n";
  for (const auto& loop : region.boundary) {
    out << "<path d=\"M";
    for (const auto& p : loop) out << ' ' << p.real() << ' ' << p.imag();
    out << " Z\"/>\n";
  }
  out << "</g>\n";

  const VecC<double> pts = idft_centered<double>(eta.coeff, 1024);
  out << "<path fill=\"none\" stroke=\"#000000\" stroke-width=\"" << stroke
      << "\" d=\"M";
  for (int k = 0; k < pts.size(); ++k)
    out << ' ' << pts[k].real() << ' ' << pts[k].imag();
  out << " Z\"/>\n";
  out << "</g>\n</svg>\n";
  write_text_atomic(path, out.str());
}

}  // namespace steklov

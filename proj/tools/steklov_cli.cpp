// Command-line front end: solve a forward Dirichlet-to-Neumann problem,
// check the holomorphic-algebra characterization of a boundary operator,
// extract the topology it encodes, or reconstruct the conformal image
// region. Exit codes: 0 success (check: all conditions pass), 1 check
// failure, 2 check uncertainty, 64 usage, 65 unreadable or malformed
// input, 70 numerical failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <steklov/fem.hpp>
#include <steklov/mesh.hpp>
#include <steklov/serialization.hpp>

using namespace steklov;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitBadInput = 65;
constexpr int kExitNumerical = 70;

/// Failures while reading or validating inputs map to exit 65, failures
/// inside the numerics to exit 70. Commands flip this once their inputs
/// are fully loaded.
enum class Phase { load, compute };

struct CommonOptions {
  int indent = 2;
  std::uint64_t seed = 20260813;
  int threads = 1;
};

SurfaceMesh load_mesh(const std::string& path,
                      const std::string& conformal_path) {
  SurfaceMesh mesh = read_off(path);
  if (!conformal_path.empty()) {
    std::ifstream in(conformal_path);
    if (!in) throw Error("cannot open conformal sidecar " + conformal_path);
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw Error("conformal sidecar is not valid JSON: " +
                  std::string(e.what()));
    }
    if (!j.contains("conformal_factor") || !j["conformal_factor"].is_array())
      throw Error("conformal sidecar needs a conformal_factor array");
    const auto& arr = j["conformal_factor"];
    if (static_cast<int>(arr.size()) != mesh.vertex_count())
      throw Error("conformal_factor length does not match vertex count");
    mesh.conformal_factor.resize(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
      mesh.conformal_factor(v) = arr[v].get<double>();
  }
  return mesh;
}

int run_solve(const CommonOptions& common, const std::string& surface,
              const std::string& conformal, int modes, double length,
              const std::string& out) {
  Phase phase = Phase::load;
  try {
    GridSpec grid{modes, length};
    if (!grid.valid()) throw Error("need modes >= 4 and length > 0");
    BoundaryOperator op;
    if (surface == "disk") {
      phase = Phase::compute;
      op = dn_disk(grid);
    } else {
      SurfaceMesh mesh = load_mesh(surface, conformal);
      phase = Phase::compute;
      op = to_fourier(dn_from_mesh(mesh), grid);
    }
    save_operator(op, out, common.indent);
    std::cout << "wrote " << out << " (modes " << modes << ", boundary length "
              << op.grid.length << ", orientation " << op.orientation
              << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return phase == Phase::load ? kExitBadInput : kExitNumerical;
  }
}

int run_check(const CommonOptions& common, const std::string& input,
              const std::string& report_path, double tol, double fem_error,
              int points) {
  Phase phase = Phase::load;
  try {
    BoundaryOperator op = load_operator(input);
    phase = Phase::compute;

    CheckConfig cfg;
    if (fem_error > 0) cfg = fem_config(fem_error);
    if (tol > 0) cfg.tol = tol;
    if (points > 0) cfg.v_points = points;
    cfg.seed = common.seed;

    auto rep = full_report(op, cfg);
    const ordered_json j = to_json(rep);
    if (!report_path.empty()) write_text_atomic(report_path, dump_json(j, common.indent));

    std::cout << "base tolerance " << cfg.tol << ", rank cut " << cfg.rank_rel
              << ", seed " << cfg.seed << "\n";
    for (const auto& c : rep.conditions)
      std::cout << "condition " << c.id << ": " << to_string(c.status)
                << " (residual " << c.residual << ", tol " << c.tol << ")\n";
    std::cout << "verdict: " << rep.verdict << "\n";

    if (rep.verdict == "pass") return 0;
    if (rep.verdict == "fail") return 1;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check: " << e.what() << "\n";
    return phase == Phase::load ? kExitBadInput : kExitNumerical;
  }
}

int run_topology(const CommonOptions& common, const std::string& input,
                 const std::string& out, double min_gap, double zero_gap) {
  Phase phase = Phase::load;
  try {
    BoundaryOperator op = load_operator(input);
    phase = Phase::compute;
    auto t = topology_of(op, min_gap, zero_gap);
    const std::string text = dump_json(to_json(t), common.indent);
    if (!out.empty()) write_text_atomic(out, text);
    std::cout << text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "topology: " << e.what() << "\n";
    return phase == Phase::load ? kExitBadInput : kExitNumerical;
  }
}

int run_reconstruct(const CommonOptions& common, const std::string& input,
                    int grid_cells, const std::string& out_csv,
                    const std::string& out_svg, double margin,
                    double fem_error) {
  Phase phase = Phase::load;
  try {
    BoundaryOperator op = load_operator(input);
    phase = Phase::compute;

    ReconstructConfig cfg;
    cfg.resolution = grid_cells;
    cfg.threads = common.threads;
    cfg.margin = margin;
    if (fem_error > 0) {
      const CheckConfig fem = fem_config(fem_error);
      cfg.rank_rel = fem.kernel_rel;
      cfg.kernel_floor = fem.kernel_floor;
      cfg.kernel_gap = fem.kernel_gap;
    }
    auto rec = reconstruct(op, cfg);

    if (!out_csv.empty()) write_region_csv(out_csv, rec.field);
    if (!out_svg.empty())
      write_region_svg(out_svg, rec.coordinate, rec.field, rec.region);

    std::cout << "coordinate: kernel column " << rec.coordinate_index
              << ", image degree " << rec.degree << "\n";
    std::cout << "area " << rec.region.area << " over "
              << rec.region.positive_cells << " cells (+"
              << rec.region.boundary_cells << " boundary at half weight)\n";
    if (rec.region.multivalent_cells > 0)
      std::cout << "multivalent covering: " << rec.region.multivalent_cells
                << " cells up to winding " << rec.region.max_winding << "\n";
    int determinate = 0;
    for (const auto& s : rec.samples) determinate += s.determinate ? 1 : 0;
    std::cout << "interior samples: " << determinate << "/"
              << rec.samples.size() << " determinate\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "reconstruct: " << e.what() << "\n";
    return phase == Phase::load ? kExitBadInput : kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary operator toolkit: Dirichlet-to-Neumann solvers, "
               "holomorphic-algebra checks, topology, image reconstruction"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--json-indent", common.indent,
                 "JSON indentation; -1 for compact")
      ->capture_default_str();
  app.add_option("--seed", common.seed, "seed for all sampled checks")
      ->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads for rasters")
      ->capture_default_str();

  auto* solve = app.add_subcommand(
      "solve", "compute a boundary operator and write it as JSON");
  std::string surface, conformal, solve_out;
  int modes = 16;
  double length = 2 * std::numbers::pi;
  solve->add_option("--surface", surface, "'disk' or a path to an OFF mesh")
      ->required();
  solve->add_option("--conformal", conformal,
                    "JSON sidecar with a per-vertex conformal_factor array");
  solve->add_option("--modes", modes, "Fourier truncation order")
      ->capture_default_str();
  solve->add_option("--length", length, "boundary length of the model grid")
      ->capture_default_str();
  solve->add_option("--out", solve_out, "output operator path")->required();

  auto* check = app.add_subcommand(
      "check", "verify the holomorphic-algebra characterization");
  std::string check_in, report_path;
  double tol = -1, fem_error = -1;
  int points = -1;
  check->add_option("input", check_in, "operator JSON")->required();
  check->add_option("--report", report_path, "write the full report here");
  check->add_option("--tol", tol, "base residual tolerance");
  check->add_option("--fem-error", fem_error,
                    "measured forward error; scales all tolerances");
  check->add_option("--points", points, "test points per coordinate");

  auto* topology = app.add_subcommand(
      "topology", "handle rank, Euler characteristic, and genus");
  std::string topo_in, topo_out;
  double min_gap = 10, zero_gap = 40;
  topology->add_option("input", topo_in, "operator JSON")->required();
  topology->add_option("--out", topo_out, "also write the JSON here");
  topology->add_option("--min-gap", min_gap, "required spectral gap at the cut")
      ->capture_default_str();
  topology->add_option("--zero-gap", zero_gap, "gap for the rank-0 verdict")
      ->capture_default_str();

  auto* reconstruct = app.add_subcommand(
      "reconstruct", "recover the conformal image region");
  std::string rec_in, rec_csv, rec_svg;
  int grid_cells = 256;
  double margin = 0.15, rec_fem_error = -1;
  reconstruct->add_option("input", rec_in, "operator JSON")->required();
  reconstruct->add_option("--grid", grid_cells, "raster cells per axis")
      ->capture_default_str();
  reconstruct->add_option("--out", rec_csv, "winding field CSV (x,y,d)");
  reconstruct->add_option("--svg", rec_svg, "region figure");
  reconstruct->add_option("--margin", margin, "box margin around the curve")
      ->capture_default_str();
  reconstruct->add_option("--fem-error", rec_fem_error,
                          "measured forward error; scales kernel extraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*solve)
    return run_solve(common, surface, conformal, modes, length, solve_out);
  if (*check)
    return run_check(common, check_in, report_path, tol, fem_error, points);
  if (*topology)
    return run_topology(common, topo_in, topo_out, min_gap, zero_gap);
  if (*reconstruct)
    return run_reconstruct(common, rec_in, grid_cells, rec_csv, rec_svg,
                           margin, rec_fem_error);
  return kExitUsage;
}

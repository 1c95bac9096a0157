#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steklov/fem.hpp>
#include <steklov/reconstruction.hpp>
#include <steklov/topology.hpp>

#include "oracles.hpp"

using namespace steklov;
using oracle::cd;

namespace {

BoundaryFunction curve_from(const GridSpec& grid,
                            std::initializer_list<std::pair<int, cd>> modes) {
  VecC<double> c = VecC<double>::Zero(grid.samples());
  for (const auto& [n, a] : modes) c[grid.index(n)] = a;
  return from_coeffs(grid, c);
}

BoundaryOperator squares_only(const GridSpec& grid) {
  MatC<double> m = MatC<double>::Zero(grid.samples(), grid.samples());
  for (int n = -grid.modes; n <= grid.modes; ++n) {
    const double lam = (n % 2 == 0) ? std::abs(n) : std::abs(n) + 1;
    m(grid.index(n), grid.index(n)) = lam;
  }
  return make_operator(grid, m);
}

}  // namespace

TEST_CASE("winding field of a circle: values, mask corridor, area") {
  GridSpec grid{16, 2 * oracle::pi};
  auto eta = curve_from(grid, {{1, cd(1, 0)}});
  FieldBox box{-1.3, 1.3, -1.3, 1.3};
  auto fd = winding_field(eta, box, 128, 128, 2);

  REQUIRE(fd.nx == 128);
  REQUIRE(fd.ny == 128);
  const double diag = fd.cell_diagonal();

  int interior = 0, exterior = 0;
  for (int iy = 0; iy < fd.ny; ++iy)
    for (int ix = 0; ix < fd.nx; ++ix) {
      const double r = std::abs(fd.center(ix, iy));
      if (fd.masked(iy, ix)) {
        // The corridor never extends beyond twice its nominal radius.
        CHECK(std::abs(r - 1.0) < 3.0 * diag);
        CHECK(fd.d(iy, ix) == 0);
        continue;
      }
      if (r < 1.0) {
        CHECK(fd.d(iy, ix) == 1);
        ++interior;
      } else {
        CHECK(fd.d(iy, ix) == 0);
        ++exterior;
      }
      // Unmasked centers keep a corridor of clearance to the curve.
      CHECK(std::abs(r - 1.0) >= 1.4 * diag);
    }
  CHECK(interior > 1000);
  CHECK(exterior > 1000);

  auto region = image_region(fd);
  CHECK(region.area == doctest::Approx(oracle::pi).epsilon(0.02));
  CHECK(region.max_winding == 1);
  CHECK(region.multivalent_cells == 0);
  CHECK(region.positive_cells == interior);
}

TEST_CASE("winding field is independent of the thread count") {
  GridSpec grid{12, 2 * oracle::pi};
  auto eta = curve_from(grid, {{1, cd(1, 0)}, {2, cd(0.3, 0)}});
  FieldBox box{-1.8, 1.8, -1.8, 1.8};
  auto a = winding_field(eta, box, 64, 64, 1);
  auto b = winding_field(eta, box, 64, 64, 8);
  CHECK((a.d == b.d).all());
  CHECK((a.masked == b.masked).all());
}

TEST_CASE("winding field values agree with direct winding numbers") {
  GridSpec grid{12, 2 * oracle::pi};
  auto eta = curve_from(grid, {{1, cd(1, 0)}, {2, cd(0.3, 0)}});
  FieldBox box{-2.0, 2.0, -2.0, 2.0};
  auto fd = winding_field(eta, box, 96, 96, 2);

  oracle::Rng rng(7);
  int checked = 0;
  while (checked < 100) {
    const int ix = static_cast<int>((rng.real() + 1) * 0.5 * 95.999);
    const int iy = static_cast<int>((rng.real() + 1) * 0.5 * 95.999);
    if (fd.masked(iy, ix)) continue;
    const auto w = winding_number(eta, fd.center(ix, iy));
    CHECK(fd.d(iy, ix) == w.value);
    ++checked;
  }
}

TEST_CASE("area of the cardioid-like image converges to the exact value") {
  // For eta = w + 0.3 w^2 on |w| = 1 the enclosed area is
  // pi (1 + 2 * 0.3^2) = 3.70707933...
  GridSpec grid{16, 2 * oracle::pi};
  auto eta = curve_from(grid, {{1, cd(1, 0)}, {2, cd(0.3, 0)}});
  const double exact = oracle::pi * 1.18;

  FieldBox box{-1.8, 1.8, -1.8, 1.8};
  auto r256 = image_region(winding_field(eta, box, 256, 256, 8));
  CHECK(r256.area == doctest::Approx(exact).epsilon(0.02));

  auto r512 = image_region(winding_field(eta, box, 512, 512, 8));
  CHECK(std::abs(r512.area - r256.area) <= 0.01 * r256.area);
  CHECK(r512.area == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("doubly traversed circle: multivalent covering is reported") {
  GridSpec grid{12, 2 * oracle::pi};
  auto eta = curve_from(grid, {{2, cd(1, 0)}});
  FieldBox box{-1.4, 1.4, -1.4, 1.4};
  auto region = image_region(winding_field(eta, box, 128, 128, 2));
  CHECK(region.max_winding == 2);
  CHECK(region.multivalent_cells == region.positive_cells);
  CHECK(region.area == doctest::Approx(oracle::pi).epsilon(0.02));
}

TEST_CASE("constant curve yields an empty region") {
  GridSpec grid{8, 2 * oracle::pi};
  auto eta = curve_from(grid, {{0, cd(0.4, -0.2)}});
  FieldBox box{-2.0, 2.0, -2.0, 2.0};
  auto fd = winding_field(eta, box, 64, 64);
  CHECK_THROWS_AS(image_region(fd), EmptyRegion);
}

TEST_CASE("region boundary polyline tracks the image curve") {
  GridSpec grid{16, 2 * oracle::pi};
  auto eta = curve_from(grid, {{1, cd(1, 0)}});
  FieldBox box{-1.3, 1.3, -1.3, 1.3};
  auto fd = winding_field(eta, box, 128, 128, 2);
  auto region = image_region(fd);

  REQUIRE(region.boundary.size() == 1);
  const auto& loop = region.boundary.front();
  REQUIRE(loop.size() > 100);
  double worst = 0;
  for (const auto& p : loop) worst = std::max(worst, std::abs(std::abs(p) - 1.0));
  CHECK(worst <= fd.cell_diagonal());
}

TEST_CASE("interior evaluation recovers values of holomorphic traces") {
  GridSpec grid{16, 2 * oracle::pi};
  auto op = dn_disk(grid);
  auto kb = kernel_basis(build_upsilon(op));
  auto w1 = curve_from(grid, {{1, cd(1, 0)}});
  auto w2 = curve_from(grid, {{2, cd(1, 0)}});

  SUBCASE("identity and square at an interior point") {
    auto v1 = evaluate_interior(op, kb, w1, w1, cd(0.5, 0));
    REQUIRE(v1.determinate);
    CHECK(std::abs(v1.value - cd(0.5, 0)) <= 1e-10);
    CHECK(v1.residual <= 1e-10);

    auto v2 = evaluate_interior(op, kb, w2, w1, cd(0.5, 0));
    REQUIRE(v2.determinate);
    CHECK(std::abs(v2.value - cd(0.25, 0)) <= 1e-10);
    CHECK(v2.residual <= 1e-10);

    auto v3 = evaluate_interior(op, kb, w2, w1, cd(0.3, -0.4));
    REQUIRE(v3.determinate);
    CHECK(std::abs(v3.value - cd(0.3, -0.4) * cd(0.3, -0.4)) <= 1e-10);
  }

  SUBCASE("exterior points are flagged indeterminate") {
    auto v = evaluate_interior(op, kb, w2, w1, cd(2.0, 0));
    CHECK_FALSE(v.determinate);
    auto far = evaluate_interior(op, kb, w2, w1, cd(0, -1.7));
    CHECK_FALSE(far.determinate);
  }

  SUBCASE("points on the curve are rejected") {
    CHECK_THROWS_AS(evaluate_interior(op, kb, w2, w1, cd(1.0, 0)),
                    OnBoundaryCurve);
  }

  SUBCASE("evaluation is linear in the trace") {
    const cd alpha(0.7, 0), beta(0, -0.3);
    auto mix = curve_from(grid, {{1, alpha}, {2, beta}});
    const cd z(0.25, 0.55);
    auto vm = evaluate_interior(op, kb, mix, w1, z);
    auto v1 = evaluate_interior(op, kb, w1, w1, z);
    auto v2 = evaluate_interior(op, kb, w2, w1, z);
    REQUIRE(vm.determinate);
    CHECK(std::abs(vm.value - (alpha * v1.value + beta * v2.value)) <= 1e-9);
  }

  SUBCASE("non-holomorphic traces are rejected") {
    auto bar = curve_from(grid, {{-1, cd(1, 0)}});
    CHECK_THROWS_AS(evaluate_interior(op, kb, bar, w1, cd(0.5, 0)), Error);
  }
}

TEST_CASE("full reconstruction from the disk operator") {
  GridSpec grid{16, 2 * oracle::pi};
  auto op = dn_disk(grid);
  ReconstructConfig cfg;
  cfg.resolution = 128;
  cfg.threads = 4;
  auto rec = reconstruct(op, cfg);

  CHECK(rec.degree == 1);
  CHECK(rec.coordinate_index >= 1);
  CHECK_FALSE(rec.orientation_normalized);
  CHECK(rec.region.area == doctest::Approx(oracle::pi).epsilon(0.02));
  CHECK(rec.region.max_winding == 1);
  CHECK(rec.region.multivalent_cells == 0);

  // The image curve of the chosen coordinate is a unit circle up to
  // rotation, so the boundary polyline must hug |p| = 1.
  REQUIRE(!rec.region.boundary.empty());
  for (const auto& loop : rec.region.boundary)
    for (const auto& p : loop)
      CHECK(std::abs(std::abs(p) - 1.0) <= 1.5 * rec.field.cell_diagonal());

  REQUIRE(!rec.samples.empty());
  REQUIRE(rec.sample_functions.size() >= 2);
  CHECK(rec.sample_functions.front() == rec.coordinate_index);
  for (const auto& s : rec.samples) {
    CHECK(s.determinate);
    // First sampled function is the coordinate itself: its interior value
    // must reproduce the evaluation point.
    CHECK(std::abs(s.values.front() - s.z) <= 1e-8);
    for (double r : s.residuals) CHECK(r <= 1e-8);
  }
}

TEST_CASE("reconstruction normalizes a reversed operator") {
  GridSpec grid{12, 2 * oracle::pi};
  auto op = reverse_orientation(dn_disk(grid));
  ReconstructConfig cfg;
  cfg.resolution = 96;
  cfg.threads = 2;
  auto rec = reconstruct(op, cfg);
  CHECK(rec.orientation_normalized);
  CHECK(rec.degree == 1);
  CHECK(rec.region.area == doctest::Approx(oracle::pi).epsilon(0.03));
}

TEST_CASE("squares-only kernel admits no univalent coordinate") {
  // Every nonconstant kernel element is a trace of a function of w^2, so
  // the best available coordinate covers its image twice. The fallback
  // coordinate is accepted and the double covering is reported.
  GridSpec grid{12, 2 * oracle::pi};
  auto op = squares_only(grid);
  ReconstructConfig cfg;
  cfg.resolution = 96;
  cfg.threads = 2;
  auto rec = reconstruct(op, cfg);
  CHECK(rec.degree == 2);
  CHECK(rec.region.max_winding == 2);
  CHECK(rec.region.multivalent_cells > 0);
}

TEST_CASE("forced constant coordinate reaches the empty-region error") {
  GridSpec grid{12, 2 * oracle::pi};
  auto op = dn_disk(grid);
  ReconstructConfig cfg;
  cfg.resolution = 64;
  cfg.coordinate = curve_from(grid, {{0, cd(1.0, 0.5)}});
  CHECK_THROWS_AS(reconstruct(op, cfg), EmptyRegion);
}

TEST_CASE("handle ranks of model operators") {
  GridSpec grid{16, 2 * oracle::pi};
  auto disk = topology_of(dn_disk(grid));
  CHECK(disk.handle_rank == 0);
  CHECK(disk.euler_characteristic == 1);
  CHECK(disk.genus == 0);
  CHECK(disk.gap >= 1e3);

  // The zero operator is no Dirichlet-to-Neumann map: its handle detector
  // is the bare derivative, whose rank saturates at 2N.
  GridSpec small{8, 2 * oracle::pi};
  MatC<double> zmat = MatC<double>::Zero(small.samples(), small.samples());
  auto zero = topology_of(make_operator(small, zmat));
  CHECK(zero.handle_rank == 2 * small.modes);
}

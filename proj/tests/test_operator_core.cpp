#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steklov/fem.hpp>
#include <steklov/kernel.hpp>
#include <steklov/upsilon.hpp>
#include <steklov/winding.hpp>

#include "oracles.hpp"

using namespace steklov;
using oracle::cd;

namespace {

/// Random operator with the real-operator conjugation symmetry.
BoundaryOperator random_real_operator(const GridSpec& grid, oracle::Rng& rng) {
  const int w = grid.samples();
  Eigen::MatrixXcd a(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) a(i, j) = rng.complex_unit();
  Eigen::MatrixXcd m(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      m(i, j) = 0.5 * (a(i, j) + std::conj(a(w - 1 - i, w - 1 - j)));
  return make_operator(grid, m);
}

}  // namespace

TEST_CASE("disk DN is diagonal |n| with the expected structure") {
  GridSpec grid{8, 2 * oracle::pi};
  auto dn = dn_disk(grid);
  CHECK(dn.real_flag);
  for (int n = -8; n <= 8; ++n) {
    auto out = apply(dn, basis_mode(grid, n));
    Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(grid.samples());
    expect[grid.index(n)] = std::abs(n);
    CHECK((out.coeff - expect).norm() < 1e-14);
  }
  // Constants are harmonic: DN kills the mean.
  CHECK(norm(apply(dn, basis_mode(grid, 0))) < 1e-15);
  // Symmetric and nonnegative as a quadratic form on real functions.
  oracle::Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.samples());
    for (int n = 1; n <= 8; ++n) {
      c[grid.index(n)] = rng.complex_unit();
      c[grid.index(-n)] = std::conj(c[grid.index(n)]);
    }
    auto f = from_coeffs(grid, c);
    REQUIRE(f.real_flag);
    const cd quad = inner(f, apply(dn, f));
    CHECK(std::abs(quad.imag()) < 1e-12);
    CHECK(quad.real() > -1e-10);
  }
}

TEST_CASE("bundled checker matches its two-part real form") {
  GridSpec grid{8, 2 * oracle::pi};
  oracle::Rng rng(5);
  for (auto op : {dn_disk(grid), random_real_operator(grid, rng)}) {
    auto ups = build_upsilon(op);
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::VectorXcd zc(grid.samples());
      for (int i = 0; i < grid.samples(); ++i) zc[i] = rng.complex_unit();
      auto zeta = from_coeffs(grid, zc);
      auto f = real_part(zeta);
      auto g = imag_part(zeta);
      auto re = apply(op, f) - derivative(g);
      auto im = apply(op, g) + derivative(f);
      auto direct = apply(ups, zeta);
      auto split = re + cd(0, 1) * im;
      CHECK((direct.coeff - split.coeff).norm() < 1e-11);
    }
  }
}

TEST_CASE("checker annihilates holomorphic modes, doubles antiholomorphic") {
  GridSpec grid{8, 2 * oracle::pi};
  auto ups = build_upsilon(dn_disk(grid));
  CHECK(norm(apply(ups, basis_mode(grid, 2))) < 1e-13);
  auto out = apply(ups, basis_mode(grid, -2));
  Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(grid.samples());
  expect[grid.index(-2)] = 4.0;
  CHECK((out.coeff - expect).norm() < 1e-13);
}

TEST_CASE("non-real operators are rejected by the checker builders") {
  GridSpec grid{6, 2 * oracle::pi};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(grid.samples(), grid.samples());
  m(grid.index(1), grid.index(1)) = cd(0, 1);  // breaks conjugation symmetry
  auto op = make_operator(grid, m);
  CHECK(!op.real_flag);
  CHECK_THROWS_AS((void)build_upsilon(op), NotRealOperator);
  CHECK_THROWS_AS((void)handle_operator(op), NotRealOperator);
}

TEST_CASE("disk kernel is the holomorphic half, smoothest first") {
  GridSpec grid{8, 2 * oracle::pi};
  auto kb = kernel_basis(build_upsilon(dn_disk(grid)));
  REQUIRE(kb.dim() == 9);
  for (int c = 0; c < 9; ++c) {
    // Sobolev ordering puts mode c in column c, phase-fixed to +1.
    Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(grid.samples());
    expect[grid.index(c)] = 1.0;
    CHECK((kb.basis.col(c) - expect).norm() < 1e-12);
  }
}

TEST_CASE("diagonal perturbation evicts one kernel mode") {
  GridSpec grid{8, 2 * oracle::pi};
  auto dn = dn_disk(grid);
  Eigen::MatrixXcd m = dn.matrix;
  m(grid.index(2), grid.index(2)) += 0.1;
  m(grid.index(-2), grid.index(-2)) += 0.1;  // keep the operator real
  auto kb = kernel_basis(build_upsilon(make_operator(grid, m)));
  CHECK(kb.dim() == 8);
}

TEST_CASE("zero operator has full kernel") {
  GridSpec grid{8, 2 * oracle::pi};
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(grid.samples(), grid.samples());
  auto kb = kernel_basis(BoundaryOperator{grid, z, +1, true, {}});
  CHECK(kb.dim() == grid.samples());
}

TEST_CASE("integration times differentiation is the mean projection") {
  GridSpec grid{8, 2 * oracle::pi};
  auto jd = integration_operator(grid) * derivative_operator(grid);
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Identity(grid.samples(), grid.samples());
  p0(grid.index(0), grid.index(0)) = 0;
  CHECK((jd.matrix - p0).norm() < 1e-13);
}

TEST_CASE("handle detector vanishes on the disk") {
  GridSpec grid{16, 2 * oracle::pi};
  auto h = handle_operator(dn_disk(grid));
  CHECK(h.matrix.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(h.diagnostics.at("mean_leak") == 0.0);
  auto rr = rank_by_gap(h.matrix, operator_norm(derivative_operator(grid)));
  CHECK(rr.rank == 0);
  CHECK(rr.gap >= 1e3);
}

TEST_CASE("derivative alone has full even rank and no handle structure") {
  GridSpec grid{8, 2 * oracle::pi};
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(grid.samples(), grid.samples());
  auto h = handle_operator(BoundaryOperator{grid, z, +1, true, {}});
  auto rr = rank_by_gap(h.matrix, operator_norm(derivative_operator(grid)));
  CHECK(rr.rank == 2 * grid.modes);
}

TEST_CASE("rank estimation refuses gapless spectra") {
  GridSpec grid{8, 2 * oracle::pi};
  const int w = grid.samples();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(w, w);
  // Decays through the tolerance with only a 10x step at the crossing.
  for (int i = 0; i < w; ++i) m(i, i) = std::pow(10.0, -i);
  CHECK_THROWS_AS((void)estimate_rank(m), RankAmbiguous);
  try {
    (void)estimate_rank(m);
  } catch (const RankAmbiguous& e) {
    CHECK(e.candidates[0] >= 0);
    CHECK(e.candidates[1] <= w);
    CHECK(e.gap < 1e3);
  }
}

TEST_CASE("winding numbers from the argument principle") {
  GridSpec grid{16, 2 * oracle::pi};
  auto circle = basis_mode(grid, 1);
  CHECK(winding_number(circle, cd(0.5, 0.1)).value == 1);
  CHECK(winding_number(circle, cd(1.2, 0)).value == 0);
  CHECK(winding_number(circle, cd(0.0, 0.0)).defect < 1e-10);

  auto doubled = basis_mode(grid, 2);
  CHECK(winding_number(doubled, cd(0, 0)).value == 2);

  auto cardioid = basis_mode(grid, 1) + 0.3 * basis_mode(grid, 2);
  CHECK(winding_number(cardioid, cd(3, 0)).value == 0);
  CHECK(winding_number(cardioid, cd(0, 0)).value == 1);

  CHECK_THROWS_AS((void)winding_number(circle, std::exp(cd(0, 0.37))),
                  WindingIllConditioned);
}

TEST_CASE("sampled reciprocal matches the geometric series") {
  GridSpec grid{8, 2 * oracle::pi};
  auto circle = basis_mode(grid, 1);
  auto rc = reciprocal_coeffs(circle, cd(2, 0));
  const int half = (static_cast<int>(rc.size()) - 1) / 2;
  for (int n = -half; n <= half; ++n) {
    const cd expect = n >= 0 ? -std::pow(0.5, n + 1) : 0.0;  // 1/(w-2) on |w|=1
    CHECK(std::abs(rc[n + half] - expect) < 1e-12);
  }
  CHECK_THROWS_AS((void)reciprocal_coeffs(circle, cd(1, 0)), OnBoundaryCurve);
}

TEST_CASE("localized checker sees poles only on the interior side") {
  GridSpec grid{16, 2 * oracle::pi};
  auto ups = build_upsilon(dn_disk(grid));
  auto kb = kernel_basis(ups);
  auto circle = basis_mode(grid, 1);

  auto outside = build_upsilon_eta_z(ups, circle, cd(1.5, 0.2));
  CHECK(rank_on_subspace(outside, kb, operator_norm(ups), 1e-9) == 0);
  CHECK(norm(apply(outside, basis_mode(grid, 0))) < 1e-10);

  auto inside = build_upsilon_eta_z(ups, circle, cd(0.4, -0.3));
  CHECK(rank_on_subspace(inside, kb, operator_norm(ups), 1e-9) == 1);
}

TEST_CASE("orientation reversal is an isometry and an involution") {
  GridSpec grid{8, 2 * oracle::pi};
  oracle::Rng rng(23);
  auto op = random_real_operator(grid, rng);
  auto rev = reverse_orientation(op);
  CHECK(rev.orientation == -1);
  Eigen::JacobiSVD<Eigen::MatrixXcd> s1(op.matrix), s2(rev.matrix);
  CHECK((s1.singularValues() - s2.singularValues()).norm() < 1e-12);
  auto back = reverse_orientation(rev);
  CHECK((back.matrix - op.matrix).norm() == 0.0);
  CHECK(back.orientation == +1);
}

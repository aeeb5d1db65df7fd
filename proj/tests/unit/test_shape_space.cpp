#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "symquot/error.hpp"
#include "symquot/rng.hpp"
#include "symquot/shape_space.hpp"

using namespace symquot;

namespace {

Eigen::MatrixXd random_points(RngStream& rng, int n, int d) {
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-1, 1);
  }
  return m;
}

Eigen::Matrix3d rotation(double a, double b, double c) {
  return (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(b, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(c, Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

Eigen::Matrix2d rotation2(double a) {
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

// 2-D RMSD by scanning rotations and reflections on a fine grid, then a
// golden-section refinement around the best sample.
double brute_rmsd_2d(const Configuration& a, const Configuration& b) {
  double best = INFINITY;
  for (int mirror = 0; mirror < 2; ++mirror) {
    Eigen::Matrix2d F = Eigen::Matrix2d::Identity();
    if (mirror) F(1, 1) = -1;
    auto dist = [&](double t) { return (a.coords - b.coords * F * rotation2(t)).norm(); };
    const int steps = 20000;
    double bt = 0, bv = INFINITY;
    for (int s = 0; s < steps; ++s) {
      const double t = 2 * std::numbers::pi * s / steps;
      if (dist(t) < bv) bv = dist(t), bt = t;
    }
    double lo = bt - 2 * std::numbers::pi / steps, hi = bt + 2 * std::numbers::pi / steps;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) * 0.382, m2 = lo + (hi - lo) * 0.618;
      if (dist(m1) < dist(m2)) hi = m2;
      else lo = m1;
    }
    best = std::min(best, dist(0.5 * (lo + hi)));
  }
  return best;
}

Eigen::MatrixXd icosahedron_with_center() {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  Eigen::MatrixXd m(13, 3);
  m.row(0).setZero();
  int r = 1;
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      m.row(r++) << 0, s1, s2 * phi;
      m.row(r++) << s1, s2 * phi, 0;
      m.row(r++) << s2 * phi, 0, s1;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("center") {
  Eigen::MatrixXd m(3, 2);
  m << 0, 0, 2, 0, 1, 3;
  const auto c = center(m);
  CHECK(c.centered);
  CHECK(c.coords.colwise().sum().norm() < 1e-15);
  CHECK(c.coords(0, 0) == doctest::Approx(-1));
  CHECK(c.coords(0, 1) == doctest::Approx(-1));
  CHECK_THROWS_AS(center(Eigen::MatrixXd(0, 3)), std::invalid_argument);
}

TEST_CASE("Lennard-Jones pair and dimer") {
  CHECK(lj_pair(1.0) == 0.0);
  const double z = std::cbrt(2.0);  // r^6 = 2
  CHECK(std::abs(lj_pair(z) + 0.25) < 1e-12);
  // minimum: phi'(z) = -6 z^-7 + 3 z^-4 vanishes at z^3 = 2
  CHECK(lj_pair(z * (1 + 1e-4)) > lj_pair(z));
  CHECK(lj_pair(z * (1 - 1e-4)) > lj_pair(z));

  Eigen::MatrixXd m(2, 3);
  m << 0, 0, 0, std::pow(2.0, 1.0 / 6.0), 0, 0;
  CHECK(std::abs(lj_energy(center(m)) + 0.25) < 1e-9);

  Eigen::MatrixXd clash(2, 3);
  clash << 0.3, 0, 0, 0.3, 0, 0;
  CHECK_THROWS_WITH_AS(lj_energy(center(clash)), "singular pair (0,1)", NumericalError);
}

TEST_CASE("Lennard-Jones energy is relabelling and rigid-motion invariant") {
  RngStream rng(61, 0);
  for (int k = 0; k < 50; ++k) {
    const auto cfg = center(random_points(rng, 6, 3) * 2.0);
    const double e = lj_energy(cfg);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    for (int s = 0; s < 6; ++s) std::swap(perm[static_cast<std::size_t>(s)], perm[rng.next_u64() % 6]);
    CHECK(lj_energy(permute(cfg, perm)) == doctest::Approx(e).epsilon(1e-10));
    Configuration moved = cfg;
    moved.coords = (cfg.coords * rotation(rng.uniform(0, 6), rng.uniform(0, 3), rng.uniform(0, 6))).rowwise() +
                   Eigen::RowVector3d(1, -2, 0.5);
    CHECK(lj_energy(moved) == doctest::Approx(e).epsilon(1e-10));
  }
}

TEST_CASE("complex energy on real points equals the real energy") {
  RngStream rng(62, 0);
  const auto cfg = center(random_points(rng, 5, 3) * 2.0);
  ComplexConfiguration cc;
  cc.coords = cfg.coords.cast<Complex>();
  const Complex e = lj_energy(cc);
  CHECK(e.real() == doctest::Approx(lj_energy(cfg)).epsilon(1e-12));
  CHECK(e.imag() == 0.0);
}

TEST_CASE("rmsd is zero under rotation and mirror") {
  RngStream rng(63, 0);
  for (int k = 0; k < 30; ++k) {
    const auto a = center(random_points(rng, 7, 3));
    Configuration b = a;
    b.coords = a.coords * rotation(rng.uniform(0, 6), rng.uniform(0, 3), rng.uniform(0, 6));
    CHECK(rmsd(a, b) < 1e-10);
    CHECK(rmsd(a, b, true) < 1e-10);
    Configuration m = a;
    m.coords.col(2) *= -1;
    CHECK(rmsd(a, m) < 1e-10);
  }
}

TEST_CASE("rmsd of a square against a rotated diamond") {
  Eigen::MatrixXd sq(4, 2), other(4, 2);
  sq << 1, 0, 0, 1, -1, 0, 0, -1;
  other << 1, 0, 0, 1, -1, 0, 0.5, -0.5;
  const auto a = center(sq), b = center(other);
  const double r = rmsd(a, b);
  CHECK(r == doctest::Approx(brute_rmsd_2d(a, b)).epsilon(1e-9));

  RngStream rng(64, 0);
  for (int k = 0; k < 20; ++k) {
    const auto x = center(random_points(rng, 5, 2)), y = center(random_points(rng, 5, 2));
    CHECK(rmsd(x, y) == doctest::Approx(brute_rmsd_2d(x, y)).epsilon(1e-8));
  }
}

TEST_CASE("rmsd is a pseudometric") {
  RngStream rng(65, 0);
  for (int k = 0; k < 100; ++k) {
    const auto a = center(random_points(rng, 6, 3)), b = center(random_points(rng, 6, 3)),
               c = center(random_points(rng, 6, 3));
    CHECK(rmsd(a, a) < 1e-12);
    CHECK(rmsd(a, b) == doctest::Approx(rmsd(b, a)).epsilon(1e-10));
    CHECK(rmsd(a, c) <= rmsd(a, b) + rmsd(b, c) + 1e-10);
    CHECK(rmsd(a, b, true) >= rmsd(a, b) - 1e-12);
  }
  CHECK_THROWS_AS(rmsd(center(random_points(rng, 3, 3)), center(random_points(rng, 4, 3))), std::invalid_argument);
}

TEST_CASE("isotropy of an equilateral triangle") {
  Eigen::MatrixXd t(3, 2);
  t << 1, 0, -0.5, std::sqrt(3.0) / 2, -0.5, -std::sqrt(3.0) / 2;
  const auto rep = isotropy(center(t));
  CHECK(rep.edge_order == 6);
  CHECK(rep.vertex_order == 1);
  CHECK(rep.inclusion_holds);
  CHECK(rep.exhaustive);
  CHECK_FALSE(rep.rank_deficient);
  CHECK(rep.witnesses.size() == 6);
}

TEST_CASE("isotropy of the centered icosahedron") {
  const auto rep = isotropy(center(icosahedron_with_center()));
  CHECK(rep.edge_order == 120);
  CHECK(rep.vertex_order == 1);
  CHECK(rep.inclusion_holds);
  CHECK_FALSE(rep.exhaustive);
  for (const auto& w : rep.witnesses) CHECK(w[0] == 0);  // the center is fixed
}

TEST_CASE("isotropy of generic configurations is trivial") {
  RngStream rng(66, 0);
  for (int k = 0; k < 20; ++k) {
    const auto rep = isotropy(center(random_points(rng, 5, 3)));
    CHECK(rep.edge_order == 1);
    CHECK(rep.vertex_order == 1);
  }
}

TEST_CASE("vertex isotropy is contained in edge isotropy") {
  // coincident particles give vertex symmetries
  Eigen::MatrixXd m(4, 3);
  m << 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 2, 1;
  const auto rep = isotropy(center(m));
  CHECK(rep.vertex_order == 2);
  CHECK(rep.edge_order >= rep.vertex_order);
  CHECK(rep.inclusion_holds);

  Eigen::MatrixXd line(3, 3);
  line << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  const auto lr = isotropy(center(line));
  CHECK(lr.rank_deficient);
  CHECK(lr.edge_order == 2);
}

TEST_CASE("unbounded dive") {
  CHECK(dive_constant() == doctest::Approx(std::pow(2.0 + std::sqrt(3.0), -6.0)).epsilon(1e-14));
  const auto r = unbounded_dive(1e-2);
  const double u = std::sqrt(1e-2) * std::cos(std::numbers::pi / 12);
  CHECK(r.r12_sq.real() == doctest::Approx(4 * u * u).epsilon(1e-14));
  CHECK(std::abs(r.r12_sq.imag()) < 1e-15);
  CHECK(std::abs(r.r13_sq - std::conj(r.r23_sq)) < 1e-15);
  CHECK(std::abs(r.r13_sq) == doctest::Approx(1e-2).epsilon(1e-14));
  CHECK(std::abs(r.energy.imag()) <= 1e-9 * std::abs(r.energy.real()));
  CHECK(std::abs(r.scaled_energy - r.predicted) <= 1e-4 * std::abs(r.predicted));

  double prev = 0.0;
  for (double rho : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const double e = unbounded_dive(rho).energy.real();
    CHECK(e < prev);
    prev = e;
  }
  CHECK_THROWS_AS(unbounded_dive(0.0), std::invalid_argument);
}

TEST_CASE("xyz parsing") {
  const std::string text =
      "2\n"
      "energy=-0.25 dimer\n"
      "Ar 0 0 0\n"
      "Ar 1.122462048309373 0 0\n"
      "\n"
      "3\n"
      "no energy here\n"
      "0 0 0\n"
      "1 0 0\n"
      "0 1 0\n";
  const auto blocks = parse_configurations(text);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].energy.value() == -0.25);
  CHECK(blocks[0].line == 1);
  CHECK(blocks[0].cfg.centered);
  CHECK(blocks[0].cfg.coords(0, 0) == doctest::Approx(-0.5612310241546865));
  CHECK_FALSE(blocks[1].energy.has_value());
  CHECK(blocks[1].line == 6);
  CHECK(blocks[1].cfg.d() == 3);

  const auto again = parse_configurations(format_configurations(blocks));
  REQUIRE(again.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK((again[i].cfg.coords - blocks[i].cfg.coords).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(again[i].energy == blocks[i].energy);
  }
}

TEST_CASE("xyz parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_configurations("\n\n", "f.xyz"), "f.xyz: no configuration blocks", InputError);
  CHECK_THROWS_WITH_AS(parse_configurations("x\n", "f.xyz"), "f.xyz:1: expected a positive particle count",
                       InputError);
  CHECK_THROWS_WITH_AS(parse_configurations("2\nc\n0 0 0\n1 x 0\n", "f.xyz"),
                       "f.xyz:4: cannot parse 'x' as a number", InputError);
  CHECK_THROWS_WITH_AS(parse_configurations("2\nc\n0 0 0\n1 0\n", "f.xyz"), "f.xyz:4: expected 3 coordinates, got 2",
                       InputError);
  CHECK_THROWS_AS(parse_configurations("3\nc\n0 0 0\n", "f.xyz"), InputError);
  CHECK_THROWS_WITH_AS(parse_configurations("1\nenergy=abc\n0 0 0\n", "f.xyz"), "f.xyz:2: malformed energy field",
                       InputError);
}

TEST_CASE("fixture: recorded energies match and the icosahedron is found") {
  const auto blocks = load_configurations(std::string(SYMQUOT_FIXTURE_DIR) + "/lj_fixture.xyz");
  CHECK(blocks.size() == 20);
  int icosahedra = 0;
  for (const auto& b : blocks) {
    REQUIRE(b.energy.has_value());
    CHECK(lj_energy(b.cfg) == doctest::Approx(*b.energy).epsilon(1e-10));
    if (b.cfg.n() == 13 && isotropy(b.cfg, 1e-5).edge_order == 120) ++icosahedra;
  }
  CHECK(icosahedra >= 1);
  CHECK(blocks[0].energy.value() == doctest::Approx(-44.326801 / 4).epsilon(1e-7));
}

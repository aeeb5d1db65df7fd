#include <doctest.h>

#include <complex>
#include <vector>

#include "../support/oracles.hpp"
#include "symquot/ensembles.hpp"
#include "symquot/error.hpp"
#include "symquot/polynomial.hpp"
#include "symquot/quotient_geometry.hpp"
#include "symquot/rng.hpp"

using namespace symquot;

namespace {

MultiPoly x(std::size_t m, std::size_t i) { return MultiPoly::variable(m, i); }

std::vector<double> random_point(RngStream& rng, std::size_t m, double r = 1.0) {
  std::vector<double> v(m);
  for (auto& e : v) e = rng.uniform(-r, r);
  return v;
}

Eigen::VectorXd as_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("eval on small polynomials") {
  const auto p = x(2, 0) + x(2, 1);
  CHECK(p.eval(std::vector<double>{1, 2}) == 3.0);
  CHECK(MultiPoly(3).eval(std::vector<double>{4, 5, 6}) == 0.0);
  const auto q = (x(2, 0) * x(2, 1)).pow(2);
  CHECK(q.eval(std::vector<double>{2, 3}) == 36.0);
  CHECK_THROWS_WITH_AS(p.eval(std::vector<double>{1}), doctest::Contains("arity"), std::invalid_argument);
}

TEST_CASE("zero coefficients are never stored") {
  const auto p = x(2, 0) - x(2, 0);
  CHECK(p.is_zero());
  CHECK_FALSE(p.degree().has_value());
  CHECK(p == MultiPoly(2));
  const auto q = MultiPoly::from_terms(2, {{{1, 0}, 2.0}, {{1, 0}, -2.0}, {{0, 1}, 1.0}});
  CHECK(q.term_count() == 1);
  CHECK(q == x(2, 1));
}

TEST_CASE("symbolic derivatives") {
  const auto sq = x(1, 0) * x(1, 0);
  auto d = derivatives(sq);
  CHECK(d.grad[0] == 2.0 * x(1, 0));
  CHECK(d.hess[0][0] == MultiPoly::constant(1, 2.0));

  const auto xy = x(2, 0) * x(2, 1);
  d = derivatives(xy);
  CHECK(d.grad[0] == x(2, 1));
  CHECK(d.grad[1] == x(2, 0));
  CHECK(d.hess[0][1] == MultiPoly::constant(2, 1.0));
  CHECK(d.hess[1][0] == d.hess[0][1]);
  CHECK(d.hess[0][0].is_zero());
}

TEST_CASE("gradient and Hessian match central differences on KSS samples") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + trial % 5;
    const int deg = 1 + trial % 6;
    const auto p = sample_nhkss(m, deg, rng);
    const PolyEvaluator ev(p);
    const auto pt = random_point(rng, m);
    const Jet J = ev.jet(pt);
    auto f = [&](const Eigen::VectorXd& v) { return p.eval(std::span<const double>(v.data(), m)); };
    const Eigen::VectorXd fd = oracle::fd_gradient(f, as_vec(pt));
    CHECK((fd - J.grad).norm() <= 1e-6 * std::max(J.grad.norm(), 1e-3));
    for (std::size_t i = 0; i < m; ++i) {
      auto gi = [&](const Eigen::VectorXd& v) { return ev.jet(std::span<const double>(v.data(), m), 1).grad[static_cast<Eigen::Index>(i)]; };
      const Eigen::VectorXd row = oracle::fd_gradient(gi, as_vec(pt));
      CHECK((row - J.hess.row(static_cast<Eigen::Index>(i)).transpose()).norm() <= 1e-6 * std::max(J.hess.norm(), 1e-3));
    }
  }
}

TEST_CASE("fused evaluator agrees with symbolic derivatives") {
  RngStream rng(5, 0);
  const auto p = sample_nhkss(4, 5, rng);
  const auto d = derivatives(p);
  const PolyEvaluator ev(p);
  for (int k = 0; k < 10; ++k) {
    const auto pt = random_point(rng, 4, 1.5);
    const Jet J = ev.jet(pt);
    CHECK(J.value == doctest::Approx(p.eval(pt)).epsilon(1e-12));
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(J.grad[static_cast<Eigen::Index>(i)] == doctest::Approx(d.grad[i].eval(pt)).epsilon(1e-11));
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(J.hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
              doctest::Approx(d.hess[i][j].eval(pt)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("compose on small inputs") {
  const auto e = esp_polynomials(2);
  const auto P = MultiPoly::variable(1, 0);
  CHECK(compose(P, std::vector<MultiPoly>{e[0]}) == x(2, 0) + x(2, 1));
  const auto sq = compose(P * P, std::vector<MultiPoly>{x(2, 0) + x(2, 1)});
  CHECK(sq == x(2, 0) * x(2, 0) + 2.0 * (x(2, 0) * x(2, 1)) + x(2, 1) * x(2, 1));
  CHECK_THROWS_AS(compose(P, std::vector<MultiPoly>{}), std::invalid_argument);
}

TEST_CASE("compose commutes with evaluation through the esp map") {
  RngStream rng(7, 0);
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto P = sample_nhkss(n, 3, rng);
    const auto f = compose(P, esp_polynomials(n));
    CHECK(f.degree().value() <= 3 * static_cast<int>(n));
    for (int k = 0; k < 100; ++k) {
      const auto pt = random_point(rng, n);
      const auto y = esp(pt);
      const double want = P.eval(y.e);
      CHECK(f.eval(pt) == doctest::Approx(want).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("compose fails loudly beyond the term cap") {
  RngStream rng(1, 0);
  const auto P = sample_nhkss(3, 4, rng);
  CHECK_THROWS_AS(compose(P, esp_polynomials(3), 50), NumericalError);
}

TEST_CASE("ring homomorphism and conjugation properties") {
  RngStream rng(9, 0);
  for (int k = 0; k < 30; ++k) {
    const std::size_t m = 1 + k % 4;
    const auto p = sample_nhkss(m, 3, rng);
    const auto q = sample_nhkss(m, 2, rng);
    const auto pt = random_point(rng, m);
    const double a = p.eval(pt), b = q.eval(pt);
    CHECK((p + q).eval(pt) == doctest::Approx(a + b).epsilon(1e-10).scale(1.0));
    CHECK((p * q).eval(pt) == doctest::Approx(a * b).epsilon(1e-10).scale(1.0));
    std::vector<Complex> z(m), zc(m);
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      zc[i] = std::conj(z[i]);
    }
    CHECK(std::abs(p.eval(zc) - std::conj(p.eval(z))) <= 1e-12 * std::max(1.0, std::abs(p.eval(z))));
  }
}

TEST_CASE("chain rule through compose") {
  RngStream rng(13, 0);
  const std::size_t n = 3;
  const auto P = sample_nhkss(n, 3, rng);
  const auto subs = esp_polynomials(n);
  const auto f = compose(P, subs);
  const PolyEvaluator fe(f), pe(P);
  for (int k = 0; k < 20; ++k) {
    const auto pt = random_point(rng, n);
    const auto ej = esp_jet(pt, 1);
    const Jet jp = pe.jet(std::span<const double>(ej.values.data(), n), 1);
    const Eigen::VectorXd chain = ej.jacobian.transpose() * jp.grad;
    const Eigen::VectorXd direct = fe.jet(pt, 1).grad;
    CHECK((chain - direct).norm() <= 1e-8 * std::max(1.0, direct.norm()));
  }
}

TEST_CASE("JSON round trip is lossless and byte-stable") {
  RngStream rng(3, 0);
  const auto p = sample_nhkss(3, 4, rng);
  const auto j = to_json(p);
  CHECK(poly_from_json(j) == p);
  CHECK(to_json(poly_from_json(j)).dump() == j.dump());
}

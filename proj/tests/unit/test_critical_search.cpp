#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "symquot/critical_search.hpp"
#include "symquot/ensembles.hpp"
#include "symquot/error.hpp"
#include "symquot/polynomial.hpp"
#include "symquot/quotient_geometry.hpp"
#include "symquot/rng.hpp"

using namespace symquot;

namespace {

MultiPoly x(std::size_t m, std::size_t i) { return MultiPoly::variable(m, i); }

MultiPoly norm_sq(std::size_t m) {
  MultiPoly s(m);
  for (std::size_t i = 0; i < m; ++i) s = s + x(m, i) * x(m, i);
  return s;
}

// sum_i (x_i^2 - 1)^2
MultiPoly double_well(std::size_t m) {
  MultiPoly s(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto w = x(m, i) * x(m, i) - MultiPoly::constant(m, 1.0);
    s = s + w * w;
  }
  return s;
}

double max_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Point on the curve (x1+x2)^2 + (x1 x2)^2 = 1 along direction theta.
std::vector<double> es_circle_point(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double A = c * c * s * s, B = (c + s) * (c + s);
  const double u = 2.0 / (B + std::sqrt(B * B + 4 * A));  // root of A u^2 + B u - 1
  const double r = std::sqrt(u);
  return {r * c, r * s};
}

}  // namespace

TEST_CASE("quadratic bowl") {
  const auto L = explicit_landscape(norm_sq(3));
  const auto p = damped_newton(L, std::vector<double>{1.5, -0.3, 2.0});
  REQUIRE(p.has_value());
  CHECK(p->grad_norm <= 1e-10);
  CHECK(p->morse_index == 0);
  CHECK(p->polished);
  for (double v : p->x) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("double well from a nearby start") {
  const auto L = explicit_landscape(double_well(2));
  const auto p = damped_newton(L, std::vector<double>{0.9, -1.1});
  REQUIRE(p.has_value());
  CHECK(p->x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p->x[1] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(p->energy == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("accepted but unpolished points are flagged") {
  const std::size_t m = 1;
  const auto L = explicit_landscape(x(m, 0).pow(4));
  SearchOptions opts;
  opts.polish = false;
  const auto p = damped_newton(L, std::vector<double>{1.0}, opts);
  REQUIRE(p.has_value());
  CHECK(p->grad_norm <= opts.eps_accept);
  CHECK(p->grad_norm > opts.eps_polish);
  CHECK_FALSE(p->polished);

  opts.polish = true;
  const auto q = damped_newton(L, std::vector<double>{1.0}, opts);
  REQUIRE(q.has_value());
  CHECK(q->polished);
  CHECK(q->grad_norm <= opts.eps_polish);
}

TEST_CASE("divergence and non-finite starts") {
  const auto L = explicit_landscape(-1.0 * x(1, 0));
  CHECK_FALSE(damped_newton(L, std::vector<double>{0.5}).has_value());
  const auto B = explicit_landscape(norm_sq(1));
  CHECK_THROWS_AS(damped_newton(B, std::vector<double>{std::nan("")}), NumericalError);
}

TEST_CASE("linear function on the unit circle") {
  const auto L = explicit_landscape(x(2, 0), ConstraintKind::x_sphere);
  for (double sign : {1.0, -1.0}) {
    const auto p = constrained_newton(L, std::vector<double>{sign * 0.9, 0.2}, ConstraintKind::x_sphere);
    REQUIRE(p.has_value());
    CHECK(p->x[0] == doctest::Approx(sign).epsilon(1e-10));
    CHECK(std::abs(p->x[1]) <= 1e-10);
    CHECK(p->grad_norm <= 1e-10);
    CHECK(p->constraint_residual <= 1e-8);
    CHECK(p->morse_index == (sign > 0 ? 1 : 0));
  }
}

TEST_CASE("es-sphere acceptance holds the constraint") {
  RngStream rng(41, 0);
  const auto f = reynolds_symmetrize(sample_nhkss(3, 3, rng));
  const auto L = explicit_landscape(f, ConstraintKind::es_sphere);
  int accepted = 0;
  for (int k = 0; k < 30; ++k) {
    std::vector<double> x0(3);
    for (auto& v : x0) v = rng.uniform(-1.5, 1.5);
    const auto p = constrained_newton(L, x0, ConstraintKind::es_sphere);
    if (!p) continue;
    ++accepted;
    const auto e = esp(p->x).e;
    double s = 0;
    for (double v : e) s += v * v;
    CHECK(std::abs(s - 1.0) <= 1e-8);
    CHECK(p->grad_norm <= 1e-1);
  }
  CHECK(accepted > 0);
}

TEST_CASE("es-circle stationary points match a curve scan") {
  // f = e_1 on g = (x1+x2)^2 + (x1 x2)^2 - 1 = 0. Stationary where
  // det[grad f, grad g] changes sign along the curve.
  auto h = [](double th) {
    const auto p = es_circle_point(th);
    const double s = p[0] + p[1], q = p[0] * p[1];
    const double g1 = 2 * s + 2 * q * p[1], g2 = 2 * s + 2 * q * p[0];
    return g2 - g1;
  };
  const int N = 100000;
  std::vector<std::vector<double>> oracle;
  for (int i = 0; i < N; ++i) {
    double lo = 2 * std::numbers::pi * i / N, hi = 2 * std::numbers::pi * (i + 1) / N;
    double hl = h(lo);
    const double hh = h(hi);
    if (hl == 0.0) {
      oracle.push_back(es_circle_point(lo));
      continue;
    }
    if ((hl < 0) == (hh < 0) || hh == 0.0) continue;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double hm = h(mid);
      if ((hm < 0) == (hl < 0)) {
        lo = mid;
        hl = hm;
      } else {
        hi = mid;
      }
    }
    oracle.push_back(es_circle_point(0.5 * (lo + hi)));
  }
  REQUIRE(oracle.size() >= 2);

  const auto L = explicit_landscape(x(2, 0) + x(2, 1), ConstraintKind::es_sphere);
  RngStream rng(42, 0);
  std::set<std::size_t> found;
  int accepted = 0;
  for (int k = 0; k < 60; ++k) {
    std::vector<double> x0{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto p = constrained_newton(L, x0, ConstraintKind::es_sphere);
    if (!p || !p->polished) continue;
    ++accepted;
    double best = 1e300;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < oracle.size(); ++j) {
      const double d = max_dist(p->x, oracle[j]);
      if (d < best) {
        best = d;
        idx = j;
      }
    }
    CHECK(best <= 1e-8);
    found.insert(idx);
  }
  CHECK(accepted > 0);
  CHECK(found.size() == oracle.size());
}

TEST_CASE("morse index examples") {
  const auto bowl = explicit_landscape(norm_sq(2));
  CHECK(morse_index(bowl, std::vector<double>{0, 0}) == 0);
  const auto well = explicit_landscape(double_well(2));
  CHECK(morse_index(well, std::vector<double>{0, 1}) == 1);
  CHECK(morse_index(well, std::vector<double>{0, 0}) == 2);
  const auto cap = explicit_landscape(-1.0 * norm_sq(3));
  CHECK(morse_index(cap, std::vector<double>{0, 0, 0}) == 3);
}

TEST_CASE("canonical forms and deduplication") {
  CHECK(canonicalize(std::vector<double>{1, 3, 2}) == std::vector<double>{3, 2, 1});
  CHECK(canonicalize(std::vector<double>{0, 1, 2, 0, 1, 5}, 2) == std::vector<double>{2, 0, 1, 5, 0, 1});

  CHECK(dedup_by_permutation({{1, 2}, {2, 1}}, 1e-2).size() == 1);
  CHECK(dedup_by_permutation({{1.0, 0}, {1.005, 0}}, 1e-2).size() == 1);
  CHECK(dedup_by_permutation({{1, 0}, {1.02, 0}}, 1e-2).size() == 2);

  // single linkage: the third point chains through the second
  const auto c = dedup_by_permutation({{0.0}, {0.008}, {0.016}}, 1e-2, std::vector<double>{0.3, 0.1, 0.2});
  REQUIRE(c.size() == 1);
  CHECK(c[0].members.size() == 3);
  CHECK(c[0].representative == 1);
}

TEST_CASE("survey of the double well finds the six orbits") {
  const auto L = explicit_landscape(double_well(2));
  const auto s = survey(L, 500, RngStream(43, 0));
  REQUIRE(s.points.size() == 6);
  std::vector<std::vector<double>> want{{1, 1}, {1, 0}, {1, -1}, {0, 0}, {0, -1}, {-1, -1}};
  for (const auto& w : want) {
    bool hit = false;
    for (const auto& p : s.points) hit = hit || max_dist(p.point.x, w) <= 1e-8;
    CHECK(hit);
  }
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(s.points[i].t == doctest::Approx(static_cast<double>(i) / 5.0));
    if (i > 0) CHECK(s.points[i].point.energy >= s.points[i - 1].point.energy);
    CHECK(std::is_sorted(s.points[i].point.x.rbegin(), s.points[i].point.x.rend()));
  }
  CHECK(s.points.front().point.energy == doctest::Approx(0.0).scale(1.0));
  CHECK(s.points.back().point.energy == doctest::Approx(2.0));
  CHECK(s.points.back().point.morse_index == 2);
  CHECK(s.raw_hits + s.failed_starts == 500);
  CHECK(s.dedup_count == 6);
}

TEST_CASE("single-start survey sits at t = 0") {
  const auto L = explicit_landscape(norm_sq(2));
  const auto s = survey(L, 1, RngStream(44, 0));
  REQUIRE(s.points.size() == 1);
  CHECK(s.points[0].t == 0.0);
}

TEST_CASE("survey does not depend on the job count") {
  LandscapeRecipe r;
  r.n = 3;
  r.degree = 3;
  r.coercive = CoerciveSpec{};
  r.seed = 45;
  const auto L = make_landscape(r, 0);
  SearchOptions one, three;
  three.jobs = 3;
  const auto a = survey(L, 60, RngStream(45, 1), one);
  const auto b = survey(L, 60, RngStream(45, 1), three);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("survey CSV layout") {
  const auto L = explicit_landscape(double_well(2));
  const auto s = survey(L, 50, RngStream(46, 0));
  const auto csv = s.to_csv();
  CHECK(csv.rfind("t,energy,grad_norm,morse_index,distinct_values,stabilizer_order,boundary_flag,x_1,x_2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(s.points.size() + 1));
}

TEST_CASE("restricted critical points are critical in the full space") {
  // x1 = x2 = z1, x3 = z2, x4 = z3
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 3);
  A(0, 0) = A(1, 0) = 1;
  A(2, 1) = 1;
  A(3, 2) = 1;
  LandscapeRecipe r;
  r.n = 4;
  r.degree = 3;
  r.coercive = CoerciveSpec{};
  r.seed = 47;
  int checked = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto L = make_landscape(r, i);
    const auto g = restricted_objective(L, A);
    RngStream rng = RngStream(47, i).split(9);
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::vector<double> z0(3);
      for (auto& v : z0) v = rng.uniform(-2, 2);
      const auto p = damped_newton(g, z0);
      if (!p) continue;
      const Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(p->x.data(), 3);
      const Eigen::VectorXd xf = A * z;
      const double full = L.jet(std::span<const double>(xf.data(), 4), 1).grad.norm();
      CHECK(full <= 1e-1);
      if (p->polished) CHECK(full <= 1e-8);
      ++checked;
      break;
    }
  }
  CHECK(checked == 50);
}

TEST_CASE("search options validation and JSON") {
  SearchOptions o;
  o.eps_polish = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  SearchOptions p;
  p.init_box = 1.5;
  p.jobs = 2;
  CHECK(SearchOptions::from_json(p.to_json()).to_json() == p.to_json());
}

TEST_CASE("calibration is reproducible") {
  SearchOptions o;
  const auto a = calibrate(3, 1, 4, 6, 48, o);
  const auto b = calibrate(3, 1, 4, 6, 48, o);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.runs == 6);
  CHECK(a.capacity_ratio == doctest::Approx(capacity_ratio(3, 1, 4)));
  for (auto ord : a.stabilizer_orders) CHECK(6 % ord == 0);
}

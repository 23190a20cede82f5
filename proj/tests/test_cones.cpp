#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "compconj/cones.hpp"
#include "compconj/conjugate.hpp"
#include "test_util.hpp"

using namespace compconj;

namespace {

// Brute-force polar check: conic samples of K against generators of P and
// circle samples for completeness.
void check_polar_pair(const Cone& k, const Cone& p) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> mu(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x(static_cast<size_t>(k.dim()), 0.0);
    for (const Vec& r : k.rays()) {
      double m = mu(rng);
      for (std::size_t a = 0; a < x.size(); ++a) x[a] += m * r[a];
    }
    Vec v(static_cast<size_t>(p.dim()), 0.0);
    for (const Vec& r : p.rays()) {
      double m = mu(rng);
      for (std::size_t a = 0; a < v.size(); ++a) v[a] += m * r[a];
    }
    double ip = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) ip += x[a] * v[a];
    CHECK(ip <= 1e-9);
  }
  // Completeness on the circle (2-D): directions polar to K must lie in P.
  if (k.dim() == 2) {
    for (int i = 0; i < 360; ++i) {
      double a = i * M_PI / 180.0;
      Vec v{std::cos(a), std::sin(a)};
      bool in_polar = true;
      for (const Vec& r : k.rays())
        if (r[0] * v[0] + r[1] * v[1] > 1e-9) in_polar = false;
      if (in_polar) CHECK(contains(p, v, 1e-6));
    }
  }
}

}  // namespace

TEST_CASE("polar of the first-axis ray") {
  Cone k = Cone::named("R+x0");
  Cone p = polar(k);
  check_polar_pair(k, p);
  // K° = R_- x R
  CHECK(contains(p, Vec{-1, 0}));
  CHECK(contains(p, Vec{0, 1}));
  CHECK(contains(p, Vec{0, -1}));
  CHECK(contains(p, Vec{-0.5, 3}));
  CHECK(!contains(p, Vec{1, 0}));
  // -K° = R_+ x R, as used by the repaired composite example.
  Cone mp = p.negated();
  CHECK(contains(mp, Vec{1, 5}));
  CHECK(contains(mp, Vec{0, -2}));
  CHECK(!contains(mp, Vec{-1, 0}));
}

TEST_CASE("polar of the trivial cone is everything") {
  Cone p = polar(Cone::zero(2));
  CHECK(contains(p, Vec{3, -4}));
  CHECK(contains(p, Vec{-3, 4}));
  Cone q = polar(Cone::full(2));
  CHECK(q.is_zero());
}

TEST_CASE("polar involution and anti-monotonicity") {
  std::vector<Cone> cones = {Cone::named("R+x0"), Cone::named("R+xR"),
                             Cone::named("R+xR+"), Cone::named("0xR"),
                             Cone(2, {{1, 1}, {1, -1}}), Cone::zero(2)};
  for (const Cone& k : cones) {
    Cone kpp = polar(polar(k));
    CHECK(cone_subset(k, kpp, 1e-6));
    CHECK(cone_subset(kpp, k, 1e-6));
  }
  Cone k1 = Cone::named("R+x0"), k2 = Cone::named("R+xR+");
  REQUIRE(cone_subset(k1, k2));
  CHECK(cone_subset(polar(k2), polar(k1)));
}

TEST_CASE("polar in three dimensions") {
  Cone k(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  Cone p = polar(k);  // nonpositive orthant
  CHECK(contains(p, Vec{-1, -1, -1}));
  CHECK(contains(p, Vec{-2, 0, 0}));
  CHECK(!contains(p, Vec{1, -1, -1}));
  Cone ray(3, {{1, 0, 0}});
  Cone pr = polar(ray);  // halfspace x1 <= 0
  CHECK(contains(pr, Vec{-1, 2, -3}));
  CHECK(contains(pr, Vec{0, 5, 5}));
  CHECK(!contains(pr, Vec{0.5, 0, 0}));
  Cone prr = polar(pr);
  CHECK(cone_subset(prr, ray, 1e-6));
  CHECK(cone_subset(ray, prr, 1e-6));
}

TEST_CASE("membership with relative tolerance") {
  Cone k = Cone::named("R+x0");
  CHECK(contains(k, Vec{2, 0}));
  CHECK(!contains(k, Vec{2, 0.5}));
  Cone quad = Cone::named("R+xR+");
  CHECK(contains(quad, Vec{1, 1}));
  CHECK(!contains(quad, Vec{-0.1, 1}));
  CHECK(contains(Cone::zero(2), Vec{0, 0}));
}

TEST_CASE("k_leq ordering") {
  Cone quad = Cone::named("R+xR+");
  CHECK(k_leq(quad, Vec{0, 0}, Vec{1, 2}));
  CHECK(k_leq(quad, Vec{5, -1}, std::nullopt));  // +inf_bullet is largest
  Cone axis = Cone::named("R+x0");
  CHECK(!k_leq(axis, Vec{0, 0}, Vec{1, 1}));
  CHECK(k_leq(axis, Vec{0, 1}, Vec{2, 1}));
}

TEST_CASE("k_leq reflexive and transitive on samples") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> mu(0.0, 1.5);
  Cone k = Cone::named("R+xR+");
  for (int t = 0; t < 100; ++t) {
    Vec x{mu(rng), mu(rng)};
    CHECK(k_leq(k, x, x));
    Vec d1{mu(rng), mu(rng)}, d2{mu(rng), mu(rng)};
    Vec y{x[0] + d1[0], x[1] + d1[1]};
    Vec z{y[0] + d2[0], y[1] + d2[1]};
    CHECK(k_leq(k, x, y));
    CHECK(k_leq(k, y, z));
    CHECK(k_leq(k, x, z));
  }
}

TEST_CASE("indicator grids") {
  Grid g = testutil::g2(-2, 2, 21);
  SUBCASE("trivial cone marks the origin only") {
    GridFn ind = indicator_grid(Cone::zero(2), g, false);
    std::size_t finite = 0;
    for (std::size_t i = 0; i < ind.size(); ++i)
      if (ind[i].is_finite()) {
        ++finite;
        auto p = g.point(i);
        CHECK(p[0] == 0.0);
        CHECK(p[1] == 0.0);
      }
    CHECK(finite == 1);
  }
  SUBCASE("negated polar of the axis ray") {
    Cone mp = polar(Cone::named("R+x0"));
    GridFn ind = indicator_grid(mp, g, true);  // delta_{-K°} = delta_{R+ x R}
    for (std::size_t i = 0; i < ind.size(); ++i) {
      auto p = g.point(i);
      CHECK(ind[i].is_finite() == (p[0] >= -1e-9));
    }
  }
  SUBCASE("full cone vanishes everywhere") {
    GridFn ind = indicator_grid(Cone::full(2), g, false);
    for (std::size_t i = 0; i < ind.size(); ++i) CHECK(ind[i] == ExtReal::finite(0.0));
  }
}

TEST_CASE("support function of an indicator") {
  // delta_K* = sigma_K: nonnegative, zero exactly on K°.
  Grid g = testutil::g2(-2, 2, 21);
  Cone k = Cone::named("R+xR+");
  GridFn ind = indicator_grid(k, g, false);
  GridFn sigma = conjugate(ind, testutil::cfg_for(testutil::g2(-2, 2, 21)));
  Cone kp = polar(k);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    CHECK(sigma[i] >= ExtReal::finite(-1e-9));
    auto p = g.point(i);
    Vec v{p[0], p[1]};
    bool zero = sigma[i].is_finite() && sigma[i].value() <= 1e-9;
    CHECK(zero == contains(kp, v, 1e-6));
  }
}

TEST_CASE("conic hull shapes") {
  Cone wedge = conic_hull(2, {{1, 0.2}, {1, -0.2}, {1, 0}});
  CHECK(wedge.rays().size() == 2);
  CHECK(contains(wedge, Vec{1, 0}));
  CHECK(!contains(wedge, Vec{0, 1}));
  Cone line = conic_hull(2, {{0, 1}, {0, -1}});
  CHECK(contains(line, Vec{0, -3}));
  CHECK(!contains(line, Vec{1, 0}));
  Cone half = conic_hull(2, {{0, 1}, {0, -1}, {-1, 0}});
  CHECK(contains(half, Vec{-2, 1}));
  CHECK(!contains(half, Vec{1, 0}));
  Cone full = conic_hull(2, {{1, 0}, {-1, 1}, {0, -1}});
  CHECK(contains(full, Vec{5, 5}));
  CHECK(contains(full, Vec{-5, -5}));
  CHECK(conic_hull(2, {}).is_zero());
}

TEST_CASE("dimension guards") {
  CHECK_THROWS_AS(Cone(4, {}), DimensionTooLarge);
  Cone k = Cone::named("R+x0");
  CHECK_THROWS_AS(contains(k, Vec{1.0}), DimensionMismatch);
}

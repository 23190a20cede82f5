#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "compconj/composite.hpp"
#include "compconj/duality.hpp"
#include "test_util.hpp"

using namespace compconj;
using namespace testutil;

namespace {

CompositeProblem cubic_map_problem(int nodes = 41, int ynodes = 81) {
  // F(x) = (0, x2), g(w) = w1^3/3 on w1 >= 0.
  std::vector<FunctionExpr> comps{FunctionExpr::parse("0"), FunctionExpr::parse("x2")};
  return CompositeProblem(FunctionExpr::parse("0"),
                          FunctionExpr::parse("pow(w1,3)/3 if w1 >= 0 else +inf"),
                          VecMap(2, std::move(comps)), g2(-2, 2, nodes),
                          g2(-2, 2, nodes), g2(-2, 2, nodes), g2(-4, 4, ynodes));
}

CompositeProblem quad_abs_problem(int nodes = 41, int ynodes = 81) {
  // F(x) = (x1^2/2, x2), g(w) = |w1|.
  std::vector<FunctionExpr> comps{FunctionExpr::parse("pow(x1,2)/2"),
                                  FunctionExpr::parse("x2")};
  return CompositeProblem(FunctionExpr::parse("0"), FunctionExpr::parse("abs(w1)"),
                          VecMap(2, std::move(comps)), g2(-2, 2, nodes),
                          g2(-2, 2, nodes), g2(-2, 2, nodes), g2(-4, 4, ynodes));
}

}  // namespace

TEST_CASE("scalarize the linear map") {
  CompositeProblem p = cubic_map_problem();
  GridFn s = scalarize(p, Vec{3, 5});
  for (std::size_t i = 0; i < s.size(); ++i) {
    double x2 = p.x_grid().point(i)[1];
    CHECK(std::abs(s[i].value() - 5 * x2) < 1e-12);
  }
}

TEST_CASE("scalarize with a zero vector is the domain indicator") {
  std::vector<FunctionExpr> comps{FunctionExpr::parse("x1")};
  VecMap F(1, std::move(comps), "x1 >= 0");
  CompositeProblem p(FunctionExpr::parse("0"), FunctionExpr::parse("abs(w1)"),
                     std::move(F), g1(-2, 2, 21), g1(-2, 2, 21), g1(-2, 2, 21),
                     g1(-2, 2, 21));
  GridFn s = scalarize(p, Vec{0.0});
  for (std::size_t i = 0; i < s.size(); ++i) {
    double x = p.x_grid().point(i)[0];
    if (x >= -1e-9)
      CHECK(s[i] == ExtReal::finite(0.0));
    else
      CHECK(s[i] == ExtReal::plus_inf());
  }
}

TEST_CASE("scalarize the quadratic map") {
  CompositeProblem p = quad_abs_problem();
  GridFn s = scalarize(p, Vec{1, 0});
  for (std::size_t i = 0; i < s.size(); ++i) {
    double x1 = p.x_grid().point(i)[0];
    CHECK(std::abs(s[i].value() - x1 * x1 / 2) < 1e-12);
  }
}

TEST_CASE("composite of the cubic scenario vanishes") {
  CompositeProblem p = cubic_map_problem();
  GridFn c = composite_fn(p);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == ExtReal::finite(0.0));
}

TEST_CASE("composite of the quadratic scenario") {
  CompositeProblem p = quad_abs_problem();
  GridFn c = composite_fn(p);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double x1 = p.x_grid().point(i)[0];
    CHECK(std::abs(c[i].value() - x1 * x1 / 2) < 1e-12);
  }
}

TEST_CASE("composite is +inf when g never sees the range") {
  std::vector<FunctionExpr> comps{FunctionExpr::parse("x1")};
  CompositeProblem p(FunctionExpr::parse("0"),
                     FunctionExpr::parse("w1 if w1 >= 10 else +inf"),
                     VecMap(1, std::move(comps)), g1(-2, 2, 21), g1(-2, 2, 21),
                     g1(-2, 2, 21), g1(-2, 2, 21));
  GridFn c = composite_fn(p);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == ExtReal::plus_inf());
}

TEST_CASE("perturbation of the cubic scenario depends on u only") {
  CompositeProblem p = cubic_map_problem(21, 41);
  PerturbationFn f(p);
  for (std::size_t u = 0; u < p.u_grid().size(); u += 37) {
    auto up = p.u_grid().point(u);
    ExtReal want = p.g_eval(Vec{up[0], up[1]});
    for (std::size_t x = 0; x < p.x_grid().size(); x += 41) {
      ExtReal got = f.value(x, u);
      if (want.is_finite())
        CHECK(std::abs(got.value() - want.value()) < 1e-12);
      else
        CHECK(got == want);
    }
  }
}

TEST_CASE("perturbation of the repaired quadratic scenario") {
  std::vector<FunctionExpr> comps{FunctionExpr::parse("pow(x1,2)/2"),
                                  FunctionExpr::parse("x2")};
  CompositeProblem p(FunctionExpr::parse("0"), FunctionExpr::parse("max(w1, 0)"),
                     VecMap(2, std::move(comps)), g2(-2, 2, 21), g2(-2, 2, 21),
                     g2(-2, 2, 21), g2(-4, 4, 41));
  PerturbationFn f(p);
  for (std::size_t x = 0; x < p.x_grid().size(); x += 17)
    for (std::size_t u = 0; u < p.u_grid().size(); u += 23) {
      double x1 = p.x_grid().point(x)[0];
      double u1 = p.u_grid().point(u)[0];
      double want = std::max(x1 * x1 / 2 + u1, 0.0);
      CHECK(std::abs(f.value(x, u).value() - want) < 1e-12);
    }
}

TEST_CASE("u = 0 slice equals the composite") {
  CompositeProblem p = quad_abs_problem(21, 41);
  PerturbationFn f(p);
  GridFn slice = f.u0_slice();
  GridFn comp = composite_fn(p);
  for (std::size_t i = 0; i < comp.size(); ++i)
    CHECK(slice[i].as_double() == comp[i].as_double());
}

TEST_CASE("rho of the cubic scenario is a delta pattern") {
  CompositeProblem p = cubic_map_problem();
  DualGridResult r = rho_grid(p);
  std::size_t origin = p.v_grid().nearest_node(Vec{0, 0});
  CHECK(r.fn[origin].is_finite());
  CHECK(std::abs(r.fn[origin].value()) < 1e-9);
  for (std::size_t i = 0; i < r.fn.size(); ++i)
    if (r.trusted_finite(i)) CHECK(i == origin);
}

TEST_CASE("rho of the quadratic scenario matches the closed form") {
  CompositeProblem p = quad_abs_problem();
  DualGridResult r = rho_grid(p);
  for (std::size_t i = 0; i < r.fn.size(); ++i) {
    if (!r.trusted_finite(i)) continue;
    auto v = p.v_grid().point(i);
    CHECK(std::abs(v[1]) < 1e-9);  // finite part concentrated on v2 = 0
    CHECK(std::abs(r.fn[i].value() - v[0] * v[0] / 2) < 5e-2);
  }
  RhoPointResult at = rho(p, Vec{1.0, 0.0});
  CHECK(std::abs(at.value.value() - 0.5) < 5e-2);
  REQUIRE(!at.minimizers.empty());
  CHECK(std::abs(at.minimizers.front()[0] - 1.0) < 0.2);  // y1 = 1 slice
  CHECK(std::abs(at.minimizers.front()[1]) < 1e-9);
  CHECK(!at.boundary_suspect);
}

TEST_CASE("rho through the identity map reduces to g*") {
  // Independent oracle: the double infimum collapses, so rho equals the
  // direct conjugate of g sampled on the same lattice.
  CompositeProblem p(FunctionExpr::parse("0"),
                     FunctionExpr::parse("abs(w1) + pow(w1,2)/4"),
                     VecMap::identity(1), g1(-4, 4, 41), g1(-4, 4, 41),
                     g1(-2, 2, 21), g1(-4, 4, 41), g1(-4, 4, 41));
  for (double vb : {-1.6, -0.4, 0.0, 0.8, 1.8}) {
    RhoPointResult r = rho(p, Vec{vb});
    ExtReal want = conjugate_at(p.g_sampled(), Vec{vb});
    REQUIRE(r.value.is_finite());
    CHECK(std::abs(r.value.value() - want.value()) < 5e-2);
  }
}

TEST_CASE("rho_tilde collapses when f0 vanishes") {
  CompositeProblem p = quad_abs_problem(21, 41);
  DualGridResult r = rho_grid(p);
  DualGridResult rt = rho_tilde_grid(p);
  for (std::size_t i = 0; i < r.fn.size(); ++i)
    CHECK(r.fn[i].as_double() == rt.fn[i].as_double());
  RhoTildePointResult pt = rho_tilde(p, Vec{1.0, 0.0});
  CHECK(std::abs(pt.value.value() - 0.5) < 5e-2);
}

TEST_CASE("rho_tilde with a quadratic f0 against the composite conjugate") {
  // f0 = x^2/2, F = id, g = 0: the composite conjugate is v^2/2 and the
  // (y,w)-infimum reproduces it through w = v.
  CompositeProblem p(FunctionExpr::parse("pow(x1,2)/2"), FunctionExpr::parse("0"),
                     VecMap::identity(1), g1(-4, 4, 41), g1(-4, 4, 41),
                     g1(-2, 2, 21), g1(-4, 4, 41), g1(-4, 4, 41));
  GridFn comp = composite_fn(p);
  // Node-aligned probes: off-node duals pick up the interpolated box-support
  // slope of the scalarization conjugate.
  for (double vb : {-1.6, 0.0, 0.4, 1.2}) {
    RhoTildePointResult rt = rho_tilde(p, Vec{vb});
    ExtReal oracle = conjugate_at(comp, Vec{vb});
    REQUIRE(rt.value.is_finite());
    CHECK(std::abs(rt.value.value() - vb * vb / 2) < 5e-2);
    CHECK(std::abs(rt.value.value() - oracle.value()) < 5e-2);
  }
  DualGridResult r = rho_grid(p);
  DualGridResult rtg = rho_tilde_grid(p);
  for (std::size_t i = 0; i < r.fn.size(); ++i) {
    if (r.fn[i].is_finite() && rtg.fn[i].is_finite())
      CHECK(r.fn[i].value() <= rtg.fn[i].value() + 1e-6);
  }
}

TEST_CASE("eta with the trivial cone equals rho") {
  CompositeProblem p = quad_abs_problem(21, 41);
  DualGridResult r = rho_grid(p);
  DualGridResult e = eta_grid(p, Cone::zero(2));
  for (std::size_t i = 0; i < r.fn.size(); ++i)
    CHECK(r.fn[i].as_double() == e.fn[i].as_double());
}

TEST_CASE("eta dominates rho") {
  CompositeProblem p = quad_abs_problem(21, 41);
  for (const char* name : {"R+x0", "R+xR+", "0xR"}) {
    DualGridResult r = rho_grid(p);
    DualGridResult e = eta_grid(p, Cone::named(name));
    for (std::size_t i = 0; i < r.fn.size(); ++i) {
      if (r.fn[i].is_finite() && e.fn[i].is_finite())
        CHECK(e.fn[i].value() >= r.fn[i].value() - 1e-9);
      else if (r.fn[i].is_plus_inf())
        CHECK(e.fn[i].is_plus_inf());
    }
  }
}

TEST_CASE("eta requires a vanishing f0") {
  CompositeProblem p(FunctionExpr::parse("x1"), FunctionExpr::parse("abs(w1)"),
                     VecMap::identity(1), g1(-2, 2, 21), g1(-2, 2, 21),
                     g1(-2, 2, 21), g1(-2, 2, 21));
  CHECK_THROWS_AS(eta(p, Cone::named("0", 1), Vec{0.0}), std::invalid_argument);
}

TEST_CASE("u_set point cloud and exact representation") {
  CompositeProblem p = cubic_map_problem(21, 41);
  SUBCASE("point cloud mode") {
    SampledSet s = u_set(p);
    CHECK(s.tag == SampledSet::Tag::PointCloud);
    CHECK(!s.points.empty());
    for (const Vec& pt : s.points) CHECK(pt[0] >= -1e-9);  // dom g - rge F
  }
  SUBCASE("exact mode carries a V-representation") {
    p.dom_g_vrep = VRepSet{2, {{0, 0}}, {{1, 0}, {0, 1}, {0, -1}}};
    p.f_image_vrep = VRepSet{2, {{0, 0}}, {{0, 1}, {0, -1}}};
    SampledSet s = u_set(p);
    CHECK(s.tag == SampledSet::Tag::ExactVRep);
    REQUIRE(s.vrep.has_value());
    CHECK(s.vrep->rays.size() == 5);
  }
}

TEST_CASE("degenerate u_set") {
  // dom(g) = rge(F) = {0}: U = {0}.
  std::vector<FunctionExpr> comps{FunctionExpr::parse("0")};
  CompositeProblem p(FunctionExpr::parse("0"),
                     FunctionExpr::parse("0 if w1 == 0 else +inf"),
                     VecMap(1, std::move(comps)), g1(-2, 2, 21), g1(-2, 2, 21),
                     g1(-2, 2, 21), g1(-2, 2, 21));
  SampledSet s = u_set(p);
  REQUIRE(s.points.size() == 1);
  CHECK(std::abs(s.points[0][0]) < 1e-12);
}

TEST_CASE("upper bound chain on random scenarios") {
  std::mt19937 rng(47);
  for (int t = 0; t < 5; ++t) {
    Json spec = random_convex_scenario(rng, t);
    CompositeProblem p = problem_from_spec(spec);
    GridFn comp = composite_fn(p);
    GridFn direct = conjugate(comp, cfg_for(p.v_grid()));
    DualGridResult r = rho_grid(p);
    DualGridResult rt = rho_tilde_grid(p);
    double tol = 1e-6 + default_fenchel_tol(p.g_sampled());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      if (direct[i].is_finite() && r.fn[i].is_finite())
        CHECK(direct[i].value() <= r.fn[i].value() + tol);
      if (r.fn[i].is_finite() && rt.fn[i].is_finite())
        CHECK(r.fn[i].value() <= rt.fn[i].value() + 2 * tol);
    }
  }
}

TEST_CASE("rho is midpoint convex along dual lines") {
  CompositeProblem p = quad_abs_problem(21, 41);
  DualGridResult r = rho_grid(p);
  // Restrict to the trusted line; box artifacts are excluded by suspicion.
  std::vector<ExtReal> line;
  const Grid& vg = p.v_grid();
  for (std::size_t i = 0; i < r.fn.size(); ++i) {
    auto v = vg.point(i);
    if (std::abs(v[1]) < 1e-9)
      line.push_back(r.trusted_finite(i) ? r.fn[i] : ExtReal::plus_inf());
  }
  GridFn line_fn(g1(-2, 2, 21), std::move(line));
  CHECK(!check_midpoint_convexity(line_fn, 1e-6).found);
}

TEST_CASE("constructor rejects empty effective domains") {
  std::vector<FunctionExpr> comps{FunctionExpr::parse("x1")};
  VecMap F(1, std::move(comps), "x1 >= 10");
  CHECK_THROWS_AS(CompositeProblem(FunctionExpr::parse("0"),
                                   FunctionExpr::parse("abs(w1)"), std::move(F),
                                   g1(-2, 2, 21), g1(-2, 2, 21), g1(-2, 2, 21),
                                   g1(-2, 2, 21)),
                  std::invalid_argument);
}

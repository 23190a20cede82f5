// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <random>

#include "compconj/csvio.hpp"
#include "compconj/duality.hpp"
#include "compconj/kconv.hpp"
#include "compconj/qual.hpp"
#include "compconj/scenario.hpp"
#include "test_util.hpp"

using namespace compconj;
using namespace testutil;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass,
            const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

bool run_builtin(const std::string& name, std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep = run_example(name);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s: %zu checks, %.0f ms%s", name.c_str(),
                rep.checks.size(), ms_since(t0), rep.all_pass() ? "" : " (failures)");
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!rep.all_pass())
    for (const CheckEntry& c : rep.checks)
      if (!c.pass) detail += " [" + c.check_id + "]";
  return rep.all_pass();
}

// ---------------------------------------------------------------- criterion 5

bool fenchel_young_everywhere(const GridFn& h, const Grid& dual) {
  GridFn star = conjugate(h, cfg_for(dual));
  for (std::size_t x = 0; x < h.size(); ++x)
    for (std::size_t v = 0; v < star.size(); ++v)
      if (fenchel_gap(h, star, x, v) < ExtReal::finite(-1e-9)) return false;
  return true;
}

bool biconjugate_props(const GridFn& h, const Grid& dual) {
  TransformConfig cfg = cfg_for(dual);
  GridFn bic = biconjugate(h, cfg);
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!(bic[i] <= h[i] + ExtReal::finite(1e-6))) return false;
  GridFn bic2 = biconjugate(bic, cfg);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (bic[i].is_finite() != bic2[i].is_finite()) return false;
    if (bic[i].is_finite() && std::abs(bic[i].value() - bic2[i].value()) > 1e-6)
      return false;
  }
  return true;
}

bool methods_agree(const GridFn& h, const Grid& dual, double* worst) {
  GridFn a = conjugate(h, cfg_for(dual, TransformMethod::BruteForce));
  GridFn b = conjugate(h, cfg_for(dual, TransformMethod::FastLLT));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_finite() && b[i].is_finite()) {
      double dev = std::abs(a[i].value() - b[i].value());
      *worst = std::max(*worst, dev);
      if (dev > 1e-9 * (1 + std::abs(a[i].value()))) return false;
    } else if (!(a[i] == b[i])) {
      return false;
    }
  }
  return true;
}

Json random_convex_scenario_2d(std::mt19937& rng, int index) {
  std::uniform_int_distribution<int> pick_g(0, 3);
  const char* gs[] = {"abs(w1) + abs(w2)", "pow(w1,2)/2 + pow(w2,2)/2",
                      "max(w1, 0) + max(w2, 0)", "abs(w1) + pow(w2,2)/2"};
  Json spec;
  spec["name"] = "random2d-" + std::to_string(index);
  spec["f0"] = "0";
  spec["g"] = gs[pick_g(rng)];
  spec["F"] = Json{{"components", Json::array({"x1", "x2"})}, {"guard", ""}};
  auto axes = [](double lo, double hi, int n, int d) {
    Json a = Json::array();
    for (int i = 0; i < d; ++i) a.push_back(Json::array({lo, hi, n}));
    return a;
  };
  spec["grids"] = Json{{"x", axes(-2, 2, 21, 2)},
                       {"u", axes(-2, 2, 21, 2)},
                       {"v", axes(-2, 2, 21, 2)},
                       {"y", axes(-4, 4, 21, 2)},
                       {"w", axes(-8, 8, 81, 2)}};
  spec["flags"] = Json{{"f_gamma0", true}};
  return spec;
}

bool weak_duality_probes(const CompositeProblem& p, std::mt19937& rng, int count) {
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int t = 0; t < count; ++t) {
    Vec v(static_cast<size_t>(p.n())), u(static_cast<size_t>(p.m()));
    for (double& x : v) x = pt(rng);
    for (double& x : u) x = pt(rng);
    DualityReport r = weak_duality_report(p, v, u, 1e-6);
    if (!r.weak_ok) return false;
  }
  return true;
}

bool primal_slice_conjugate_identity(const CompositeProblem& p, double vb) {
  Vec vbar(static_cast<size_t>(p.n()), 0.0);
  vbar[0] = vb;
  const Grid& ug = p.u_grid();
  std::vector<ExtReal> pv(ug.size());
  double up[3];
  for (std::size_t i = 0; i < ug.size(); ++i) {
    ug.point_into(i, up);
    pv[i] = primal_value(p, vbar, std::span<const double>(up, static_cast<size_t>(p.m())))
                .value;
  }
  GridFn pfn(ug, std::move(pv));
  ConjugateResult pstar = conjugate_full(pfn, cfg_for(p.y_grid()));
  const Grid& yg = p.y_grid();
  // f*(v,y) is only reliable when its x-supremum lands in the interior.
  auto scalarized_sup_interior = [&](std::span<const double> y) {
    GridFn s = scalarized_sample(p, y, true);
    const Grid& xg = p.x_grid();
    double best = -std::numeric_limits<double>::infinity();
    bool interior = false;
    double xp[3];
    for (std::size_t i = 0; i < xg.size(); ++i) {
      if (!s[i].is_finite()) continue;
      xg.point_into(i, xp);
      double val = vbar[0] * xp[0];
      for (int a = 1; a < p.n(); ++a) val += vbar[static_cast<size_t>(a)] * xp[a];
      val -= s[i].value();
      if (val > best + 1e-12) {
        best = val;
        interior = !xg.on_boundary(i);
      } else if (val > best - 1e-12 && !xg.on_boundary(i)) {
        interior = true;
      }
    }
    return interior;
  };
  double yp[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    if (!pstar.trusted_finite(j)) continue;
    if (p.g_star().suspect[j] || !p.g_star().fn[j].is_finite()) continue;
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    if (!scalarized_sup_interior(y)) continue;
    ExtReal fs = f_star(p, vbar, y);
    if (!fs.is_finite()) continue;
    if (std::abs(pstar.fn[j].value() - fs.value()) > 5e-2 * (1 + std::abs(fs.value())))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 6

struct ChainStats {
  double worst_direct = 0.0, worst_tilde = 0.0;
  bool order_ok = true;
};

ChainStats chain_inequalities(const CompositeProblem& p) {
  ChainStats s;
  GridFn direct = conjugate(composite_fn(p), cfg_for(p.v_grid()));
  DualGridResult r = rho_grid(p);
  DualGridResult rt = rho_tilde_grid(p);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    if (direct[i].is_finite() && r.fn[i].is_finite())
      s.worst_direct = std::max(s.worst_direct, direct[i].value() - r.fn[i].value());
    else if (direct[i].is_plus_inf() && !r.fn[i].is_plus_inf())
      s.order_ok = false;
    if (r.fn[i].is_finite() && rt.fn[i].is_finite())
      s.worst_tilde = std::max(s.worst_tilde, r.fn[i].value() - rt.fn[i].value());
    else if (r.fn[i].is_plus_inf() && !rt.fn[i].is_plus_inf())
      s.order_ok = false;
  }
  return s;
}

double rho_equality_dev(const CompositeProblem& p, bool* class_ok) {
  GridFn direct = conjugate(composite_fn(p), cfg_for(p.v_grid()));
  DualGridResult r = rho_grid(p);
  double worst = 0.0;
  *class_ok = true;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    if (direct[i].is_finite() && r.fn[i].is_finite())
      worst = std::max(worst, std::abs(direct[i].value() - r.fn[i].value()));
    else if (!(direct[i] == r.fn[i]))
      *class_ok = false;
  }
  return worst;
}

// rho computed against a regularized outer function (Lemma 5.7 wiring):
// min over reliable y of (<y,F>)*(v) + (g_K)*(y).
DualGridResult rho_of_regularized(const CompositeProblem& p, const Cone& k) {
  RegularizeResult gk = monotone_regularize(p.g_sampled(), k);
  ConjugateResult gkstar = conjugate_full(gk.fn, cfg_for(p.y_grid()));
  const Grid& vg = p.v_grid();
  const Grid& yg = p.y_grid();
  DualGridResult out{GridFn::constant(vg, ExtReal::plus_inf()),
                     std::vector<std::uint8_t>(vg.size(), 0),
                     std::vector<std::size_t>(vg.size(), SIZE_MAX)};
  double yp[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    if (gkstar.fn[j].is_plus_inf() || gkstar.suspect[j]) continue;
    yg.point_into(j, yp);
    ConjugateResult c = conjugate_full(
        scalarize(p, std::span<const double>(yp, static_cast<size_t>(p.m()))),
        cfg_for(vg));
    for (std::size_t i = 0; i < vg.size(); ++i) {
      ExtReal cand = c.fn[i] + gkstar.fn[j];
      if (cand.is_plus_inf()) continue;
      bool flag = c.is_suspect(i);
      bool better = cand < out.fn[i];
      bool tied = cand.is_finite() && out.fn[i].is_finite() &&
                  std::abs(cand.value() - out.fn[i].value()) <=
                      1e-12 * (1 + std::abs(out.fn[i].value()));
      if (better || (tied && out.suspect[i] && !flag)) {
        out.fn.at(i) = cand;
        out.suspect[i] = flag ? 1 : 0;
        out.argmin_y[i] = j;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8

Json lemma53_scenario(int idx) {
  struct Row {
    const char* g;
    const char* f1;  // first F component ("" means identity x1)
    Json dom_g_rays;
    Json img_points;
    Json img_rays;
  };
  // All rows keep K_F inside -hzn(g), so the cone band is nonempty and the
  // equivalences apply.
  static const Json kFullRays = Json::array(
      {Json::array({1, 0}), Json::array({-1, 0}), Json::array({0, 1}), Json::array({0, -1})});
  static const Json kRightRays = Json::array(
      {Json::array({1, 0}), Json::array({0, 1}), Json::array({0, -1})});
  static const Json kLeftRays = Json::array(
      {Json::array({-1, 0}), Json::array({0, 1}), Json::array({0, -1})});
  static const Json kOrigin = Json::array({Json::array({0, 0})});
  static const std::vector<Row> rows = {
      {"abs(w1) + abs(w2)", "x1", kFullRays, kOrigin, kFullRays},
      {"w1 if w1 <= 0 else +inf", "pow(x1,2)/2", kLeftRays, kOrigin, kRightRays},
      {"w1 if w1 <= 0 else +inf", "x1", kLeftRays, kOrigin, kFullRays},
      {"w1 if w1 <= -1 else +inf", "pow(x1,2)/2",
       kLeftRays, kOrigin, kRightRays},
      {"abs(w2) if w1 <= 1 else +inf", "pow(x1,2)/2", kLeftRays, kOrigin, kRightRays},
      {"abs(w2) + max(w1, 0)", "pow(x1,2)/2", kFullRays, kOrigin, kRightRays},
      {"w1 if w1 <= 0 else +inf", "pow(x1,2)/2 + 1",
       kLeftRays, Json::array({Json::array({1, 0})}), kRightRays},
      {"w1", "pow(x1,2)/2", kFullRays, kOrigin, kRightRays},
      {"max(w1, -1)", "pow(x1,2)/2", kFullRays, kOrigin, kRightRays},
      {"w1 if w1 <= 2 else +inf", "pow(x1,2)/2", kLeftRays, kOrigin, kRightRays},
  };
  const Row& row = rows[static_cast<size_t>(idx)];
  Json spec;
  spec["name"] = "lemma53-" + std::to_string(idx);
  spec["f0"] = "0";
  spec["g"] = row.g;
  spec["F"] = Json{{"components", Json::array({row.f1, "x2"})}, {"guard", ""}};
  auto axes = [](double lo, double hi, int n) {
    return Json::array({Json::array({lo, hi, n}), Json::array({lo, hi, n})});
  };
  spec["grids"] = Json{{"x", axes(-2, 2, 21)},
                       {"u", axes(-2, 2, 21)},
                       {"v", axes(-2, 2, 21)},
                       {"y", axes(-4, 4, 41)},
                       {"w", axes(-4, 4, 41)}};
  Json dom_g = Json{{"points", kOrigin}, {"rays", row.dom_g_rays}};
  // Domain offsets are encoded in the points of the declared sets.
  if (std::string(row.g).find("<= -1") != std::string::npos)
    dom_g["points"] = Json::array({Json::array({-1, 0})});
  if (std::string(row.g).find("<= 1") != std::string::npos)
    dom_g["points"] = Json::array({Json::array({1, 0})});
  if (std::string(row.g).find("<= 2") != std::string::npos)
    dom_g["points"] = Json::array({Json::array({2, 0})});
  spec["vreps"] = Json{{"dom_g", dom_g},
                       {"F_image", Json{{"points", row.img_points}, {"rays", row.img_rays}}},
                       {"dom_F", Json{{"points", kOrigin}, {"rays", kFullRays}}}};
  return spec;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  {  // 1: cubic/linear-map example and its repaired variant
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = run_builtin("ex51", detail) && run_builtin("ex51-repaired", detail);
    ok = ok && ms_since(t0) < 60000;
    report(1, "cubic outer function reproduction (ex51, ex51-repaired)", ok, detail);
  }

  {  // 2: quadratic-map example and its repaired variant
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = run_builtin("ex52", detail) && run_builtin("ex52-repaired", detail);
    ok = ok && ms_since(t0) < 120000;
    report(2, "quadratic map reproduction (ex52, ex52-repaired)", ok, detail);
  }

  {  // 3: improperness of the square-root regularization
    std::string detail;
    bool ok = run_builtin("ex53", detail);
    report(3, "square-root coupling improperness (ex53)", ok, detail);
  }

  {  // 4: non-attainment examples
    std::string detail;
    bool ok = run_builtin("nonattain-dual", detail) &&
              run_builtin("nonattain-primal", detail);
    report(4, "non-attainment reproduction (nonattain-dual, nonattain-primal)", ok,
           detail);
  }

  {  // 5: Fenchel/duality property suite over 50 randomized scenarios
    auto t0 = std::chrono::steady_clock::now();
    bool fy = true, weak = true, bicj = true, agree = true, slice = true;
    double worst_dev = 0.0;
    for (int k = 0; k < 50; ++k) {
      std::mt19937 rng(1000 + k);
      bool two_d = k % 2 == 1;
      Grid g = two_d ? g2(-3, 3, 17) : g1(-3, 3, 41);
      Grid dual = two_d ? g2(-2, 2, 15) : g1(-2, 2, 31);
      GridFn h = random_piecewise_fn(rng, g);
      fy = fy && fenchel_young_everywhere(h, dual);
      bicj = bicj && biconjugate_props(h, dual);
      agree = agree && methods_agree(h, dual, &worst_dev);

      Json spec = two_d ? random_convex_scenario_2d(rng, k)
                        : random_convex_scenario(rng, k);
      CompositeProblem p = problem_from_spec(spec);
      weak = weak && weak_duality_probes(p, rng, 3);
      slice = slice && primal_slice_conjugate_identity(p, two_d ? 0.4 : 0.8);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "FY %s, weak %s, biconj %s, methods %s (max dev %.2e), p*=f* %s, %.0f ms",
                  fy ? "ok" : "BAD", weak ? "ok" : "BAD", bicj ? "ok" : "BAD",
                  agree ? "ok" : "BAD", worst_dev, slice ? "ok" : "BAD", ms_since(t0));
    report(5, "Fenchel/duality property suite (50 scenarios)",
           fy && weak && bicj && agree && slice, buf);
  }

  {  // 6: composite chain properties
    bool order = true, equality = true, eta_ok = true, wiring = true;
    double worst_eq = 0.0;
    for (const char* name : {"ex51", "ex51-repaired", "ex52", "ex52-repaired"}) {
      CompositeProblem p = problem_from_spec(builtin_example_spec(name));
      ChainStats s = chain_inequalities(p);
      double tol = 1e-6 + default_fenchel_tol(p.g_sampled());
      order = order && s.order_ok && s.worst_direct <= tol && s.worst_tilde <= 2 * tol;
    }
    for (int k = 0; k < 10; ++k) {
      std::mt19937 rng(2000 + k);
      CompositeProblem p = problem_from_spec(random_convex_scenario(rng, k));
      ChainStats s = chain_inequalities(p);
      double tol = 1e-6 + default_fenchel_tol(p.g_sampled());
      order = order && s.order_ok && s.worst_direct <= tol && s.worst_tilde <= 2 * tol;
    }
    for (const char* name : {"ex51-repaired", "ex52-repaired"}) {
      CompositeProblem p = problem_from_spec(builtin_example_spec(name));
      bool class_ok = true;
      double dev = rho_equality_dev(p, &class_ok);
      worst_eq = std::max(worst_eq, dev);
      equality = equality && class_ok && dev <= 1e-6;
    }
    {  // eta >= rho for 10 random cones
      CompositeProblem p = problem_from_spec(builtin_example_spec("ex52"));
      DualGridResult r = rho_grid(p);
      std::mt19937 rng(77);
      std::uniform_real_distribution<double> ang(0.0, M_PI);
      for (int k = 0; k < 10; ++k) {
        Cone c = k == 0 ? Cone::zero(2)
                        : Cone(2, {{std::cos(ang(rng)), std::sin(ang(rng))},
                                   {std::cos(ang(rng)), std::sin(ang(rng))}});
        DualGridResult e = eta_grid(p, c);
        for (std::size_t i = 0; i < r.fn.size(); ++i) {
          if (r.fn[i].is_finite() && e.fn[i].is_finite() &&
              e.fn[i].value() < r.fn[i].value() - 1e-9)
            eta_ok = false;
          if (r.fn[i].is_plus_inf() && !e.fn[i].is_plus_inf()) eta_ok = false;
        }
      }
    }
    {  // eta(g, K) == rho(g_K) via the regularized conjugate identity
      for (const char* name : {"ex51", "ex52"}) {
        Json spec = builtin_example_spec(name);
        CompositeProblem p = problem_from_spec(spec);
        Cone k = Cone::named("R+x0");
        DualGridResult e = eta_grid(p, k);
        DualGridResult rg = rho_of_regularized(p, k);
        std::vector<std::size_t> de, dr;
        for (std::size_t i = 0; i < e.fn.size(); ++i) {
          if (e.trusted_finite(i)) de.push_back(i);
          if (rg.trusted_finite(i)) dr.push_back(i);
          if (e.trusted_finite(i) && rg.trusted_finite(i) &&
              std::abs(e.fn[i].value() - rg.fn[i].value()) > 1e-6)
            wiring = false;
        }
        if (!sets_match_dilated(p.v_grid(), de, dr)) wiring = false;
      }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "order %s, equality %s (max dev %.2e), eta>=rho %s, g_K wiring %s",
                  order ? "ok" : "BAD", equality ? "ok" : "BAD", worst_eq,
                  eta_ok ? "ok" : "BAD", wiring ? "ok" : "BAD");
    report(6, "composite chain property suite", order && equality && eta_ok && wiring,
           buf);
  }

  {  // 7: chain rule property suite
    bool inclusion = true, equality = true;
    for (const char* name : {"ex51", "ex51-repaired", "ex52-repaired"}) {
      CompositeProblem p = problem_from_spec(builtin_example_spec(name));
      for (double x1 : {0.0, 1.0, -1.0}) {
        ChainRuleResult r =
            chain_rule_sets(p, p.x_grid().nearest_node(Vec{x1, 0.0}), 1e-3);
        if (r.not_convex) continue;
        inclusion = inclusion && r.inclusion_ok;
      }
    }
    for (int k = 0; k < 5; ++k) {
      std::mt19937 rng(3000 + k);
      CompositeProblem p = problem_from_spec(random_convex_scenario(rng, k));
      GridFn comp = composite_fn(p);
      if (check_midpoint_convexity(comp, 1e-9).found) continue;
      for (double x1 : {0.0, 0.4, -0.8}) {
        ChainRuleResult r =
            chain_rule_sets(p, p.x_grid().nearest_node(Vec{x1}), 1e-3);
        if (r.not_convex) continue;
        inclusion = inclusion && r.inclusion_ok;
      }
    }
    {
      CompositeProblem p = problem_from_spec(builtin_example_spec("ex52-repaired"));
      for (double x1 : {0.0, 1.0, -1.0}) {
        ChainRuleResult r =
            chain_rule_sets(p, p.x_grid().nearest_node(Vec{x1, 0.0}), 1e-3);
        equality = equality && !r.not_convex && r.equality_ok;
      }
      CompositeProblem q = problem_from_spec(builtin_example_spec("ex51-repaired"));
      ChainRuleResult r = chain_rule_sets(q, q.x_grid().nearest_node(Vec{0, 0}), 1e-3);
      equality = equality && !r.not_convex && r.equality_ok;
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "inclusion %s, certified equality %s",
                  inclusion ? "ok" : "BAD", equality ? "ok" : "BAD");
    report(7, "subdifferential chain rule property suite", inclusion && equality, buf);
  }

  {  // 8: rint/membership equivalences on exact V-representation scenarios
    bool ok = true;
    std::string detail;
    for (int idx = 0; idx < 10; ++idx) {
      Json spec = lemma53_scenario(idx);
      CompositeProblem p = problem_from_spec(spec);
      ConditionReport rep = qualification_battery(p, std::nullopt);
      int rint_u = rep.verdict("zero_in_rint_U");
      int in_u = rep.verdict("zero_in_U");
      int general = rep.verdict("csgeneralf");
      int pwlq_c = rep.verdict("cspwlqf");
      bool pair_ok = rint_u != -1 && rint_u == general && in_u != -1 && in_u == pwlq_c;
      if (!pair_ok) {
        ok = false;
        detail += " [" + spec["name"].get<std::string>() + ": rintU=" +
                  std::to_string(rint_u) + " cs=" + std::to_string(general) +
                  " U=" + std::to_string(in_u) + " pwlq=" + std::to_string(pwlq_c) + "]";
      }
    }
    report(8, "membership/interior condition equivalences (10 scenarios)", ok, detail);
  }

  {  // 9: exhaustive optimality-condition equivalence scans
    bool ok = true;
    long scanned = 0;
    struct Scn {
      const char* f0;
      const char* F;
      const char* g;
    };
    const Scn scns[5] = {{"0", "x1", "abs(w1)"},
                         {"0", "x1", "max(w1, 0)"},
                         {"abs(x1)", "x1", "pow(w1,2)/2"},
                         {"0", "2*x1", "abs(w1)"},
                         {"pow(x1,2)/2", "x1", "abs(w1) + w1"}};
    for (const Scn& s : scns) {
      CompositeProblem p(FunctionExpr::parse(s.f0), FunctionExpr::parse(s.g),
                         VecMap(1, {FunctionExpr::parse(s.F)}), g1(-2, 2, 21),
                         g1(-2, 2, 21), g1(-2, 2, 21), g1(-4, 4, 41),
                         g1(-8, 8, 81));
      OptimalityScanner scan(p, 1e-9);
      for (std::size_t x = 0; x < p.x_grid().size(); ++x)
        for (std::size_t y = 0; y < p.y_grid().size(); ++y)
          for (std::size_t v = 0; v < p.v_grid().size(); ++v) {
            ++scanned;
            if (!scan.check(x, y, v).equivalent) ok = false;
          }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%ld triples scanned", scanned);
    report(9, "optimality-condition equivalence scans", ok, buf);
  }

  std::printf("%s (%d criterion failures)\n", g_failures == 0 ? "ALL PASS" : "FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}

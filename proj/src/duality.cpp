#include "compconj/duality.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace compconj {

namespace {

double dotn(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

ValueResult certify_argmin(const Grid& g, const std::vector<ExtReal>& vals,
                           double tol) {
  ValueResult r;
  for (const ExtReal& v : vals) r.value = ext_min(r.value, v);
  if (!r.value.is_finite()) return r;
  if (tol < 0) tol = default_argmin_tol(r.value);
  std::vector<std::size_t> plateau;
  bool touches_boundary = false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].is_finite() && vals[i].value() <= r.value.value() + tol) {
      plateau.push_back(i);
      if (g.on_boundary(i)) touches_boundary = true;
    }
  }
  if (touches_boundary) {
    r.boundary_suspect = true;
    r.flat_tail = true;
    return r;  // attainment undetermined, certified set stays empty
  }
  r.argmin = std::move(plateau);
  return r;
}

bool fenchel_equal(ExtReal fx, ExtReal fstar, double ip, double tol) {
  if (!fx.is_finite() || !fstar.is_finite()) return false;
  return std::abs(fx.value() + fstar.value() - ip) <= tol;
}

}  // namespace

ExtReal lagrangian(const CompositeProblem& p, std::size_t x_node, std::size_t y_node) {
  if (x_node >= p.x_grid().size() || y_node >= p.y_grid().size())
    throw NodeOutOfGrid("lagrangian node out of range");
  if (!p.x_in_dom_F(x_node)) return ExtReal::plus_inf();
  ExtReal f0v = p.f0_at(x_node);
  if (f0v.is_plus_inf()) return ExtReal::plus_inf();
  Vec fx = p.F_at(x_node);
  auto y = p.y_grid().point(y_node);
  double ip = 0.0;
  for (int a = 0; a < p.m(); ++a)
    ip += y[static_cast<size_t>(a)] * fx[static_cast<size_t>(a)];
  // A truncation-suspect g*(y) only reflects the w-box; treat it as +inf so
  // the Lagrangian drops to -inf off the reliable dual domain.
  ExtReal gs = p.g_star().suspect[y_node] ? ExtReal::plus_inf()
                                          : p.g_star().fn[y_node];
  return f0v + ExtReal::from_double(ip) - gs;
}

ExtReal f_star(const CompositeProblem& p, std::span<const double> v,
               std::span<const double> y) {
  return scalarized_conjugate_at(p, y, v, true) + p.g_star_at(y);
}

ValueResult primal_value(const CompositeProblem& p, std::span<const double> v_bar,
                         std::span<const double> u_bar, double tol) {
  PerturbationFn f(p);
  const Grid& xg = p.x_grid();
  std::vector<ExtReal> vals(xg.size());
  double pt[3];
  for (std::size_t i = 0; i < xg.size(); ++i) {
    xg.point_into(i, pt);
    double ip = dotn(v_bar, std::span<const double>(pt, v_bar.size()));
    vals[i] = f.value_at(i, u_bar) - ExtReal::from_double(ip);
  }
  return certify_argmin(xg, vals, tol);
}

ValueResult dual_value(const CompositeProblem& p, std::span<const double> v_bar,
                       std::span<const double> u_bar, double tol) {
  const Grid& yg = p.y_grid();
  std::vector<ExtReal> vals(yg.size());
  double pt[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    if (gs.is_plus_inf() || p.g_star().suspect[j]) {
      vals[j] = ExtReal::plus_inf();
      continue;
    }
    yg.point_into(j, pt);
    std::span<const double> y(pt, u_bar.size());
    double ip = dotn(u_bar, y);
    vals[j] = scalarized_conjugate_at(p, y, v_bar, true) + gs -
              ExtReal::from_double(ip);
  }
  return certify_argmin(yg, vals, tol);
}

DualityReport weak_duality_report(const CompositeProblem& p,
                                  std::span<const double> v_bar,
                                  std::span<const double> u_bar, double tol) {
  DualityReport r;
  r.v_bar = Vec(v_bar.begin(), v_bar.end());
  r.u_bar = Vec(u_bar.begin(), u_bar.end());
  ValueResult pv = primal_value(p, v_bar, u_bar, tol);
  ValueResult qv = dual_value(p, v_bar, u_bar, tol);
  r.p_val = pv.value;
  r.q_val = qv.value;
  r.gap = pv.value + qv.value;
  r.P_set = pv.argmin;
  r.Q_set = qv.argmin;
  r.primal_attained = !pv.argmin.empty();
  r.dual_attained = !qv.argmin.empty();
  r.boundary_suspect = pv.boundary_suspect || qv.boundary_suspect;
  r.weak_ok = r.gap.is_plus_inf() ||
              (r.gap.is_finite() && r.gap.value() >= -tol);
  r.strong_eq = r.gap.is_finite() && std::abs(r.gap.value()) <= tol;
  return r;
}

OptimalityScanner::OptimalityScanner(const CompositeProblem& p, double tol)
    : p_(&p), tol_(tol), comp_(composite_fn(p)) {
  TransformConfig cfg;
  cfg.dual_grid = p.v_grid();
  comp_star_ = conjugate(comp_, cfg);
  const Grid& yg = p.y_grid();
  cand_.resize(yg.size());
  scal_.resize(yg.size());
  double yp[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    GridFn s = scalarized_sample(p, y, true);
    scal_[j].assign(s.values().begin(), s.values().end());
    if (gs.is_plus_inf()) {
      cand_[j].assign(p.v_grid().size(), ExtReal::plus_inf());
      continue;
    }
    GridFn c = conjugate(s, cfg);
    cand_[j].resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) cand_[j][i] = c[i] + gs;
  }
  g_of_Fx_.resize(p.x_grid().size());
  for (std::size_t i = 0; i < p.x_grid().size(); ++i) {
    if (!p.x_in_dom_F(i)) {
      g_of_Fx_[i] = ExtReal::plus_inf();
      continue;
    }
    Vec fx = p.F_at(i);
    g_of_Fx_[i] = p.g_eval(fx);
  }
}

OptimalityCheck OptimalityScanner::check(std::size_t x_node, std::size_t y_node,
                                         std::size_t v_node) const {
  OptimalityCheck c;
  const CompositeProblem& p = *p_;
  auto x = p.x_grid().point(x_node);
  auto v = p.v_grid().point(v_node);
  auto y = p.y_grid().point(y_node);
  double vx = 0.0;
  for (int a = 0; a < p.n(); ++a)
    vx += v[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];

  c.eq15a = fenchel_equal(comp_[x_node], comp_star_[v_node], vx, tol_);
  ExtReal cand = cand_[y_node][v_node];
  c.eq15b = comp_star_[v_node].is_finite() && cand.is_finite() &&
            std::abs(comp_star_[v_node].value() - cand.value()) <= tol_;

  ExtReal gs = p.g_star().fn[y_node];
  ExtReal gFx = g_of_Fx_[x_node];
  double yFx = 0.0;
  if (p.x_in_dom_F(x_node)) {
    Vec fx = p.F_at(x_node);
    for (int a = 0; a < p.m(); ++a)
      yFx += y[static_cast<size_t>(a)] * fx[static_cast<size_t>(a)];
  }
  c.eq16a = p.x_in_dom_F(x_node) && fenchel_equal(gFx, gs, yFx, tol_);
  ExtReal scal_star = cand - gs;  // (f0+<y,F>)*(v) recovered from the table
  c.eq16b = fenchel_equal(scal_[y_node][x_node], scal_star, vx, tol_);

  c.eq15 = c.eq15a && c.eq15b;
  c.eq16 = c.eq16a && c.eq16b;
  c.equivalent = c.eq15 == c.eq16;
  return c;
}

OptimalityCheck optimality_equivalence_check(const CompositeProblem& p,
                                             std::size_t v_node, std::size_t x_node,
                                             std::size_t y_node, double tol) {
  OptimalityScanner scanner(p, tol);
  return scanner.check(x_node, y_node, v_node);
}

ChainRuleResult chain_rule_sets(const CompositeProblem& p, std::size_t x_node,
                                double tol) {
  ChainRuleResult r;
  GridFn comp = composite_fn(p);
  if (tol < 0) tol = default_fenchel_tol(comp);
  if (check_midpoint_convexity(comp, tol).found) {
    r.not_convex = true;
    return r;
  }
  TransformConfig cfg;
  cfg.dual_grid = p.v_grid();
  GridFn comp_star = conjugate(comp, cfg);
  r.lhs = subdifferential(comp, comp_star, x_node, tol);

  // ∂g(F(x)) over the y-grid, with g(F(x)) evaluated exactly.
  if (!p.x_in_dom_F(x_node)) return r;
  Vec fx = p.F_at(x_node);
  ExtReal gFx = p.g_eval(fx);
  if (gFx.is_finite()) {
    const Grid& yg = p.y_grid();
    double yp[3];
    for (std::size_t j = 0; j < yg.size(); ++j) {
      ExtReal gs = p.g_star().fn[j];
      if (!gs.is_finite()) continue;
      yg.point_into(j, yp);
      double ip = dotn(std::span<const double>(yp, static_cast<size_t>(p.m())), fx);
      if (gFx.value() + gs.value() - ip <= tol) r.dgF.push_back(j);
    }
  }

  std::set<std::size_t> rhs;
  std::set<std::size_t> union_scal;  // ∪ ∂<y,F>(x) for the Minkowski form
  double yp[3];
  for (std::size_t j : r.dgF) {
    p.y_grid().point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    GridFn s = scalarized_sample(p, y, true);
    GridFn s_star = conjugate(s, cfg);
    for (std::size_t v : subdifferential(s, s_star, x_node, tol)) rhs.insert(v);
    if (!p.f0_is_zero()) {
      GridFn sy = scalarize(p, y);
      GridFn sy_star = conjugate(sy, cfg);
      for (std::size_t v : subdifferential(sy, sy_star, x_node, tol))
        union_scal.insert(v);
    }
  }
  r.rhs.assign(rhs.begin(), rhs.end());

  if (!p.f0_is_zero()) {
    GridFn f0s = sample(p.f0_expr(), p.x_grid());
    GridFn f0_star = conjugate(f0s, cfg);
    std::vector<std::size_t> df0 = subdifferential(f0s, f0_star, x_node, tol);
    // Grid Minkowski sum: node-snap a+b within half a spacing.
    std::set<std::size_t> mink;
    const Grid& vg = p.v_grid();
    for (std::size_t a : df0) {
      auto pa = vg.point(a);
      for (std::size_t b : union_scal) {
        auto pb = vg.point(b);
        Vec sum(static_cast<size_t>(p.n()));
        for (int c = 0; c < p.n(); ++c)
          sum[static_cast<size_t>(c)] =
              pa[static_cast<size_t>(c)] + pb[static_cast<size_t>(c)];
        try {
          mink.insert(vg.nearest_node(sum));
        } catch (const NodeOutOfGrid&) {
        }
      }
    }
    r.minkowski.assign(mink.begin(), mink.end());
  }

  r.inclusion_ok = subset_of(r.rhs, dilate_nodes(p.v_grid(), r.lhs));
  r.equality_ok =
      r.inclusion_ok && subset_of(r.lhs, dilate_nodes(p.v_grid(), r.rhs));
  return r;
}

}  // namespace compconj

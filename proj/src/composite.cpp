#include "compconj/composite.hpp"

#include <algorithm>
#include <cmath>

namespace compconj {

namespace {
double dotn(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace

VecMap::VecMap(int n, std::vector<FunctionExpr> components, std::string guard)
    : n_(n), components_(std::move(components)), guard_text_(std::move(guard)) {
  if (components_.empty()) throw std::invalid_argument("VecMap needs components");
  for (const FunctionExpr& c : components_)
    if (c.arity() > n_) throw ArityMismatch("component arity exceeds n");
  if (!guard_text_.empty()) {
    guard_ = FunctionExpr::parse("0 if " + guard_text_ + " else +inf");
    if (guard_.arity() > n_) throw ArityMismatch("guard arity exceeds n");
  }
}

VecMap VecMap::identity(int n) {
  std::vector<FunctionExpr> comps;
  for (int i = 1; i <= n; ++i) comps.push_back(FunctionExpr::parse("x" + std::to_string(i)));
  return VecMap(n, std::move(comps));
}

bool VecMap::in_domain(std::span<const double> x) const {
  if (!guard_.empty() && !guard_.eval(x).is_finite()) return false;
  for (const FunctionExpr& c : components_)
    if (!c.eval(x).is_finite()) return false;
  return true;
}

std::optional<Vec> VecMap::eval(std::span<const double> x) const {
  if (!guard_.empty() && !guard_.eval(x).is_finite()) return std::nullopt;
  Vec out(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    ExtReal v = components_[i].eval(x);
    if (!v.is_finite()) return std::nullopt;
    out[i] = v.value();
  }
  return out;
}

CompositeProblem::CompositeProblem(FunctionExpr f0, FunctionExpr g, VecMap F,
                                   Grid x_grid, Grid u_grid, Grid v_grid,
                                   Grid y_grid, std::optional<Grid> w_grid,
                                   ProblemFlags flags)
    : f0_(std::move(f0)),
      g_(std::move(g)),
      F_(std::move(F)),
      x_grid_(std::move(x_grid)),
      u_grid_(std::move(u_grid)),
      v_grid_(std::move(v_grid)),
      y_grid_(std::move(y_grid)),
      w_grid_(w_grid ? std::move(*w_grid) : u_grid_),
      flags_(flags) {
  const int n = x_grid_.dim();
  const int m = F_.m();
  if (F_.n() != n) throw DimensionMismatch("F input dimension != x-grid dimension");
  if (v_grid_.dim() != n) throw DimensionMismatch("v-grid must match x-grid dimension");
  if (u_grid_.dim() != m || y_grid_.dim() != m || w_grid_.dim() != m)
    throw DimensionMismatch("u/w/y grids must live in R^m");
  if (f0_.arity() > n) throw ArityMismatch("f0 arity exceeds n");
  if (g_.arity() > m) throw ArityMismatch("g arity exceeds m");

  f0_values_.resize(x_grid_.size());
  dom_mask_.assign(x_grid_.size(), 0);
  F_values_.assign(static_cast<size_t>(m), std::vector<double>(x_grid_.size(), 0.0));
  f0_zero_ = true;
  bool any_dom = false;
  double pt[3];
  for (std::size_t i = 0; i < x_grid_.size(); ++i) {
    x_grid_.point_into(i, pt);
    std::span<const double> x(pt, static_cast<size_t>(n));
    f0_values_[i] = f0_.eval(x);
    if (!(f0_values_[i].is_finite() && f0_values_[i].value() == 0.0)) f0_zero_ = false;
    auto Fx = F_.eval(x);
    if (Fx) {
      dom_mask_[i] = 1;
      for (int c = 0; c < m; ++c)
        F_values_[static_cast<size_t>(c)][i] = (*Fx)[static_cast<size_t>(c)];
      if (!f0_values_[i].is_plus_inf()) any_dom = true;
    }
  }
  if (!any_dom)
    throw std::invalid_argument("dom(f0) ∩ dom(F) misses the x-grid entirely");

  g_sampled_ = sample(g_, w_grid_);
  TransformConfig cfg;
  cfg.dual_grid = y_grid_;
  g_star_ = conjugate_full(g_sampled_, cfg);
}

Vec CompositeProblem::F_at(std::size_t x_node) const {
  Vec out(static_cast<size_t>(m()));
  for (int c = 0; c < m(); ++c)
    out[static_cast<size_t>(c)] = F_values_[static_cast<size_t>(c)][x_node];
  return out;
}

ExtReal CompositeProblem::g_star_at(std::span<const double> y) const {
  return conjugate_at(g_sampled_, y);
}

ExtReal CompositeProblem::g_eval(std::span<const double> w) const {
  return g_.eval(w);
}

GridFn scalarize(const CompositeProblem& p, std::span<const double> y) {
  if (static_cast<int>(y.size()) != p.m())
    throw DimensionMismatch("scalarize: y must live in R^m");
  std::vector<ExtReal> vals(p.x_grid_.size());
  for (std::size_t i = 0; i < p.x_grid_.size(); ++i) {
    if (!p.dom_mask_[i]) {
      vals[i] = ExtReal::plus_inf();
      continue;
    }
    double s = 0.0;
    for (int c = 0; c < p.m(); ++c)
      s += y[static_cast<size_t>(c)] * p.F_values_[static_cast<size_t>(c)][i];
    vals[i] = ExtReal::from_double(s);
  }
  return GridFn(p.x_grid_, std::move(vals));
}

GridFn scalarized_sample(const CompositeProblem& p, std::span<const double> y,
                         bool include_f0) {
  GridFn s = scalarize(p, y);
  if (!include_f0 || p.f0_is_zero()) return s;
  for (std::size_t i = 0; i < s.size(); ++i) s.at(i) = s[i] + p.f0_values()[i];
  return s;
}

ExtReal scalarized_conjugate_at(const CompositeProblem& p, std::span<const double> y,
                                std::span<const double> v, bool include_f0) {
  const Grid& xg = p.x_grid();
  ExtReal best = ExtReal::minus_inf();
  double pt[3];
  for (std::size_t i = 0; i < xg.size(); ++i) {
    if (!p.x_in_dom_F(i)) continue;
    ExtReal f0v = include_f0 ? p.f0_at(i) : ExtReal::finite(0.0);
    if (f0v.is_plus_inf()) continue;
    xg.point_into(i, pt);
    std::span<const double> x(pt, static_cast<size_t>(xg.dim()));
    Vec fx = p.F_at(i);
    double s = dotn(v, x);
    for (int c = 0; c < p.m(); ++c)
      s -= y[static_cast<size_t>(c)] * fx[static_cast<size_t>(c)];
    ExtReal cand = ExtReal::from_double(s) - f0v;
    best = ext_max(best, cand);
  }
  if (best.is_finite() && best.value() > kInfCap) return ExtReal::plus_inf();
  return best;
}

GridFn composite_fn(const CompositeProblem& p) {
  const Grid& xg = p.x_grid();
  std::vector<ExtReal> vals(xg.size());
  for (std::size_t i = 0; i < xg.size(); ++i) {
    if (!p.x_in_dom_F(i)) {
      vals[i] = ExtReal::plus_inf();
      continue;
    }
    Vec fx = p.F_at(i);
    vals[i] = p.f0_at(i) + p.g_eval(fx);
  }
  return GridFn(xg, std::move(vals));
}

ExtReal PerturbationFn::value_at(std::size_t x_node, std::span<const double> u) const {
  if (!p_->x_in_dom_F(x_node)) return ExtReal::plus_inf();
  Vec fx = p_->F_at(x_node);
  for (std::size_t c = 0; c < fx.size(); ++c) fx[c] += u[c];
  return p_->f0_at(x_node) + p_->g_eval(fx);
}

ExtReal PerturbationFn::value(std::size_t x_node, std::size_t u_node) const {
  auto u = p_->u_grid().point(u_node);
  return value_at(x_node,
                  std::span<const double>(u.data(), static_cast<size_t>(p_->m())));
}

GridFn PerturbationFn::u0_slice() const {
  Vec zero(static_cast<size_t>(p_->m()), 0.0);
  const Grid& xg = p_->x_grid();
  std::vector<ExtReal> vals(xg.size());
  for (std::size_t i = 0; i < xg.size(); ++i)
    vals[i] = value_at(i, zero);
  return GridFn(xg, std::move(vals));
}

namespace {

struct GridMinState {
  std::vector<ExtReal> val;
  std::vector<std::uint8_t> flag;
  std::vector<std::size_t> arg;
  bool saw_candidate = false;

  explicit GridMinState(std::size_t n)
      : val(n, ExtReal::plus_inf()), flag(n, 0), arg(n, SIZE_MAX) {}

  void offer(std::size_t i, ExtReal cand, bool cand_flag, std::size_t j) {
    if (cand.is_plus_inf()) return;
    double tie = 1e-12;
    if (val[i].is_finite()) tie = 1e-12 * (1.0 + std::abs(val[i].value()));
    bool better = cand < val[i];
    bool tied = cand.is_finite() && val[i].is_finite() &&
                std::abs(cand.value() - val[i].value()) <= tie;
    if (better || (tied && flag[i] != 0 && !cand_flag)) {
      val[i] = cand;
      flag[i] = cand_flag ? 1 : 0;
      arg[i] = j;
    }
  }
};

// Shared core of rho_grid and eta_grid.
DualGridResult dual_grid_core(const CompositeProblem& p, bool include_f0,
                              const Cone* restrict_minus_polar) {
  const Grid& vg = p.v_grid();
  const Grid& yg = p.y_grid();
  GridMinState st(vg.size());
  TransformConfig cfg;
  cfg.dual_grid = vg;
  double yp[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    if (gs.is_plus_inf() || p.g_star().suspect[j]) continue;
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    if (restrict_minus_polar && !contains(*restrict_minus_polar, y)) continue;
    GridFn s = scalarized_sample(p, y, include_f0);
    ConjugateResult c = conjugate_full(s, cfg);
    st.saw_candidate = true;
    for (std::size_t i = 0; i < vg.size(); ++i)
      st.offer(i, c.fn[i] + gs, c.is_suspect(i), j);
  }
  return DualGridResult{GridFn(vg, std::move(st.val)), std::move(st.flag),
                        std::move(st.arg)};
}

struct PointMinState {
  ExtReal best = ExtReal::plus_inf();
  std::vector<std::size_t> arg_nodes;
  bool any_candidate = false;
  bool any_finite = false;
};

RhoPointResult point_result_from(const CompositeProblem& p, PointMinState& st) {
  RhoPointResult r;
  r.value = st.best;
  r.all_plus_inf = st.any_candidate && !st.any_finite;
  const Grid& yg = p.y_grid();
  for (std::size_t j : st.arg_nodes) {
    auto yp = yg.point(j);
    r.minimizers.push_back(Vec(yp.begin(), yp.begin() + p.m()));
    if (yg.on_boundary(j)) r.boundary_suspect = true;
  }
  return r;
}

}  // namespace

RhoPointResult rho(const CompositeProblem& p, std::span<const double> v_bar,
                   double tol) {
  const Grid& yg = p.y_grid();
  PointMinState st;
  std::vector<ExtReal> vals(yg.size(), ExtReal::plus_inf());
  double yp[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    // Truncation-suspect g*(y) values reflect the w-box rather than g; such
    // candidates are unusable and count as +inf.
    if (gs.is_plus_inf() || p.g_star().suspect[j]) continue;
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    ExtReal cand = scalarized_conjugate_at(p, y, v_bar, true) + gs;
    vals[j] = cand;
    st.any_candidate = true;
    if (!cand.is_plus_inf()) st.any_finite = true;
    st.best = ext_min(st.best, cand);
  }
  double use_tol = tol >= 0 ? tol : default_argmin_tol(st.best);
  if (st.best.is_finite()) {
    for (std::size_t j = 0; j < yg.size(); ++j)
      if (vals[j].is_finite() && vals[j].value() <= st.best.value() + use_tol)
        st.arg_nodes.push_back(j);
  }
  RhoPointResult r = point_result_from(p, st);

  // One refinement pass: 3x finer box around the incumbent minimizer.
  r.refined_value = r.value;
  if (!r.minimizers.empty() && r.value.is_finite()) {
    const Vec& y0 = r.minimizers.front();
    r.refined_minimizer = y0;
    std::vector<Axis> axes;
    for (int a = 0; a < p.m(); ++a) {
      double d = yg.spacing(a);
      axes.push_back(Axis{y0[static_cast<size_t>(a)] - d,
                          y0[static_cast<size_t>(a)] + d, 7});
    }
    Grid fine(axes);
    double fp[3];
    for (std::size_t j = 0; j < fine.size(); ++j) {
      fine.point_into(j, fp);
      std::span<const double> y(fp, static_cast<size_t>(p.m()));
      ExtReal gs = p.g_star_at(y);
      if (gs.is_plus_inf()) continue;
      ExtReal cand = scalarized_conjugate_at(p, y, v_bar, true) + gs;
      if (cand < r.refined_value) {
        r.refined_value = cand;
        r.refined_minimizer = Vec(y.begin(), y.end());
      }
    }
  }
  return r;
}

DualGridResult rho_grid(const CompositeProblem& p) {
  return dual_grid_core(p, true, nullptr);
}

RhoPointResult eta(const CompositeProblem& p, const Cone& k,
                   std::span<const double> v_bar, double tol) {
  if (!p.f0_is_zero())
    throw std::invalid_argument("eta requires f0 identically zero");
  Cone minus_polar = polar(k).negated();
  const Grid& yg = p.y_grid();
  PointMinState st;
  double yp[3];
  std::vector<ExtReal> vals(yg.size(), ExtReal::plus_inf());
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    if (gs.is_plus_inf() || p.g_star().suspect[j]) continue;
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    if (!contains(minus_polar, y)) continue;
    ExtReal cand = scalarized_conjugate_at(p, y, v_bar, false) + gs;
    vals[j] = cand;
    st.any_candidate = true;
    if (!cand.is_plus_inf()) st.any_finite = true;
    st.best = ext_min(st.best, cand);
  }
  double use_tol = tol >= 0 ? tol : default_argmin_tol(st.best);
  if (st.best.is_finite()) {
    for (std::size_t j = 0; j < yg.size(); ++j)
      if (vals[j].is_finite() && vals[j].value() <= st.best.value() + use_tol)
        st.arg_nodes.push_back(j);
  }
  RhoPointResult r = point_result_from(p, st);
  r.refined_value = r.value;
  return r;
}

DualGridResult eta_grid(const CompositeProblem& p, const Cone& k) {
  if (!p.f0_is_zero())
    throw std::invalid_argument("eta requires f0 identically zero");
  Cone minus_polar = polar(k).negated();
  return dual_grid_core(p, false, &minus_polar);
}

RhoTildePointResult rho_tilde(const CompositeProblem& p,
                              std::span<const double> v_bar) {
  const Grid& vg = p.v_grid();
  const Grid& yg = p.y_grid();
  RhoTildePointResult r;

  if (p.f0_is_zero()) {
    // f0* collapses the w-infimum at w = 0 (grid f0* is the box support
    // function, which the slope bound keeps above the w = 0 candidate).
    RhoPointResult rp = rho(p, v_bar);
    r.value = rp.value;
    if (!rp.minimizers.empty()) r.minimizer_y = rp.minimizers.front();
    r.minimizer_w = Vec(static_cast<size_t>(p.n()), 0.0);
    return r;
  }

  GridFn f0s = sample(p.f0_expr(), p.x_grid());
  TransformConfig cfg;
  cfg.dual_grid = vg;
  ConjugateResult f0star = conjugate_full(f0s, cfg);

  double yp[3], wp[3], diff[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    if (gs.is_plus_inf() || p.g_star().suspect[j]) continue;
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    ConjugateResult c = conjugate_full(scalarize(p, y), cfg);
    for (std::size_t wi = 0; wi < vg.size(); ++wi) {
      if (f0star.fn[wi].is_plus_inf()) continue;
      vg.point_into(wi, wp);
      for (int a = 0; a < p.n(); ++a) diff[a] = v_bar[static_cast<size_t>(a)] - wp[a];
      ExtReal mid = c.fn.interpolate(
          std::span<const double>(diff, static_cast<size_t>(p.n())));
      ExtReal cand = f0star.fn[wi] + mid + gs;
      if (cand < r.value) {
        r.value = cand;
        r.minimizer_y = Vec(yp, yp + p.m());
        r.minimizer_w = Vec(wp, wp + p.n());
      }
    }
  }
  return r;
}

DualGridResult rho_tilde_grid(const CompositeProblem& p) {
  const Grid& vg = p.v_grid();
  bool zero_on_grid = true;
  Vec zero(static_cast<size_t>(p.n()), 0.0);
  try {
    vg.nearest_node(zero);
  } catch (const NodeOutOfGrid&) {
    zero_on_grid = false;
  }
  if (p.f0_is_zero() && zero_on_grid) return rho_grid(p);

  GridFn f0s = sample(p.f0_expr(), p.x_grid());
  TransformConfig cfg;
  cfg.dual_grid = vg;
  ConjugateResult f0star = conjugate_full(f0s, cfg);

  GridMinState st(vg.size());
  const Grid& yg = p.y_grid();
  double yp[3];
  for (std::size_t j = 0; j < yg.size(); ++j) {
    ExtReal gs = p.g_star().fn[j];
    if (gs.is_plus_inf() || p.g_star().suspect[j]) continue;
    yg.point_into(j, yp);
    std::span<const double> y(yp, static_cast<size_t>(p.m()));
    ConjugateResult c = conjugate_full(scalarize(p, y), cfg);
    GridFn conv = inf_convolution(f0star.fn, c.fn);
    for (std::size_t i = 0; i < vg.size(); ++i) st.offer(i, conv[i] + gs, false, j);
  }
  return DualGridResult{GridFn(vg, std::move(st.val)), std::move(st.flag),
                        std::move(st.arg)};
}

SampledSet u_set(const CompositeProblem& p) {
  SampledSet s;
  if (p.dom_g_vrep && p.f_image_vrep) {
    s.tag = SampledSet::Tag::ExactVRep;
    s.vrep = vrep_diff(*p.dom_g_vrep, *p.f_image_vrep);
  }
  // Point cloud in every case (diagnostics even in exact mode).
  std::vector<std::size_t> wdom;
  for (std::size_t i = 0; i < p.g_sampled().size(); ++i)
    if (!p.g_sampled()[i].is_plus_inf()) wdom.push_back(i);
  std::vector<std::size_t> xdom;
  for (std::size_t i = 0; i < p.x_grid().size(); ++i)
    if (p.x_in_dom_F(i) && !p.f0_at(i).is_plus_inf()) xdom.push_back(i);
  auto strided = [](std::vector<std::size_t>& v, std::size_t cap) {
    if (v.size() <= cap) return;
    std::vector<std::size_t> out;
    double step = static_cast<double>(v.size()) / static_cast<double>(cap);
    for (std::size_t k = 0; k < cap; ++k)
      out.push_back(v[static_cast<std::size_t>(k * step)]);
    v = std::move(out);
  };
  strided(wdom, 200);
  strided(xdom, 200);
  const int m = p.m();
  for (std::size_t wi : wdom) {
    auto w = p.w_grid().point(wi);
    for (std::size_t xi : xdom) {
      Vec fx = p.F_at(xi);
      Vec d(static_cast<size_t>(m));
      for (int a = 0; a < m; ++a)
        d[static_cast<size_t>(a)] = w[static_cast<size_t>(a)] - fx[static_cast<size_t>(a)];
      s.points.push_back(std::move(d));
    }
  }
  std::sort(s.points.begin(), s.points.end());
  s.points.erase(std::unique(s.points.begin(), s.points.end()), s.points.end());
  return s;
}

}  // namespace compconj

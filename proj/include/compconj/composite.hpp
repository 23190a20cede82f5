#pragma once

#include <optional>
#include <string>

#include "compconj/cones.hpp"
#include "compconj/conjugate.hpp"
#include "compconj/expr.hpp"
#include "compconj/vrep.hpp"

namespace compconj {

// F: R^n -> R^m ∪ {+inf_bullet}. Components are expressions over x; nodes
// failing the domain guard map to the infinite element.
class VecMap {
 public:
  VecMap() = default;
  VecMap(int n, std::vector<FunctionExpr> components, std::string guard = "");
  static VecMap identity(int n);

  int n() const { return n_; }
  int m() const { return static_cast<int>(components_.size()); }
  bool in_domain(std::span<const double> x) const;
  // nullopt encodes +inf_bullet.
  std::optional<Vec> eval(std::span<const double> x) const;
  const std::vector<FunctionExpr>& components() const { return components_; }
  const std::string& guard_text() const { return guard_text_; }

 private:
  int n_ = 0;
  std::vector<FunctionExpr> components_;
  FunctionExpr guard_;  // evaluates finite iff the guard holds
  std::string guard_text_;
};

struct ProblemFlags {
  bool polyhedral_domg = false;
  bool polyhedral_F = false;
  bool pwlq_f = false;
  bool f_gamma0_declared = false;
};

// Composite problem f0 + g∘F with its grids and cached samples. x and v
// grids live in R^n; u, w and y grids in R^m. Construction fails when
// dom(f0) ∩ dom(F) misses the x-grid entirely.
class CompositeProblem {
 public:
  CompositeProblem(FunctionExpr f0, FunctionExpr g, VecMap F, Grid x_grid,
                   Grid u_grid, Grid v_grid, Grid y_grid,
                   std::optional<Grid> w_grid = std::nullopt,
                   ProblemFlags flags = {});

  const VecMap& F() const { return F_; }
  const FunctionExpr& f0_expr() const { return f0_; }
  const FunctionExpr& g_expr() const { return g_; }
  const Grid& x_grid() const { return x_grid_; }
  const Grid& u_grid() const { return u_grid_; }
  const Grid& v_grid() const { return v_grid_; }
  const Grid& y_grid() const { return y_grid_; }
  const Grid& w_grid() const { return w_grid_; }
  const ProblemFlags& flags() const { return flags_; }

  int n() const { return x_grid_.dim(); }
  int m() const { return F_.m(); }

  bool f0_is_zero() const { return f0_zero_; }
  const std::vector<ExtReal>& f0_values() const { return f0_values_; }
  ExtReal f0_at(std::size_t x_node) const { return f0_values_[x_node]; }
  bool x_in_dom_F(std::size_t x_node) const { return dom_mask_[x_node] != 0; }
  // F(x) at a domain node (component values cached).
  Vec F_at(std::size_t x_node) const;

  const GridFn& g_sampled() const { return g_sampled_; }
  // g* on the y-grid (FastLLT of the w-grid sample).
  const ConjugateResult& g_star() const { return g_star_; }
  // g* at an arbitrary dual point (pointwise sup over the w-grid).
  ExtReal g_star_at(std::span<const double> y) const;
  // g by exact expression evaluation.
  ExtReal g_eval(std::span<const double> w) const;

  // Optional exact set declarations consumed by the qualification battery.
  std::optional<VRepSet> dom_g_vrep;
  std::optional<VRepSet> f_image_vrep;       // F(dom f0 ∩ dom F)
  std::optional<VRepSet> f_image_rint_vrep;  // F(rint dom F) when different
  std::optional<VRepSet> dom_f0_vrep;
  std::optional<VRepSet> dom_F_vrep;

 private:
  FunctionExpr f0_, g_;
  VecMap F_;
  Grid x_grid_, u_grid_, v_grid_, y_grid_, w_grid_;
  ProblemFlags flags_;
  std::vector<ExtReal> f0_values_;
  std::vector<std::uint8_t> dom_mask_;
  std::vector<std::vector<double>> F_values_;  // per component, dom nodes only valid
  GridFn g_sampled_;
  ConjugateResult g_star_;
  bool f0_zero_ = false;

  friend GridFn scalarize(const CompositeProblem& p, std::span<const double> y);
  friend class PerturbationFn;
};

// <y,F>(x) on the x-grid: <y,F(x)> over dom(F), +inf outside.
GridFn scalarize(const CompositeProblem& p, std::span<const double> y);

// f0 + <y,F> sampled on the x-grid (f0 skipped when include_f0 is false).
GridFn scalarized_sample(const CompositeProblem& p, std::span<const double> y,
                         bool include_f0);

// (f0 + <y,F>)*(v) pointwise: sup over x-grid nodes of <v,x> - f0(x) - <y,F(x)>.
ExtReal scalarized_conjugate_at(const CompositeProblem& p, std::span<const double> y,
                                std::span<const double> v, bool include_f0 = true);

// f0(x) + g(F(x)) with g evaluated exactly at F(x); +inf off dom(f0)∩dom(F).
GridFn composite_fn(const CompositeProblem& p);

// f(x,u) = f0(x) + g(F(x)+u), evaluated on demand (the bivariate sample can
// be too large to materialize for 2-D x 2-D problems).
class PerturbationFn {
 public:
  explicit PerturbationFn(const CompositeProblem& p) : p_(&p) {}
  ExtReal value(std::size_t x_node, std::size_t u_node) const;
  ExtReal value_at(std::size_t x_node, std::span<const double> u) const;
  // u = 0 slice; equals composite_fn exactly when 0 is a u-grid node.
  GridFn u0_slice() const;

 private:
  const CompositeProblem* p_;
};

struct RhoPointResult {
  ExtReal value = ExtReal::plus_inf();
  std::vector<Vec> minimizers;     // y points within tolerance of the inf
  bool boundary_suspect = false;   // a minimizer sits on the y-grid boundary
  bool all_plus_inf = false;       // every candidate evaluated to +inf
  ExtReal refined_value = ExtReal::plus_inf();
  Vec refined_minimizer;
};

struct DualGridResult {
  GridFn fn;
  std::vector<std::uint8_t> suspect;
  std::vector<std::size_t> argmin_y;  // y-node per v-node, SIZE_MAX when none

  bool trusted_finite(std::size_t i) const {
    return fn[i].is_finite() && suspect[i] == 0;
  }
};

// rho(v) = inf_y (f0 + <y,F>)*(v) + g*(y) over the y-grid, with one 3x
// refinement pass around the incumbent minimizer for the point version.
RhoPointResult rho(const CompositeProblem& p, std::span<const double> v_bar,
                   double tol = -1.0);
DualGridResult rho_grid(const CompositeProblem& p);

// rho~(v) = inf_{y,w} f0*(w) + (<y,F>)*(v-w) + g*(y); w runs over the v-grid
// and v-w is looked up by interpolation. Never below rho - tol.
struct RhoTildePointResult {
  ExtReal value = ExtReal::plus_inf();
  Vec minimizer_y, minimizer_w;
};
RhoTildePointResult rho_tilde(const CompositeProblem& p, std::span<const double> v_bar);
DualGridResult rho_tilde_grid(const CompositeProblem& p);

// eta(v) = inf over y in -K° of (<y,F>)*(v) + g*(y). Requires f0 ≡ 0.
RhoPointResult eta(const CompositeProblem& p, const Cone& k,
                   std::span<const double> v_bar, double tol = -1.0);
DualGridResult eta_grid(const CompositeProblem& p, const Cone& k);

// U = dom(g) - F(dom(f0) ∩ dom(F)); exact V-representation when both
// factors are declared, sampled point cloud otherwise.
struct SampledSet {
  enum class Tag { ExactVRep, PointCloud };
  Tag tag = Tag::PointCloud;
  std::vector<Vec> points;
  std::optional<VRepSet> vrep;
};
SampledSet u_set(const CompositeProblem& p);

}  // namespace compconj

#pragma once

#include "compconj/composite.hpp"

namespace compconj {

// Optimal value over grid nodes plus attainment certification. The argmin
// plateau (finite values within tol of the minimum) is certified only when it
// stays clear of the grid boundary; a plateau touching the boundary reports
// an empty set with boundary_suspect, since the grid cannot distinguish a
// boundary minimum from an infimum escaping to infinity.
struct ValueResult {
  ExtReal value = ExtReal::plus_inf();
  std::vector<std::size_t> argmin;  // certified nodes
  bool boundary_suspect = false;
  bool flat_tail = false;  // argmin plateau reaches the boundary
};

struct DualityReport {
  Vec v_bar, u_bar;
  ExtReal p_val, q_val;  // q is the negative of the dual value
  ExtReal gap;           // p_val + q_val; weak duality makes it >= 0
  std::vector<std::size_t> P_set, Q_set;
  bool weak_ok = false;
  bool strong_eq = false;
  bool primal_attained = false;
  bool dual_attained = false;
  bool boundary_suspect = false;
};

// l(x,y) = f0(x) + <y,F(x)> - g*(y) with inf-addition; +inf when x leaves
// dom(f0) ∩ dom(F).
ExtReal lagrangian(const CompositeProblem& p, std::size_t x_node, std::size_t y_node);

// f*(v,y) = (f0 + <y,F>)*(v) + g*(y), at arbitrary points.
ExtReal f_star(const CompositeProblem& p, std::span<const double> v,
               std::span<const double> y);

// p_v(u) = inf_x f(x,u) - <v,x> over the x-grid (f evaluated exactly).
ValueResult primal_value(const CompositeProblem& p, std::span<const double> v_bar,
                         std::span<const double> u_bar, double tol = -1.0);

// q_u(v) = inf_y f*(v,y) - <u,y> over the y-grid.
ValueResult dual_value(const CompositeProblem& p, std::span<const double> v_bar,
                       std::span<const double> u_bar, double tol = -1.0);

DualityReport weak_duality_report(const CompositeProblem& p,
                                  std::span<const double> v_bar,
                                  std::span<const double> u_bar, double tol);

struct OptimalityCheck {
  bool eq15a = false, eq15b = false;  // composite Fenchel equality; conjugate split
  bool eq16a = false, eq16b = false;  // g-Fenchel at F(x); scalarized Fenchel
  bool eq15 = false, eq16 = false;
  bool equivalent = false;  // eq15 == eq16
};

// Precomputed tables for exhaustive (x,y,v) optimality scans.
class OptimalityScanner {
 public:
  explicit OptimalityScanner(const CompositeProblem& p, double tol);
  OptimalityCheck check(std::size_t x_node, std::size_t y_node,
                        std::size_t v_node) const;
  double tol() const { return tol_; }

 private:
  const CompositeProblem* p_;
  double tol_;
  GridFn comp_;
  GridFn comp_star_;
  std::vector<std::vector<ExtReal>> cand_;   // per y node: (f0+<y,F>)*(v)+g*(y)
  std::vector<std::vector<ExtReal>> scal_;   // per y node: (f0+<y,F>)(x)
  std::vector<ExtReal> g_of_Fx_;             // g(F(x)) exact, per x node
};

OptimalityCheck optimality_equivalence_check(const CompositeProblem& p,
                                             std::size_t v_node, std::size_t x_node,
                                             std::size_t y_node, double tol);

struct ChainRuleResult {
  std::vector<std::size_t> lhs;        // ∂(f0+g∘F)(x) as v-grid nodes
  std::vector<std::size_t> dgF;        // ∂g(F(x)) as y-grid nodes
  std::vector<std::size_t> rhs;        // ∪_y ∂(f0+<y,F>)(x)
  std::vector<std::size_t> minkowski;  // ∂f0(x) + ∪_y ∂<y,F>(x), f0 ≠ 0 only
  bool inclusion_ok = false;           // rhs ⊆ lhs (one-node dilation)
  bool equality_ok = false;            // symmetric inclusion
  bool not_convex = false;             // composite failed the midpoint test
};

ChainRuleResult chain_rule_sets(const CompositeProblem& p, std::size_t x_node,
                                double tol = -1.0);

}  // namespace compconj

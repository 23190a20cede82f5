#pragma once

#include "compconj/composite.hpp"
#include "compconj/cones.hpp"
#include "compconj/conjugate.hpp"

namespace compconj {

struct NonConvexDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvexityCertificate {
  struct DirectionVerdict {
    Vec direction;
    bool convex = true;
    // Witness triple (flat x-grid nodes) violating midpoint convexity.
    std::size_t a = 0, mid = 0, b = 0;
    double excess = 0.0;
  };
  std::vector<DirectionVerdict> directions;
  bool all_convex = true;
};

// <y,F> sampled on the grid without a surrounding problem.
GridFn scalarize_vecmap(const VecMap& F, std::span<const double> y, const Grid& x_grid);

// Joint discrete midpoint convexity over node pairs (strided sublattice when
// the grid is large); returns a violation witness when found.
ConvexityCertificate::DirectionVerdict joint_midpoint_convex(const GridFn& h,
                                                             double tol);

// K-convexity of F via the scalarization criterion: <y,F> must be convex for
// every generator y of -K° (positive combinations preserve convexity, so
// generators suffice).
struct KConvexityResult {
  bool verdict = true;
  ConvexityCertificate certificate;
};
KConvexityResult is_k_convex(const VecMap& F, const Cone& k, const Grid& x_grid,
                             double tol = 1e-9);

// g(w) <= g(w+k) for grid-aligned steps along every generator; restriction
// (when given) limits the base points w.
bool is_k_increasing(const GridFn& g, const Cone& k,
                     const std::vector<std::size_t>* restriction = nullptr,
                     double tol = 1e-9);

// Sampled-direction cone estimates. Always tagged Estimate: sampling cannot
// certify cone equality.
struct ConeEstimate {
  Cone cone;
  std::vector<Vec> accepted;  // accepted unit directions
  bool estimate = true;
};

// hzn(g): directions d with g(x+d) <= g(x) along grid-contained segments from
// every domain node.
ConeEstimate horizon_cone(const GridFn& g, int ray_samples = 0);

// Smallest cone K with F K-convex: -(conic hull of convex scalarization
// directions)°. Throws NonConvexDomain when dom(F) fails the grid convexity
// test.
ConeEstimate k_f_estimate(const VecMap& F, const Grid& x_grid, int ray_samples = 0);

// g_K = g □ delta_{-K} on g's grid, shifts taken on the exact difference
// lattice. A node whose best shift still descends strictly at the box edge is
// extrapolated to -inf and flagged: the grid cannot see the infimum bottom
// out, which is exactly the improperness pattern of the square-root example.
struct RegularizeResult {
  GridFn fn;
  std::vector<std::size_t> minus_inf_nodes;
  bool improper_suspect = false;
};
RegularizeResult monotone_regularize(const GridFn& g, const Cone& k,
                                     double membership_tol = 1e-7);

// Compares conjugate(g_K) against conjugate(g) + delta_{-K°} on a dual grid:
// max deviation where both are trusted-finite plus the trusted-domain
// symmetric difference (one-node dilation).
struct RegularizedConjugateReport {
  double max_abs_deviation = 0.0;
  bool domains_match = false;
  std::size_t lhs_domain_size = 0;
  std::size_t rhs_domain_size = 0;
  bool ok(double tol) const { return domains_match && max_abs_deviation <= tol; }
};
RegularizedConjugateReport regularized_conjugate_check(const GridFn& g, const Cone& k,
                                                       const Grid& dual_grid);

int default_ray_samples(int dim);

}  // namespace compconj

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compconj/grid.hpp"

namespace compconj {

struct DimensionTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vec = std::vector<double>;

// Finitely generated closed convex cone {sum mu_i r_i : mu >= 0} in R^m,
// m <= 3. Rays are stored unit length; the empty ray list is the cone {0}.
// The representation is not required to be minimal.
class Cone {
 public:
  Cone() = default;
  Cone(int dim, std::vector<Vec> rays);
  static Cone zero(int dim) { return Cone(dim, {}); }
  static Cone full(int dim);
  // Named shorthands: "R+xR", "R+x0", "0", "full" (dim 2 unless noted).
  static Cone named(const std::string& name, int dim = 2);

  int dim() const { return dim_; }
  const std::vector<Vec>& rays() const { return rays_; }
  bool is_zero() const { return rays_.empty(); }
  Cone negated() const;

 private:
  int dim_ = 0;
  std::vector<Vec> rays_;
};

// Polar cone K° = {v : <r,v> <= 0 for every generator r}, by desk-scale
// extreme-ray enumeration (sign analysis in 1-D, rotated normals in 2-D,
// pairwise cross products in 3-D).
Cone polar(const Cone& k);

// Distance from x to the cone at most tol*(1+|x|). Exact projection via
// enumeration of generator subsets of size <= dim.
bool contains(const Cone& k, std::span<const double> x, double tol = 1e-7);
double cone_distance(const Cone& k, std::span<const double> x);

// x1 <=_K x2, with x2 == nullopt playing the role of the largest element
// +inf_bullet (always true).
bool k_leq(const Cone& k, std::span<const double> x1,
           const std::optional<Vec>& x2, double tol = 1e-7);

// delta_K on the grid (0 inside, +inf outside); negate samples delta_{-K}.
GridFn indicator_grid(const Cone& k, const Grid& grid, bool negate,
                      double tol = 1e-7);

// Smallest closed convex cone containing the rays (2-D: angular sweep,
// 3-D: double polar).
Cone conic_hull(int dim, const std::vector<Vec>& rays);

// Generator-membership test K1 ⊆ K2.
bool cone_subset(const Cone& k1, const Cone& k2, double tol = 1e-7);

}  // namespace compconj

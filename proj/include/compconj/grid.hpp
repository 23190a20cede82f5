#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compconj/extreal.hpp"

namespace compconj {

struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NodeOutOfGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
};

// Uniform rectangular grid over R^p, p <= 3. Nodes are lo + i*step per axis
// with the endpoints reproduced exactly.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes);
  static Grid uniform(double lo, double hi, int count, int dim = 1);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_[static_cast<size_t>(a)]; }
  std::size_t size() const { return size_; }

  double node(int a, int i) const {
    const Axis& ax = axes_[static_cast<size_t>(a)];
    if (i == ax.count - 1) return ax.hi;
    return ax.lo + i * spacing(a);
  }
  double spacing(int a) const {
    const Axis& ax = axes_[static_cast<size_t>(a)];
    return (ax.hi - ax.lo) / (ax.count - 1);
  }
  double max_spacing() const;

  std::size_t flatten(std::span<const int> idx) const;
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::array<double, 3> point(std::size_t flat) const;
  void point_into(std::size_t flat, double* out) const;

  bool on_boundary(std::size_t flat) const;
  // Nearest node; throws NodeOutOfGrid when p is outside the box by more
  // than half a spacing per axis.
  std::size_t nearest_node(std::span<const double> p) const;
  bool same_shape(const Grid& o) const;

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

// Extended-real function sampled on a grid, row-major storage.
class GridFn {
 public:
  GridFn() = default;
  GridFn(Grid grid, std::vector<ExtReal> values);
  static GridFn constant(const Grid& g, ExtReal v);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  ExtReal operator[](std::size_t i) const { return values_[i]; }
  ExtReal& at(std::size_t i) { return values_[i]; }
  const std::vector<ExtReal>& values() const { return values_; }

  // dom(h) on the grid: nodes with value < +inf.
  std::vector<std::size_t> domain_nodes() const;
  // Multilinear interpolation; +inf if p leaves the box or any corner of the
  // enclosing cell is +inf, -inf if (no +inf corner and) some corner is -inf.
  ExtReal interpolate(std::span<const double> p) const;

 private:
  Grid grid_;
  std::vector<ExtReal> values_;
};

struct GridInfResult {
  ExtReal value = ExtReal::plus_inf();
  std::vector<std::size_t> argmin;  // finite-valued minimizers only
};

// Minimum over all nodes; argmin lists nodes with finite value within
// tol_argmin of the minimum (empty when the minimum is not finite).
GridInfResult grid_inf(const GridFn& h, double tol_argmin = -1.0);

// Scale-relative default: 1e-9 * (1 + |min|).
double default_argmin_tol(ExtReal min_value);

// Discrete midpoint convexity along every grid line (axis-aligned):
// h(mid) <= (h(a)+h(b))/2 + tol for consecutive triples. Returns the first
// violating flat index triple, or empty.
struct MidpointViolation {
  bool found = false;
  std::size_t a = 0, mid = 0, b = 0;
  double excess = 0.0;
};
MidpointViolation check_midpoint_convexity(const GridFn& h, double tol);

// First-order estimate of the largest finite |gradient| (forward differences
// along axes, infinite jumps skipped).
double max_gradient_estimate(const GridFn& h);

// Default transform tolerance: 1e-6 + 2 * spacing * gradient bound.
double default_fenchel_tol(const GridFn& h);

// One-node (Chebyshev) dilation of a node set on a grid.
std::vector<std::size_t> dilate_nodes(const Grid& g,
                                      const std::vector<std::size_t>& nodes);
bool subset_of(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);
// Mutual inclusion up to one-node dilation.
bool sets_match_dilated(const Grid& g, const std::vector<std::size_t>& a,
                        const std::vector<std::size_t>& b);

}  // namespace compconj

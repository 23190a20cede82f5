#pragma once

#include <vector>

#include "compconj/cones.hpp"

namespace compconj {

// V-representation of a polyhedral convex set: conv(points) + cone(rays).
// points must be nonempty for a nonempty set.
struct VRepSet {
  int dim = 0;
  std::vector<Vec> points;
  std::vector<Vec> rays;

  bool valid() const { return dim >= 1 && !points.empty(); }
};

inline VRepSet vrep_point(const Vec& p) {
  return VRepSet{static_cast<int>(p.size()), {p}, {}};
}

inline VRepSet vrep_full(int dim) {
  VRepSet s;
  s.dim = dim;
  s.points.push_back(Vec(static_cast<size_t>(dim), 0.0));
  Cone full = Cone::full(dim);
  s.rays = full.rays();
  return s;
}

inline VRepSet vrep_negate(const VRepSet& a) {
  VRepSet s;
  s.dim = a.dim;
  for (Vec p : a.points) {
    for (double& x : p) x = -x;
    s.points.push_back(std::move(p));
  }
  for (Vec r : a.rays) {
    for (double& x : r) x = -x;
    s.rays.push_back(std::move(r));
  }
  return s;
}

// Minkowski sum: conv(P1+P2) + cone(R1 ∪ R2). Exact for V-representations.
inline VRepSet vrep_sum(const VRepSet& a, const VRepSet& b) {
  VRepSet s;
  s.dim = a.dim;
  for (const Vec& p : a.points)
    for (const Vec& q : b.points) {
      Vec r(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i] + q[i];
      s.points.push_back(std::move(r));
    }
  s.rays = a.rays;
  s.rays.insert(s.rays.end(), b.rays.begin(), b.rays.end());
  return s;
}

inline VRepSet vrep_diff(const VRepSet& a, const VRepSet& b) {
  return vrep_sum(a, vrep_negate(b));
}

// S + K for a finitely generated cone (ray concatenation).
inline VRepSet vrep_plus_cone(const VRepSet& a, const Cone& k) {
  VRepSet s = a;
  for (const Vec& r : k.rays()) s.rays.push_back(r);
  return s;
}

inline VRepSet vrep_minus_cone(const VRepSet& a, const Cone& k) {
  return vrep_plus_cone(a, k.negated());
}

}  // namespace compconj

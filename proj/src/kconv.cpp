#include "compconj/kconv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace compconj {

namespace {

// Strides per axis chosen so the sublattice stays around 45 nodes per axis.
std::array<int, 3> sublattice_stride(const Grid& g) {
  std::array<int, 3> s{1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) {
    int c = g.axis(a).count;
    s[static_cast<size_t>(a)] = std::max(1, (c + 44) / 45);
  }
  return s;
}

std::vector<std::size_t> sublattice_nodes(const Grid& g) {
  auto stride = sublattice_stride(g);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    bool keep = true;
    for (int a = 0; a < g.dim(); ++a)
      if (idx[static_cast<size_t>(a)] % stride[static_cast<size_t>(a)] != 0) keep = false;
    if (keep) nodes.push_back(i);
  }
  return nodes;
}

// Unit direction samples: the +/- signs in 1-D, a uniform circle in 2-D, a
// Fibonacci sphere in 3-D.
std::vector<Vec> direction_samples(int dim, int n) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  if (dim == 2) {
    for (int k = 0; k < n; ++k) {
      double a = 2.0 * M_PI * k / n;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double a = golden * k;
    dirs.push_back({r * std::cos(a), r * std::sin(a), z});
  }
  return dirs;
}

// Smallest integer lattice step whose real-space direction matches d within
// angle_tol; nullopt when no small combination does.
std::optional<std::array<int, 3>> lattice_snap(const Grid& g, std::span<const double> d,
                                               double angle_tol) {
  const int dim = g.dim();
  std::array<int, 3> best{0, 0, 0};
  double best_err = angle_tol;
  bool found = false;
  std::array<int, 3> q{0, 0, 0};
  const int R = 4;
  std::array<int, 3> lo{-R, -R, -R}, hi{R, R, R};
  for (int a = dim; a < 3; ++a) lo[static_cast<size_t>(a)] = hi[static_cast<size_t>(a)] = 0;
  for (q[0] = lo[0]; q[0] <= hi[0]; ++q[0])
    for (q[1] = lo[1]; q[1] <= hi[1]; ++q[1])
      for (q[2] = lo[2]; q[2] <= hi[2]; ++q[2]) {
        if (q[0] == 0 && q[1] == 0 && q[2] == 0) continue;
        double v[3] = {0, 0, 0}, nv = 0.0, ip = 0.0;
        for (int a = 0; a < dim; ++a) {
          v[a] = q[static_cast<size_t>(a)] * g.spacing(a);
          nv += v[a] * v[a];
          ip += v[a] * d[static_cast<size_t>(a)];
        }
        nv = std::sqrt(nv);
        double cosang = std::clamp(ip / nv, -1.0, 1.0);
        double err = std::acos(cosang);
        // Prefer the shortest step among equally aligned ones.
        int l1 = std::abs(q[0]) + std::abs(q[1]) + std::abs(q[2]);
        int bl1 = std::abs(best[0]) + std::abs(best[1]) + std::abs(best[2]);
        if (err < best_err - 1e-12 || (err <= best_err + 1e-12 && found && l1 < bl1)) {
          best = q;
          best_err = err;
          found = true;
        }
      }
  if (!found) return std::nullopt;
  return best;
}

std::optional<std::size_t> step_node(const Grid& g, std::size_t flat,
                                     const std::array<int, 3>& q, int times = 1) {
  auto idx = g.unflatten(flat);
  std::array<int, 3> out = idx;
  for (int a = 0; a < g.dim(); ++a) {
    out[static_cast<size_t>(a)] += times * q[static_cast<size_t>(a)];
    if (out[static_cast<size_t>(a)] < 0 || out[static_cast<size_t>(a)] >= g.axis(a).count)
      return std::nullopt;
  }
  return g.flatten(std::span<const int>(out.data(), static_cast<size_t>(g.dim())));
}

// Descent property of direction d over the whole domain: one lattice step for
// snapped directions (chains over nodes), a short interpolated walk otherwise.
bool direction_descends(const GridFn& g, std::span<const double> d, double tol) {
  const Grid& grid = g.grid();
  auto snap = lattice_snap(grid, d, 2e-2);
  if (snap) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].is_plus_inf()) continue;
      auto j = step_node(grid, i, *snap);
      if (!j) continue;
      if (g[*j] > g[i] + ExtReal::finite(tol)) return false;
    }
    return true;
  }
  // Off-lattice direction: interpolated walk from a sublattice of base nodes.
  double step = grid.max_spacing();
  double pt[3], q[3];
  for (std::size_t i : sublattice_nodes(grid)) {
    if (g[i].is_plus_inf()) continue;
    grid.point_into(i, pt);
    ExtReal prev = g[i];
    for (int t = 1; t <= 8; ++t) {
      for (int a = 0; a < grid.dim(); ++a)
        q[a] = pt[a] + t * step * d[static_cast<size_t>(a)];
      std::span<const double> qs(q, static_cast<size_t>(grid.dim()));
      bool inside = true;
      for (int a = 0; a < grid.dim(); ++a)
        if (q[a] < grid.axis(a).lo - 1e-12 || q[a] > grid.axis(a).hi + 1e-12)
          inside = false;
      if (!inside) break;
      ExtReal val = g.interpolate(qs);
      if (val > prev + ExtReal::finite(tol)) return false;
      prev = val;
    }
  }
  return true;
}

}  // namespace

int default_ray_samples(int dim) { return dim == 3 ? 512 : 64; }

GridFn scalarize_vecmap(const VecMap& F, std::span<const double> y, const Grid& x_grid) {
  if (static_cast<int>(y.size()) != F.m())
    throw DimensionMismatch("scalarize_vecmap: y must live in R^m");
  std::vector<ExtReal> vals(x_grid.size());
  double pt[3];
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    x_grid.point_into(i, pt);
    std::span<const double> x(pt, static_cast<size_t>(x_grid.dim()));
    auto Fx = F.eval(x);
    if (!Fx) {
      vals[i] = ExtReal::plus_inf();
      continue;
    }
    double s = 0.0;
    for (std::size_t c = 0; c < y.size(); ++c) s += y[c] * (*Fx)[c];
    vals[i] = ExtReal::from_double(s);
  }
  return GridFn(x_grid, std::move(vals));
}

// Lattice directions up to |q|_inf <= 2 (one representative per sign class).
std::vector<std::array<int, 3>> stencil_directions(int dim) {
  std::vector<std::array<int, 3>> dirs;
  std::array<int, 3> q{0, 0, 0};
  std::array<int, 3> lo{-2, -2, -2};
  for (int a = dim; a < 3; ++a) lo[static_cast<size_t>(a)] = 0;
  for (q[0] = lo[0]; q[0] <= 2; ++q[0])
    for (q[1] = lo[1]; q[1] <= 2; ++q[1])
      for (q[2] = lo[2]; q[2] <= 2; ++q[2]) {
        if (q[0] == 0 && q[1] == 0 && q[2] == 0) continue;
        // Skip sign duplicates and non-primitive multiples.
        int first = q[0] != 0 ? q[0] : q[1] != 0 ? q[1] : q[2];
        if (first < 0) continue;
        int g = std::gcd(std::gcd(std::abs(q[0]), std::abs(q[1])), std::abs(q[2]));
        if (g != 1) continue;
        dirs.push_back(q);
      }
  return dirs;
}

ConvexityCertificate::DirectionVerdict joint_midpoint_convex(const GridFn& h,
                                                             double tol) {
  // Walks every lattice line with direction |q|_inf <= 2. Along a line the
  // sampled restriction is convex iff the finite support is contiguous and
  // every consecutive finite triple is midpoint convex; only non-sampled
  // directions escape the test.
  ConvexityCertificate::DirectionVerdict v;
  const Grid& g = h.grid();
  const int d = g.dim();
  for (const auto& q : stencil_directions(d)) {
    for (std::size_t start = 0; start < g.size(); ++start) {
      // Line starts where stepping backwards leaves the grid.
      if (step_node(g, start, q, -1).has_value()) continue;
      std::vector<std::size_t> line;
      std::optional<std::size_t> cur = start;
      while (cur) {
        line.push_back(*cur);
        cur = step_node(g, *cur, q);
      }
      if (line.size() < 3) continue;
      long first_fin = -1, last_fin = -1;
      for (std::size_t t = 0; t < line.size(); ++t) {
        if (h[line[t]].is_plus_inf()) continue;
        if (first_fin < 0) first_fin = static_cast<long>(t);
        last_fin = static_cast<long>(t);
      }
      // Interior +inf gap: the domain fails line convexity.
      for (long t = first_fin + 1; t >= 0 && t < last_fin; ++t) {
        if (!h[line[static_cast<size_t>(t)]].is_plus_inf()) continue;
        v.convex = false;
        v.a = line[static_cast<size_t>(first_fin)];
        v.mid = line[static_cast<size_t>(t)];
        v.b = line[static_cast<size_t>(last_fin)];
        v.excess = std::numeric_limits<double>::infinity();
        return v;
      }
      for (long t = first_fin + 1; t < last_fin; ++t) {
        std::size_t prev = line[static_cast<size_t>(t - 1)];
        std::size_t mid = line[static_cast<size_t>(t)];
        std::size_t next = line[static_cast<size_t>(t + 1)];
        ExtReal lhs = h[mid] + h[mid];
        ExtReal rhs = h[prev] + h[next];
        if (lhs > rhs + ExtReal::finite(2 * tol)) {
          v.convex = false;
          v.a = prev;
          v.mid = mid;
          v.b = next;
          v.excess = lhs.is_finite() && rhs.is_finite()
                         ? (lhs.value() - rhs.value()) / 2
                         : std::numeric_limits<double>::infinity();
          return v;
        }
      }
    }
  }
  return v;
}

KConvexityResult is_k_convex(const VecMap& F, const Cone& k, const Grid& x_grid,
                             double tol) {
  if (F.m() > 3) throw DimensionTooLarge("is_k_convex supports m <= 3");
  KConvexityResult r;
  Cone minus_polar = polar(k).negated();
  std::vector<Vec> dirs = minus_polar.rays();
  if (dirs.empty()) {
    // -K° = {0}: only the zero scalarization, trivially convex.
    return r;
  }
  for (const Vec& y : dirs) {
    GridFn s = scalarize_vecmap(F, y, x_grid);
    auto verdict = joint_midpoint_convex(s, tol);
    verdict.direction = y;
    if (!verdict.convex) {
      r.verdict = false;
      r.certificate.all_convex = false;
    }
    r.certificate.directions.push_back(std::move(verdict));
  }
  return r;
}

bool is_k_increasing(const GridFn& g, const Cone& k,
                     const std::vector<std::size_t>* restriction, double tol) {
  if (k.is_zero()) return true;
  const Grid& grid = g.grid();
  for (const Vec& r : k.rays()) {
    auto snap = lattice_snap(grid, r, 2e-2);
    if (snap) {
      if (restriction) {
        for (std::size_t w : *restriction) {
          for (int j = 1;; ++j) {
            auto z = step_node(grid, w, *snap, j);
            if (!z) break;
            if (g[w] > g[*z] + ExtReal::finite(tol)) return false;
          }
        }
      } else {
        for (std::size_t w = 0; w < g.size(); ++w) {
          auto z = step_node(grid, w, *snap);
          if (!z) continue;
          if (g[w] > g[*z] + ExtReal::finite(tol)) return false;
        }
      }
      continue;
    }
    // Interpolated fallback for off-lattice generators.
    double step = grid.max_spacing();
    double pt[3], q[3];
    auto walk_ok = [&](std::size_t w) {
      grid.point_into(w, pt);
      for (int t = 1; t <= 8; ++t) {
        for (int a = 0; a < grid.dim(); ++a)
          q[a] = pt[a] + t * step * r[static_cast<size_t>(a)];
        bool inside = true;
        for (int a = 0; a < grid.dim(); ++a)
          if (q[a] < grid.axis(a).lo - 1e-12 || q[a] > grid.axis(a).hi + 1e-12)
            inside = false;
        if (!inside) break;
        ExtReal val =
            g.interpolate(std::span<const double>(q, static_cast<size_t>(grid.dim())));
        if (g[w] > val + ExtReal::finite(tol)) return false;
      }
      return true;
    };
    if (restriction) {
      for (std::size_t w : *restriction)
        if (!walk_ok(w)) return false;
    } else {
      for (std::size_t w = 0; w < g.size(); ++w)
        if (!walk_ok(w)) return false;
    }
  }
  return true;
}

ConeEstimate horizon_cone(const GridFn& g, int ray_samples) {
  const int dim = g.grid().dim();
  if (ray_samples <= 0) ray_samples = default_ray_samples(dim);
  double tol = 1e-7 * (1.0 + std::abs(max_gradient_estimate(g)));
  ConeEstimate est;
  for (const Vec& d : direction_samples(dim, ray_samples))
    if (direction_descends(g, d, tol)) est.accepted.push_back(d);
  est.cone = conic_hull(dim, est.accepted);
  return est;
}

ConeEstimate k_f_estimate(const VecMap& F, const Grid& x_grid, int ray_samples) {
  const int m = F.m();
  if (ray_samples <= 0) ray_samples = default_ray_samples(m);
  // dom(F) must be convex on the grid for the scalarization criterion.
  std::vector<ExtReal> mask(x_grid.size());
  double pt[3];
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    x_grid.point_into(i, pt);
    std::span<const double> x(pt, static_cast<size_t>(x_grid.dim()));
    mask[i] = F.in_domain(x) ? ExtReal::finite(0.0) : ExtReal::plus_inf();
  }
  GridFn dom_ind(x_grid, std::move(mask));
  if (!joint_midpoint_convex(dom_ind, 1e-9).convex)
    throw NonConvexDomain("dom(F) fails the grid convexity test");

  ConeEstimate est;
  for (const Vec& y : direction_samples(m, ray_samples)) {
    GridFn s = scalarize_vecmap(F, y, x_grid);
    if (joint_midpoint_convex(s, 1e-9).convex) est.accepted.push_back(y);
  }
  Cone hull = conic_hull(m, est.accepted);
  est.cone = polar(hull).negated();
  return est;
}

RegularizeResult monotone_regularize(const GridFn& g, const Cone& k,
                                     double membership_tol) {
  const Grid& grid = g.grid();
  const int d = grid.dim();
  if (k.dim() != d) throw DimensionMismatch("monotone_regularize dimension mismatch");

  // delta_{-K} on the exact difference lattice (indexable by index offsets).
  std::vector<Axis> daxes;
  for (int a = 0; a < d; ++a) {
    const Axis& ax = grid.axis(a);
    daxes.push_back(Axis{ax.lo - ax.hi, ax.hi - ax.lo, 2 * ax.count - 1});
  }
  Grid dgrid(daxes);
  std::vector<std::uint8_t> shift_ok(dgrid.size(), 0);
  double pt[3];
  for (std::size_t i = 0; i < dgrid.size(); ++i) {
    dgrid.point_into(i, pt);
    for (int a = 0; a < d; ++a) pt[a] = -pt[a];
    shift_ok[i] = contains(k, std::span<const double>(pt, static_cast<size_t>(d)),
                           membership_tol)
                      ? 1
                      : 0;
  }

  RegularizeResult out{GridFn::constant(grid, ExtReal::plus_inf()), {}, false};
  const double desc_base = 1e-6;
  for (std::size_t w = 0; w < grid.size(); ++w) {
    auto wi = grid.unflatten(w);
    ExtReal best = ExtReal::plus_inf();
    std::size_t best_z = SIZE_MAX;
    for (std::size_t z = 0; z < grid.size(); ++z) {
      if (g[z].is_plus_inf()) continue;
      auto zi = grid.unflatten(z);
      std::array<int, 3> di{0, 0, 0};
      for (int a = 0; a < d; ++a)
        di[static_cast<size_t>(a)] = (wi[static_cast<size_t>(a)] -
                                      zi[static_cast<size_t>(a)]) +
                                     (grid.axis(a).count - 1);
      std::size_t dflat =
          dgrid.flatten(std::span<const int>(di.data(), static_cast<size_t>(d)));
      if (!shift_ok[dflat]) continue;
      if (g[z] < best) {
        best = g[z];
        best_z = z;
      }
    }
    out.fn.at(w) = best;
    if (!best.is_finite() || best_z == SIZE_MAX || best_z == w) continue;

    // Strict descent continuing at the box edge along the shift ray means the
    // true infimum keeps going; extrapolate to -inf and flag.
    auto zi = grid.unflatten(best_z);
    std::array<int, 3> q{0, 0, 0};
    int gcd = 0;
    for (int a = 0; a < d; ++a) {
      q[static_cast<size_t>(a)] =
          zi[static_cast<size_t>(a)] - wi[static_cast<size_t>(a)];
      gcd = std::gcd(gcd, std::abs(q[static_cast<size_t>(a)]));
    }
    if (gcd == 0) continue;
    for (int a = 0; a < d; ++a) q[static_cast<size_t>(a)] /= gcd;
    if (step_node(grid, best_z, q).has_value()) continue;  // box not binding
    auto back = step_node(grid, best_z, q, -1);
    if (!back) continue;
    double desc_tol = desc_base * (1.0 + std::abs(best.value()));
    if (g[*back] > best + ExtReal::finite(desc_tol)) {
      out.fn.at(w) = ExtReal::minus_inf();
      out.minus_inf_nodes.push_back(w);
      out.improper_suspect = true;
    }
  }
  // -inf samples of g itself propagate.
  for (std::size_t w = 0; w < grid.size(); ++w)
    if (out.fn[w].is_minus_inf() &&
        std::find(out.minus_inf_nodes.begin(), out.minus_inf_nodes.end(), w) ==
            out.minus_inf_nodes.end()) {
      out.minus_inf_nodes.push_back(w);
      out.improper_suspect = true;
    }
  std::sort(out.minus_inf_nodes.begin(), out.minus_inf_nodes.end());
  return out;
}

RegularizedConjugateReport regularized_conjugate_check(const GridFn& g, const Cone& k,
                                                       const Grid& dual_grid) {
  RegularizedConjugateReport rep;
  RegularizeResult gk = monotone_regularize(g, k);
  TransformConfig cfg;
  cfg.dual_grid = dual_grid;
  ConjugateResult lhs = conjugate_full(gk.fn, cfg);
  ConjugateResult gstar = conjugate_full(g, cfg);
  Cone minus_polar = polar(k).negated();
  GridFn ind = indicator_grid(minus_polar, dual_grid, false);

  std::vector<std::size_t> lhs_dom, rhs_dom;
  for (std::size_t i = 0; i < dual_grid.size(); ++i) {
    ExtReal rhs_v = gstar.fn[i] + ind[i];
    bool rhs_trusted = rhs_v.is_finite() && !gstar.is_suspect(i);
    if (lhs.trusted_finite(i)) lhs_dom.push_back(i);
    if (rhs_trusted) rhs_dom.push_back(i);
    if (lhs.trusted_finite(i) && rhs_trusted)
      rep.max_abs_deviation = std::max(
          rep.max_abs_deviation, std::abs(lhs.fn[i].value() - rhs_v.value()));
  }
  rep.lhs_domain_size = lhs_dom.size();
  rep.rhs_domain_size = rhs_dom.size();
  rep.domains_match = sets_match_dilated(dual_grid, lhs_dom, rhs_dom);
  return rep;
}

}  // namespace compconj

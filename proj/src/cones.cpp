#include "compconj/cones.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace compconj {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
Vec unit(Vec v) {
  double n = norm(v);
  for (double& x : v) x /= n;
  return v;
}
Vec neg(Vec v) {
  for (double& x : v) x = -x;
  return v;
}
Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

void dedupe_unit(std::vector<Vec>& rays) {
  std::vector<Vec> kept;
  for (const Vec& r : rays) {
    bool dup = false;
    for (const Vec& k : kept) {
      double d = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) d += (r[i] - k[i]) * (r[i] - k[i]);
      if (d < 1e-18) dup = true;
    }
    if (!dup) kept.push_back(r);
  }
  rays = std::move(kept);
}

// Solve G mu = c for small n with partial pivoting; false when singular.
bool solve_small(std::vector<double> G, std::vector<double> c, int n, Vec& mu) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(G[static_cast<size_t>(r * n + col)]) >
          std::abs(G[static_cast<size_t>(piv * n + col)]))
        piv = r;
    if (std::abs(G[static_cast<size_t>(piv * n + col)]) < 1e-12) return false;
    if (piv != col) {
      for (int j = 0; j < n; ++j)
        std::swap(G[static_cast<size_t>(col * n + j)], G[static_cast<size_t>(piv * n + j)]);
      std::swap(c[static_cast<size_t>(col)], c[static_cast<size_t>(piv)]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = G[static_cast<size_t>(r * n + col)] / G[static_cast<size_t>(col * n + col)];
      for (int j = col; j < n; ++j)
        G[static_cast<size_t>(r * n + j)] -= f * G[static_cast<size_t>(col * n + j)];
      c[static_cast<size_t>(r)] -= f * c[static_cast<size_t>(col)];
    }
  }
  mu.assign(static_cast<size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = c[static_cast<size_t>(r)];
    for (int j = r + 1; j < n; ++j) s -= G[static_cast<size_t>(r * n + j)] * mu[static_cast<size_t>(j)];
    mu[static_cast<size_t>(r)] = s / G[static_cast<size_t>(r * n + r)];
  }
  return true;
}

// Squared distance from x to cone(S) for the generator subset S, via the
// least-squares solution on S; valid upper bound whenever mu >= 0.
std::optional<double> subset_dist2(const std::vector<Vec>& rays,
                                   std::span<const int> subset,
                                   std::span<const double> x) {
  int n = static_cast<int>(subset.size());
  std::vector<double> G(static_cast<size_t>(n * n));
  std::vector<double> c(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec& ri = rays[static_cast<size_t>(subset[static_cast<size_t>(i)])];
    c[static_cast<size_t>(i)] = dotv(ri, x);
    for (int j = 0; j < n; ++j)
      G[static_cast<size_t>(i * n + j)] =
          dotv(ri, rays[static_cast<size_t>(subset[static_cast<size_t>(j)])]);
  }
  Vec mu;
  if (!solve_small(G, c, n, mu)) return std::nullopt;
  for (double m : mu)
    if (m < -1e-12) return std::nullopt;
  double xx = dotv(x, x);
  double proj = 0.0;
  for (int i = 0; i < n; ++i) proj += mu[static_cast<size_t>(i)] * c[static_cast<size_t>(i)];
  return std::max(0.0, xx - proj);
}

}  // namespace

Cone::Cone(int dim, std::vector<Vec> rays) : dim_(dim) {
  if (dim < 1 || dim > 3) throw DimensionTooLarge("cone dimension must be 1..3");
  for (Vec& r : rays) {
    if (static_cast<int>(r.size()) != dim)
      throw DimensionMismatch("ray dimension mismatch");
    double n = norm(r);
    if (n < 1e-14) throw std::invalid_argument("zero generator ray");
    for (double& x : r) x /= n;
  }
  dedupe_unit(rays);
  rays_ = std::move(rays);
}

Cone Cone::full(int dim) {
  std::vector<Vec> rays;
  for (int a = 0; a < dim; ++a) {
    Vec e(static_cast<size_t>(dim), 0.0);
    e[static_cast<size_t>(a)] = 1.0;
    rays.push_back(e);
    e[static_cast<size_t>(a)] = -1.0;
    rays.push_back(e);
  }
  return Cone(dim, std::move(rays));
}

Cone Cone::named(const std::string& name, int dim) {
  if (name == "0") return zero(dim);
  if (name == "full") return full(dim);
  if (dim == 2) {
    if (name == "R+xR") return Cone(2, {{1, 0}, {0, 1}, {0, -1}});
    if (name == "R+x0") return Cone(2, {{1, 0}});
    if (name == "0xR") return Cone(2, {{0, 1}, {0, -1}});
    if (name == "R+xR+") return Cone(2, {{1, 0}, {0, 1}});
  }
  throw std::invalid_argument("unknown cone shorthand '" + name + "'");
}

Cone Cone::negated() const {
  std::vector<Vec> rays;
  rays.reserve(rays_.size());
  for (const Vec& r : rays_) rays.push_back(neg(r));
  return Cone(dim_, std::move(rays));
}

Cone polar(const Cone& k) {
  const int m = k.dim();
  if (m > 3) throw DimensionTooLarge("polar only supported for m <= 3");
  if (k.is_zero()) return Cone::full(m);

  std::vector<Vec> candidates;
  const auto& rays = k.rays();
  if (m == 1) {
    candidates = {{1.0}, {-1.0}};
  } else if (m == 2) {
    for (const Vec& r : rays) {
      candidates.push_back(unit({-r[1], r[0]}));
      candidates.push_back(unit({r[1], -r[0]}));
      candidates.push_back(neg(r));
    }
  } else {
    for (std::size_t i = 0; i < rays.size(); ++i) {
      for (std::size_t j = i + 1; j < rays.size(); ++j) {
        Vec c = cross(rays[i], rays[j]);
        if (norm(c) > 1e-10) {
          candidates.push_back(unit(c));
          candidates.push_back(neg(unit(c)));
        }
      }
      // A basis of the plane orthogonal to the ray, for halfspace cases.
      Vec r = rays[i];
      Vec t = std::abs(r[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
      Vec b1 = unit(cross(r, t));
      Vec b2 = unit(cross(r, b1));
      candidates.push_back(b1);
      candidates.push_back(neg(b1));
      candidates.push_back(b2);
      candidates.push_back(neg(b2));
      candidates.push_back(neg(r));
    }
    for (int a = 0; a < 3; ++a) {
      Vec e(3, 0.0);
      e[static_cast<size_t>(a)] = 1.0;
      candidates.push_back(e);
      candidates.push_back(neg(e));
    }
  }

  std::vector<Vec> accepted;
  for (const Vec& c : candidates) {
    bool ok = true;
    for (const Vec& r : rays)
      if (dotv(r, c) > 1e-10) {
        ok = false;
        break;
      }
    if (ok) accepted.push_back(c);
  }
  dedupe_unit(accepted);
  return Cone(m, std::move(accepted));
}

double cone_distance(const Cone& k, std::span<const double> x) {
  if (static_cast<int>(x.size()) != k.dim())
    throw DimensionMismatch("cone membership dimension mismatch");
  double best = dotv(x, x);  // projection onto {0}
  const int n = static_cast<int>(k.rays().size());
  const int m = k.dim();
  std::array<int, 3> sub{};
  for (int i = 0; i < n; ++i) {
    sub[0] = i;
    if (auto d = subset_dist2(k.rays(), std::span<const int>(sub.data(), 1), x))
      best = std::min(best, *d);
    if (m < 2) continue;
    for (int j = i + 1; j < n; ++j) {
      sub[1] = j;
      if (auto d = subset_dist2(k.rays(), std::span<const int>(sub.data(), 2), x))
        best = std::min(best, *d);
      if (m < 3) continue;
      for (int l = j + 1; l < n; ++l) {
        sub[2] = l;
        if (auto d = subset_dist2(k.rays(), std::span<const int>(sub.data(), 3), x))
          best = std::min(best, *d);
      }
    }
  }
  return std::sqrt(std::max(0.0, best));
}

bool contains(const Cone& k, std::span<const double> x, double tol) {
  return cone_distance(k, x) <= tol * (1.0 + norm(x));
}

bool k_leq(const Cone& k, std::span<const double> x1, const std::optional<Vec>& x2,
           double tol) {
  if (!x2.has_value()) return true;  // largest element
  if (x1.size() != x2->size() || static_cast<int>(x1.size()) != k.dim())
    throw DimensionMismatch("k_leq dimension mismatch");
  Vec d(x1.size());
  for (std::size_t i = 0; i < x1.size(); ++i) d[i] = (*x2)[i] - x1[i];
  return contains(k, d, tol);
}

GridFn indicator_grid(const Cone& k, const Grid& grid, bool negate, double tol) {
  if (grid.dim() != k.dim())
    throw DimensionMismatch("indicator grid dimension mismatch");
  std::vector<ExtReal> vals(grid.size());
  double pt[3];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point_into(i, pt);
    if (negate)
      for (int a = 0; a < grid.dim(); ++a) pt[a] = -pt[a];
    vals[i] = contains(k, std::span<const double>(pt, static_cast<size_t>(grid.dim())), tol)
                  ? ExtReal::finite(0.0)
                  : ExtReal::plus_inf();
  }
  return GridFn(grid, std::move(vals));
}

Cone conic_hull(int dim, const std::vector<Vec>& rays_in) {
  std::vector<Vec> rays;
  for (const Vec& r : rays_in)
    if (norm(r) > 1e-14) rays.push_back(unit(r));
  dedupe_unit(rays);
  if (rays.empty()) return Cone::zero(dim);
  if (dim == 1) {
    bool pos = false, negd = false;
    for (const Vec& r : rays) (r[0] > 0 ? pos : negd) = true;
    if (pos && negd) return Cone::full(1);
    return Cone(1, {{pos ? 1.0 : -1.0}});
  }
  if (dim == 2) {
    std::vector<double> ang;
    for (const Vec& r : rays) ang.push_back(std::atan2(r[1], r[0]));
    std::sort(ang.begin(), ang.end());
    double gap = 0.0;
    std::size_t gap_at = 0;  // gap between ang[gap_at] and the next angle
    for (std::size_t i = 0; i < ang.size(); ++i) {
      double next = (i + 1 < ang.size()) ? ang[i + 1] : ang[0] + 2 * M_PI;
      if (next - ang[i] > gap) {
        gap = next - ang[i];
        gap_at = i;
      }
    }
    const double tol = 1e-9;
    if (gap < M_PI - tol) return Cone::full(2);
    double a0 = (gap_at + 1 < ang.size()) ? ang[gap_at + 1] : ang[0];  // arc start
    double a1 = ang[gap_at];                                           // arc end
    Vec ra{std::cos(a0), std::sin(a0)};
    Vec rb{std::cos(a1), std::sin(a1)};
    if (gap > M_PI + tol) return Cone(2, {ra, rb});
    // Arc spans exactly pi: a halfplane when some ray is interior, else a line.
    double span = a1 - a0;
    if (span < 0) span += 2 * M_PI;
    bool interior = false;
    for (double a : ang) {
      double rel = a - a0;
      if (rel < 0) rel += 2 * M_PI;
      if (rel > tol && rel < span - tol) interior = true;
    }
    if (!interior) return Cone(2, {ra, rb});
    double amid = a0 + span / 2;
    return Cone(2, {ra, rb, Vec{std::cos(amid), std::sin(amid)}});
  }
  // 3-D: closed conic hull as the polar of the polar.
  return polar(polar(Cone(dim, rays)));
}

bool cone_subset(const Cone& k1, const Cone& k2, double tol) {
  for (const Vec& r : k1.rays())
    if (!contains(k2, r, tol)) return false;
  return true;
}

}  // namespace compconj

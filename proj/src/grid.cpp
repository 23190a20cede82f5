#include "compconj/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace compconj {

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3)
    throw DimensionMismatch("grid dimension must be 1..3");
  size_ = 1;
  for (const Axis& ax : axes_) {
    if (!(ax.lo < ax.hi)) throw std::invalid_argument("axis needs lo < hi");
    if (ax.count < 2) throw std::invalid_argument("axis needs count >= 2");
    size_ *= static_cast<std::size_t>(ax.count);
  }
}

Grid Grid::uniform(double lo, double hi, int count, int dim) {
  std::vector<Axis> axes(static_cast<size_t>(dim), Axis{lo, hi, count});
  return Grid(std::move(axes));
}

double Grid::max_spacing() const {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) s = std::max(s, spacing(a));
  return s;
}

std::size_t Grid::flatten(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) {
    flat = flat * static_cast<std::size_t>(axes_[static_cast<size_t>(a)].count) +
           static_cast<std::size_t>(idx[static_cast<size_t>(a)]);
  }
  return flat;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim() - 1; a >= 0; --a) {
    std::size_t c = static_cast<std::size_t>(axes_[static_cast<size_t>(a)].count);
    idx[static_cast<size_t>(a)] = static_cast<int>(flat % c);
    flat /= c;
  }
  return idx;
}

std::array<double, 3> Grid::point(std::size_t flat) const {
  auto idx = unflatten(flat);
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim(); ++a)
    p[static_cast<size_t>(a)] = node(a, idx[static_cast<size_t>(a)]);
  return p;
}

void Grid::point_into(std::size_t flat, double* out) const {
  auto idx = unflatten(flat);
  for (int a = 0; a < dim(); ++a) out[a] = node(a, idx[static_cast<size_t>(a)]);
}

bool Grid::on_boundary(std::size_t flat) const {
  auto idx = unflatten(flat);
  for (int a = 0; a < dim(); ++a) {
    int i = idx[static_cast<size_t>(a)];
    if (i == 0 || i == axes_[static_cast<size_t>(a)].count - 1) return true;
  }
  return false;
}

std::size_t Grid::nearest_node(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim())
    throw DimensionMismatch("point dimension mismatch");
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    double step = spacing(a);
    double t = (p[static_cast<size_t>(a)] - axes_[static_cast<size_t>(a)].lo) / step;
    long i = std::lround(t);
    if (i < 0 || i >= axes_[static_cast<size_t>(a)].count ||
        std::abs(t - static_cast<double>(i)) > 0.5 + 1e-9)
      throw NodeOutOfGrid("point not on grid: axis " + std::to_string(a));
    idx[static_cast<size_t>(a)] = static_cast<int>(i);
  }
  return flatten(std::span<const int>(idx.data(), static_cast<size_t>(dim())));
}

bool Grid::same_shape(const Grid& o) const {
  if (dim() != o.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const Axis& x = axes_[static_cast<size_t>(a)];
    const Axis& y = o.axes_[static_cast<size_t>(a)];
    if (x.lo != y.lo || x.hi != y.hi || x.count != y.count) return false;
  }
  return true;
}

GridFn::GridFn(Grid grid, std::vector<ExtReal> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw GridMismatch("value array length does not match grid size");
}

GridFn GridFn::constant(const Grid& g, ExtReal v) {
  return GridFn(g, std::vector<ExtReal>(g.size(), v));
}

std::vector<std::size_t> GridFn::domain_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!values_[i].is_plus_inf()) out.push_back(i);
  return out;
}

ExtReal GridFn::interpolate(std::span<const double> p) const {
  const int d = grid_.dim();
  if (static_cast<int>(p.size()) != d)
    throw DimensionMismatch("interpolation point dimension mismatch");
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const Axis& ax = grid_.axis(a);
    double step = grid_.spacing(a);
    double t = (p[static_cast<size_t>(a)] - ax.lo) / step;
    if (t < -1e-9 || t > ax.count - 1 + 1e-9) return ExtReal::plus_inf();
    t = std::clamp(t, 0.0, static_cast<double>(ax.count - 1));
    int i = static_cast<int>(std::floor(t));
    if (i >= ax.count - 1) i = ax.count - 2;
    base[static_cast<size_t>(a)] = i;
    frac[static_cast<size_t>(a)] = t - i;
  }
  // Walk the 2^d corners of the enclosing cell.
  double acc = 0.0;
  bool any_minf = false;
  for (int corner = 0; corner < (1 << d); ++corner) {
    std::array<int, 3> idx = base;
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      if (corner & (1 << a)) {
        idx[static_cast<size_t>(a)] += 1;
        w *= frac[static_cast<size_t>(a)];
      } else {
        w *= 1.0 - frac[static_cast<size_t>(a)];
      }
    }
    ExtReal v = values_[grid_.flatten(std::span<const int>(idx.data(), static_cast<size_t>(d)))];
    if (v.is_plus_inf()) return ExtReal::plus_inf();
    if (v.is_minus_inf()) {
      any_minf = true;
      continue;
    }
    acc += w * v.value();
  }
  if (any_minf) return ExtReal::minus_inf();
  return ExtReal::from_double(acc);
}

double default_argmin_tol(ExtReal min_value) {
  double m = min_value.is_finite() ? std::abs(min_value.value()) : 0.0;
  return 1e-9 * (1.0 + m);
}

GridInfResult grid_inf(const GridFn& h, double tol_argmin) {
  GridInfResult r;
  r.value = ExtReal::plus_inf();
  for (std::size_t i = 0; i < h.size(); ++i) r.value = ext_min(r.value, h[i]);
  if (!r.value.is_finite()) return r;
  double tol = tol_argmin >= 0 ? tol_argmin : default_argmin_tol(r.value);
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i].is_finite() && h[i].value() <= r.value.value() + tol)
      r.argmin.push_back(i);
  return r;
}

MidpointViolation check_midpoint_convexity(const GridFn& h, double tol) {
  MidpointViolation v;
  const Grid& g = h.grid();
  for (int a = 0; a < g.dim(); ++a) {
    std::size_t stride = 1;
    for (int b = g.dim() - 1; b > a; --b)
      stride *= static_cast<std::size_t>(g.axis(b).count);
    int n = g.axis(a).count;
    for (std::size_t i = 0; i < g.size(); ++i) {
      int ia = g.unflatten(i)[static_cast<size_t>(a)];
      if (ia + 2 >= n) continue;
      std::size_t im = i + stride, ib = i + 2 * stride;
      ExtReal lhs = h[im] + h[im];
      ExtReal rhs = h[i] + h[ib];
      if (lhs > rhs + ExtReal::finite(2 * tol)) {
        v.found = true;
        v.a = i;
        v.mid = im;
        v.b = ib;
        v.excess = lhs.is_finite() && rhs.is_finite()
                       ? (lhs.value() - rhs.value()) / 2
                       : std::numeric_limits<double>::infinity();
        return v;
      }
    }
  }
  return v;
}

double max_gradient_estimate(const GridFn& h) {
  const Grid& g = h.grid();
  double best = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    std::size_t stride = 1;
    for (int b = g.dim() - 1; b > a; --b)
      stride *= static_cast<std::size_t>(g.axis(b).count);
    double step = g.spacing(a);
    int n = g.axis(a).count;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.unflatten(i)[static_cast<size_t>(a)] + 1 >= n) continue;
      ExtReal x = h[i], y = h[i + stride];
      if (x.is_finite() && y.is_finite())
        best = std::max(best, std::abs(y.value() - x.value()) / step);
    }
  }
  return best;
}

double default_fenchel_tol(const GridFn& h) {
  return 1e-6 + 2.0 * h.grid().max_spacing() * max_gradient_estimate(h);
}

std::vector<std::size_t> dilate_nodes(const Grid& g,
                                      const std::vector<std::size_t>& nodes) {
  std::set<std::size_t> out(nodes.begin(), nodes.end());
  const int d = g.dim();
  for (std::size_t flat : nodes) {
    auto idx = g.unflatten(flat);
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < d; ++a) {
      lo[static_cast<size_t>(a)] = std::max(0, idx[static_cast<size_t>(a)] - 1);
      hi[static_cast<size_t>(a)] =
          std::min(g.axis(a).count - 1, idx[static_cast<size_t>(a)] + 1);
    }
    std::array<int, 3> cur = lo;
    for (;;) {
      out.insert(g.flatten(std::span<const int>(cur.data(), static_cast<size_t>(d))));
      int a = d - 1;
      for (; a >= 0; --a) {
        if (cur[static_cast<size_t>(a)] < hi[static_cast<size_t>(a)]) {
          ++cur[static_cast<size_t>(a)];
          for (int b = a + 1; b < d; ++b)
            cur[static_cast<size_t>(b)] = lo[static_cast<size_t>(b)];
          break;
        }
      }
      if (a < 0) break;
    }
  }
  return std::vector<std::size_t>(out.begin(), out.end());
}

bool subset_of(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::set<std::size_t> bs(b.begin(), b.end());
  for (std::size_t x : a)
    if (!bs.count(x)) return false;
  return true;
}

bool sets_match_dilated(const Grid& g, const std::vector<std::size_t>& a,
                        const std::vector<std::size_t>& b) {
  return subset_of(a, dilate_nodes(g, b)) && subset_of(b, dilate_nodes(g, a));
}


}  // namespace compconj

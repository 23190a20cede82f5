#include "compconj/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include "compconj/parallel.hpp"

namespace compconj {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void apply_inf_cap(GridFn& fn) {
  for (std::size_t i = 0; i < fn.size(); ++i) {
    if (!fn[i].is_finite()) continue;
    if (fn[i].value() > kInfCap) fn.at(i) = ExtReal::plus_inf();
    if (fn[i].value() < -kInfCap) fn.at(i) = ExtReal::minus_inf();
  }
}

// One-dimensional transform along a line: out[j] = sup_i vs[j]*xs[i] - vals[i].
// in_flags carry suspicion from earlier passes; out_flags[j] is set unless
// some attaining node is both trusted and interior to the line.
void transform_line(std::span<const double> xs, std::span<const ExtReal> vals,
                    std::span<const std::uint8_t> in_flags, std::span<const double> vs,
                    std::span<ExtReal> out, std::span<std::uint8_t> out_flags) {
  const int nx = static_cast<int>(xs.size());
  const int nv = static_cast<int>(vs.size());
  for (int i = 0; i < nx; ++i) {
    if (vals[static_cast<size_t>(i)].is_minus_inf()) {
      for (int j = 0; j < nv; ++j) {
        out[static_cast<size_t>(j)] = ExtReal::plus_inf();
        out_flags[static_cast<size_t>(j)] = in_flags[static_cast<size_t>(i)];
      }
      return;
    }
  }
  // Lower convex hull of the finite sample points, stored as node indices.
  std::vector<int> hull;
  hull.reserve(static_cast<size_t>(nx));
  auto cross_ok = [&](int a, int b, int c) {
    // true when b stays strictly below segment a-c (keep b).
    double x0 = xs[static_cast<size_t>(a)], y0 = vals[static_cast<size_t>(a)].value();
    double x1 = xs[static_cast<size_t>(b)], y1 = vals[static_cast<size_t>(b)].value();
    double x2 = xs[static_cast<size_t>(c)], y2 = vals[static_cast<size_t>(c)].value();
    return (y1 - y0) * (x2 - x1) <= (y2 - y1) * (x1 - x0);
  };
  for (int i = 0; i < nx; ++i) {
    if (!vals[static_cast<size_t>(i)].is_finite()) continue;
    while (hull.size() >= 2 && !cross_ok(hull[hull.size() - 2], hull.back(), i))
      hull.pop_back();
    hull.push_back(i);
  }
  if (hull.empty()) {
    for (int j = 0; j < nv; ++j) {
      out[static_cast<size_t>(j)] = ExtReal::minus_inf();
      out_flags[static_cast<size_t>(j)] = 0;
    }
    return;
  }
  auto slope = [&](std::size_t k) {
    int a = hull[k], b = hull[k + 1];
    return (vals[static_cast<size_t>(b)].value() - vals[static_cast<size_t>(a)].value()) /
           (xs[static_cast<size_t>(b)] - xs[static_cast<size_t>(a)]);
  };
  auto node_trusted = [&](int i) {
    return i != 0 && i != nx - 1 && in_flags[static_cast<size_t>(i)] == 0;
  };
  std::size_t k = 0;
  for (int j = 0; j < nv; ++j) {
    double v = vs[static_cast<size_t>(j)];
    while (k + 1 < hull.size() && slope(k) < v) ++k;
    int i = hull[k];
    double best = v * xs[static_cast<size_t>(i)] - vals[static_cast<size_t>(i)].value();
    out[static_cast<size_t>(j)] = ExtReal::from_double(best);
    bool trusted = node_trusted(i);
    // Slope ties spread the argmax over a hull edge; either endpoint counts.
    double tie = 1e-9 * (1.0 + std::abs(best));
    if (!trusted && k + 1 < hull.size()) {
      int i2 = hull[k + 1];
      double alt = v * xs[static_cast<size_t>(i2)] - vals[static_cast<size_t>(i2)].value();
      if (alt >= best - tie) trusted = node_trusted(i2);
    }
    if (!trusted && k > 0) {
      int i2 = hull[k - 1];
      double alt = v * xs[static_cast<size_t>(i2)] - vals[static_cast<size_t>(i2)].value();
      if (alt >= best - tie) trusted = node_trusted(i2);
    }
    out_flags[static_cast<size_t>(j)] = trusted ? 0 : 1;
  }
}

struct MixedShape {
  // Extents per axis of the working buffer; axes already transformed use the
  // dual count.
  std::array<std::size_t, 3> extent{1, 1, 1};
  int dim = 1;
  std::size_t total() const {
    std::size_t t = 1;
    for (int a = 0; a < dim; ++a) t *= extent[static_cast<size_t>(a)];
    return t;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = dim - 1; a > axis; --a) s *= extent[static_cast<size_t>(a)];
    return s;
  }
};

ConjugateResult fast_llt(const GridFn& h, const Grid& dual) {
  const Grid& pg = h.grid();
  const int d = pg.dim();
  MixedShape shape;
  shape.dim = d;
  for (int a = 0; a < d; ++a)
    shape.extent[static_cast<size_t>(a)] = static_cast<std::size_t>(pg.axis(a).count);

  std::vector<ExtReal> cur(h.values());
  std::vector<std::uint8_t> flags(cur.size(), 0);

  for (int axis = d - 1; axis >= 0; --axis) {
    const int nx = pg.axis(axis).count;
    const int nv = dual.axis(axis).count;
    std::vector<double> xs(static_cast<size_t>(nx)), vs(static_cast<size_t>(nv));
    for (int i = 0; i < nx; ++i) xs[static_cast<size_t>(i)] = pg.node(axis, i);
    for (int j = 0; j < nv; ++j) vs[static_cast<size_t>(j)] = dual.node(axis, j);

    MixedShape next = shape;
    next.extent[static_cast<size_t>(axis)] = static_cast<std::size_t>(nv);
    std::vector<ExtReal> out(next.total());
    std::vector<std::uint8_t> oflags(next.total(), 0);

    std::size_t in_stride = shape.stride(axis);
    std::size_t out_stride = next.stride(axis);
    std::size_t lines = shape.total() / static_cast<std::size_t>(nx);

    std::vector<ExtReal> line_in(static_cast<size_t>(nx)), line_out(static_cast<size_t>(nv));
    std::vector<std::uint8_t> lf_in(static_cast<size_t>(nx)), lf_out(static_cast<size_t>(nv));
    for (std::size_t line = 0; line < lines; ++line) {
      // Base offset for this line: distribute `line` over the non-axis axes.
      std::size_t rem = line, base_in = 0, base_out = 0;
      for (int a = d - 1; a >= 0; --a) {
        if (a == axis) continue;
        std::size_t ext = shape.extent[static_cast<size_t>(a)];
        std::size_t ia = rem % ext;
        rem /= ext;
        base_in += ia * shape.stride(a);
        base_out += ia * next.stride(a);
      }
      for (int i = 0; i < nx; ++i) {
        line_in[static_cast<size_t>(i)] = cur[base_in + static_cast<size_t>(i) * in_stride];
        lf_in[static_cast<size_t>(i)] = flags[base_in + static_cast<size_t>(i) * in_stride];
      }
      transform_line(xs, line_in, lf_in, vs, line_out, lf_out);
      for (int j = 0; j < nv; ++j) {
        out[base_out + static_cast<size_t>(j) * out_stride] = line_out[static_cast<size_t>(j)];
        oflags[base_out + static_cast<size_t>(j) * out_stride] = lf_out[static_cast<size_t>(j)];
      }
    }
    cur = std::move(out);
    flags = std::move(oflags);
    shape = next;
    if (axis != 0)
      for (ExtReal& v : cur) v = -v;
  }

  ConjugateResult r{GridFn(dual, std::move(cur)), std::move(flags)};
  apply_inf_cap(r.fn);
  return r;
}

ConjugateResult brute_force(const GridFn& h, const Grid& dual) {
  const Grid& pg = h.grid();
  const int d = pg.dim();
  std::vector<ExtReal> out(dual.size());
  std::vector<std::uint8_t> flags(dual.size(), 0);

  // Any -inf sample makes the conjugate identically +inf.
  bool has_minf = false;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i].is_minus_inf()) has_minf = true;

  std::vector<std::size_t> dom;
  std::vector<std::array<double, 3>> pts;
  std::vector<std::uint8_t> bnd;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!h[i].is_finite()) continue;
    dom.push_back(i);
    pts.push_back(pg.point(i));
    bnd.push_back(pg.on_boundary(i) ? 1 : 0);
  }

  parallel_for(0, dual.size(), [&](std::size_t j) {
    if (has_minf) {
      out[j] = ExtReal::plus_inf();
      return;
    }
    if (dom.empty()) {
      out[j] = ExtReal::minus_inf();
      return;
    }
    auto v = dual.point(j);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < dom.size(); ++t) {
      double s = dot(std::span<const double>(v.data(), static_cast<size_t>(d)),
                     std::span<const double>(pts[t].data(), static_cast<size_t>(d))) -
                 h[dom[t]].value();
      if (s > best) best = s;
    }
    double tie = 1e-9 * (1.0 + std::abs(best));
    bool trusted = false;
    for (std::size_t t = 0; t < dom.size() && !trusted; ++t) {
      if (bnd[t]) continue;
      double s = dot(std::span<const double>(v.data(), static_cast<size_t>(d)),
                     std::span<const double>(pts[t].data(), static_cast<size_t>(d))) -
                 h[dom[t]].value();
      if (s >= best - tie) trusted = true;
    }
    out[j] = ExtReal::from_double(best);
    flags[j] = trusted ? 0 : 1;
  });

  ConjugateResult r{GridFn(dual, std::move(out)), std::move(flags)};
  apply_inf_cap(r.fn);
  return r;
}

}  // namespace

ConjugateResult conjugate_full(const GridFn& h, const TransformConfig& cfg) {
  if (cfg.dual_grid.dim() != h.grid().dim())
    throw GridMismatch("dual grid dimension mismatch");
  if (cfg.method == TransformMethod::BruteForce) return brute_force(h, cfg.dual_grid);
  return fast_llt(h, cfg.dual_grid);
}

GridFn conjugate(const GridFn& h, const TransformConfig& cfg) {
  return conjugate_full(h, cfg).fn;
}

ExtReal conjugate_at(const GridFn& h, std::span<const double> v) {
  const Grid& g = h.grid();
  if (static_cast<int>(v.size()) != g.dim())
    throw DimensionMismatch("dual point dimension mismatch");
  ExtReal best = ExtReal::minus_inf();
  double pt[3];
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i].is_plus_inf()) continue;
    if (h[i].is_minus_inf()) return ExtReal::plus_inf();
    g.point_into(i, pt);
    double s = dot(v, std::span<const double>(pt, v.size())) - h[i].value();
    best = ext_max(best, ExtReal::from_double(s));
  }
  if (best.is_finite() && best.value() > kInfCap) return ExtReal::plus_inf();
  return best;
}

ConjugateResult biconjugate_full(const GridFn& h, const TransformConfig& cfg) {
  ConjugateResult inner = conjugate_full(h, cfg);
  TransformConfig back = cfg;
  back.dual_grid = h.grid();
  return conjugate_full(inner.fn, back);
}

GridFn biconjugate(const GridFn& h, const TransformConfig& cfg) {
  return biconjugate_full(h, cfg).fn;
}

GridFn inf_convolution(const GridFn& h1, const GridFn& h2) {
  const Grid& g1 = h1.grid();
  const Grid& g2 = h2.grid();
  if (g1.dim() != g2.dim()) throw GridMismatch("inf_convolution dimension mismatch");
  const int d = g1.dim();

  // Lattice-aligned fast path: same spacing and integral offset makes w-z an
  // exact h2 node; scatter over finite pairs.
  bool aligned = true;
  std::array<long, 3> off{0, 0, 0};
  for (int a = 0; a < d && aligned; ++a) {
    double s1 = g1.spacing(a), s2 = g2.spacing(a);
    if (std::abs(s1 - s2) > 1e-12 * (1.0 + std::abs(s1))) {
      aligned = false;
      break;
    }
    double t = (0.0 - g2.axis(a).lo) / s2;  // index of difference 0 in h2
    long i0 = std::lround(t);
    if (std::abs(t - static_cast<double>(i0)) > 1e-9) aligned = false;
    off[static_cast<size_t>(a)] = i0;
  }

  std::vector<ExtReal> out(g1.size(), ExtReal::plus_inf());
  if (aligned) {
    std::vector<std::size_t> zdom, ddom;
    for (std::size_t i = 0; i < h1.size(); ++i)
      if (!h1[i].is_plus_inf()) zdom.push_back(i);
    for (std::size_t i = 0; i < h2.size(); ++i)
      if (!h2[i].is_plus_inf()) ddom.push_back(i);
    for (std::size_t z : zdom) {
      auto zi = g1.unflatten(z);
      for (std::size_t dd : ddom) {
        auto di = g2.unflatten(dd);
        std::array<int, 3> wi{0, 0, 0};
        bool ok = true;
        for (int a = 0; a < d; ++a) {
          long w = zi[static_cast<size_t>(a)] + di[static_cast<size_t>(a)] -
                   off[static_cast<size_t>(a)];
          if (w < 0 || w >= g1.axis(a).count) {
            ok = false;
            break;
          }
          wi[static_cast<size_t>(a)] = static_cast<int>(w);
        }
        if (!ok) continue;
        std::size_t w = g1.flatten(std::span<const int>(wi.data(), static_cast<size_t>(d)));
        out[w] = ext_min(out[w], h1[z] + h2[dd]);
      }
    }
  } else {
    parallel_for(0, g1.size(), [&](std::size_t w) {
      double wp[3], zp[3], diff[3];
      g1.point_into(w, wp);
      ExtReal best = ExtReal::plus_inf();
      for (std::size_t z = 0; z < g1.size(); ++z) {
        if (h1[z].is_plus_inf()) continue;
        g1.point_into(z, zp);
        for (int a = 0; a < d; ++a) diff[a] = wp[a] - zp[a];
        ExtReal v = h2.interpolate(std::span<const double>(diff, static_cast<size_t>(d)));
        best = ext_min(best, h1[z] + v);
      }
      out[w] = best;
    });
  }
  return GridFn(g1, std::move(out));
}

ExtReal fenchel_gap(const GridFn& h, const GridFn& h_star, std::size_t x_node,
                    std::size_t v_node) {
  if (x_node >= h.size() || v_node >= h_star.size())
    throw NodeOutOfGrid("fenchel_gap node index out of range");
  auto x = h.grid().point(x_node);
  auto v = h_star.grid().point(v_node);
  double ip = 0.0;
  for (int a = 0; a < h.grid().dim(); ++a)
    ip += x[static_cast<size_t>(a)] * v[static_cast<size_t>(a)];
  return h[x_node] + h_star[v_node] - ExtReal::from_double(ip);
}

std::vector<std::size_t> subdifferential(const GridFn& h, const GridFn& h_star,
                                         std::size_t x_bar, double tol) {
  std::vector<std::size_t> out;
  if (!h[x_bar].is_finite()) return out;
  for (std::size_t j = 0; j < h_star.size(); ++j) {
    ExtReal gap = fenchel_gap(h, h_star, x_bar, j);
    if (gap.is_finite() && gap.value() <= tol) out.push_back(j);
    if (gap.is_minus_inf()) out.push_back(j);
  }
  return out;
}

}  // namespace compconj

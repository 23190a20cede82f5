#include "compconj/qual.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace compconj {

namespace {

// Phase-1 simplex feasibility for A z = b, z >= 0 (rows <= 4 here). Bland's
// rule keeps it deterministic and cycle-free.
bool lp_feasible(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t rows = b.size();
  const std::size_t cols = A.empty() ? 0 : A[0].size();
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < rows; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (double& v : A[i]) v = -v;
    }
  }
  // Tableau [A | I | b] with the phase-1 objective row appended.
  const std::size_t width = cols + rows + 1;
  std::vector<std::vector<double>> t(rows + 1, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[i][j] = A[i][j];
    t[i][cols + i] = 1.0;
    t[i][width - 1] = b[i];
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;
  // Objective: minimize sum of artificials; reduced-cost row = -(sum of rows).
  for (std::size_t j = 0; j < width; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += t[i][j];
    t[rows][j] = (j >= cols && j < cols + rows) ? 0.0 : -s;
  }

  const double tol = 1e-11 * scale;
  for (int iter = 0; iter < 10000; ++iter) {
    // Bland: smallest improving column.
    std::size_t enter = width;
    for (std::size_t j = 0; j < width - 1; ++j) {
      if (t[rows][j] < -tol) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = rows;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (t[i][enter] > tol) {
        double ratio = t[i][width - 1] / t[i][enter];
        if (leave == rows || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == rows) break;  // unbounded direction; phase 1 is bounded below
    double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= rows; ++i) {
      if (i == leave) continue;
      double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  return t[rows][width - 1] >= -1e-9 * (1.0 + scale);
}

double dotn(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string fmt_vec(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace

bool contains_point(const VRepSet& s, std::span<const double> x) {
  if (!s.valid()) throw DegenerateSet("V-representation has no points");
  if (static_cast<int>(x.size()) != s.dim)
    throw DimensionMismatch("contains_point dimension mismatch");
  const std::size_t np = s.points.size();
  const std::size_t nr = s.rays.size();
  const std::size_t rows = static_cast<std::size_t>(s.dim) + 1;
  std::vector<std::vector<double>> A(rows, std::vector<double>(np + nr, 0.0));
  std::vector<double> b(rows, 0.0);
  for (int d = 0; d < s.dim; ++d) {
    for (std::size_t j = 0; j < np; ++j) A[static_cast<size_t>(d)][j] = s.points[j][static_cast<size_t>(d)];
    for (std::size_t j = 0; j < nr; ++j)
      A[static_cast<size_t>(d)][np + j] = s.rays[j][static_cast<size_t>(d)];
    b[static_cast<size_t>(d)] = x[static_cast<size_t>(d)];
  }
  for (std::size_t j = 0; j < np; ++j) A[rows - 1][j] = 1.0;
  b[rows - 1] = 1.0;
  return lp_feasible(std::move(A), std::move(b));
}

std::vector<Vec> affine_hull_basis(const VRepSet& s) {
  if (!s.valid()) throw DegenerateSet("V-representation has no points");
  std::vector<Vec> dirs;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    Vec d(static_cast<size_t>(s.dim));
    for (int a = 0; a < s.dim; ++a)
      d[static_cast<size_t>(a)] =
          s.points[i][static_cast<size_t>(a)] - s.points[0][static_cast<size_t>(a)];
    dirs.push_back(std::move(d));
  }
  dirs.insert(dirs.end(), s.rays.begin(), s.rays.end());
  // Modified Gram-Schmidt with drop tolerance.
  std::vector<Vec> basis;
  for (Vec d : dirs) {
    for (const Vec& bvec : basis) {
      double ip = dotn(d, bvec);
      for (std::size_t a = 0; a < d.size(); ++a) d[a] -= ip * bvec[a];
    }
    double n = std::sqrt(dotn(d, d));
    if (n > 1e-9) {
      for (double& v : d) v /= n;
      basis.push_back(std::move(d));
    }
  }
  return basis;
}

Vec rint_point(const VRepSet& s) {
  if (!s.valid()) throw DegenerateSet("V-representation has no points");
  Vec z(static_cast<size_t>(s.dim), 0.0);
  for (const Vec& p : s.points)
    for (int a = 0; a < s.dim; ++a)
      z[static_cast<size_t>(a)] += p[static_cast<size_t>(a)] / static_cast<double>(s.points.size());
  for (const Vec& r : s.rays)
    for (int a = 0; a < s.dim; ++a) z[static_cast<size_t>(a)] += r[static_cast<size_t>(a)];
  return z;
}

bool contains_rint(const VRepSet& s, std::span<const double> x, double eps) {
  if (!contains_point(s, x)) return false;
  if (eps < 0) {
    double mx = 0.0;
    for (const Vec& p : s.points)
      for (double v : p) mx = std::max(mx, std::abs(v));
    for (const Vec& r : s.rays)
      for (double v : r) mx = std::max(mx, std::abs(v));
    eps = 1e-6 * (1.0 + mx);
  }
  for (const Vec& b : affine_hull_basis(s)) {
    Vec probe(x.begin(), x.end());
    for (std::size_t a = 0; a < probe.size(); ++a) probe[a] += eps * b[a];
    if (!contains_point(s, probe)) return false;
    for (std::size_t a = 0; a < probe.size(); ++a) probe[a] -= 2 * eps * b[a];
    if (!contains_point(s, probe)) return false;
  }
  return true;
}

PwlqFn::PwlqFn(int n, std::vector<PwlqPiece> pieces)
    : n_(n), pieces_(std::move(pieces)) {
  for (const PwlqPiece& p : pieces_) {
    if (static_cast<int>(p.q.size()) != n ||
        static_cast<int>(p.A.size()) != n * n)
      throw DimensionMismatch("PWLQ piece dimension mismatch");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(p.A[static_cast<size_t>(i * n + j)] -
                     p.A[static_cast<size_t>(j * n + i)]) > 1e-12)
          throw PieceInconsistent("piece matrix is not symmetric");
  }
}

bool PwlqFn::piece_contains(const PwlqPiece& p, std::span<const double> x,
                            double tol) const {
  for (const AffineIneq& c : p.polyhedron)
    if (dotn(c.a, x) + c.b > tol) return false;
  return true;
}

ExtReal PwlqFn::eval(std::span<const double> x) const {
  ExtReal best = ExtReal::plus_inf();
  for (const PwlqPiece& p : pieces_) {
    if (!piece_contains(p, x)) continue;
    double v = 0.0;
    for (int i = 0; i < n_; ++i) {
      v += p.q[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
      for (int j = 0; j < n_; ++j)
        v += 0.5 * p.A[static_cast<size_t>(i * n_ + j)] * x[static_cast<size_t>(i)] *
             x[static_cast<size_t>(j)];
    }
    best = ext_min(best, ExtReal::from_double(v - p.u));
  }
  return best;
}

PwlqVerdict is_pwlq_explicit(const PwlqFn& decl, const CompositeProblem& p,
                             int samples, double tol) {
  PwlqVerdict v;
  v.mode = PwlqVerdict::Mode::Explicit;
  if (decl.n() != p.n() + p.m())
    throw DimensionMismatch("PWLQ declaration must cover (x,u)");
  PerturbationFn f(p);
  std::mt19937 rng(20240915);
  std::uniform_int_distribution<std::size_t> dx(0, p.x_grid().size() - 1);
  std::uniform_int_distribution<std::size_t> du(0, p.u_grid().size() - 1);
  // Overlap consistency: points contained in two pieces must agree.
  for (int s = 0; s < samples; ++s) {
    std::size_t xi = dx(rng), ui = du(rng);
    auto xp = p.x_grid().point(xi);
    auto up = p.u_grid().point(ui);
    Vec z(xp.begin(), xp.begin() + p.n());
    z.insert(z.end(), up.begin(), up.begin() + p.m());
    ExtReal first = ExtReal::plus_inf();
    for (const PwlqPiece& piece : decl.pieces()) {
      if (!decl.piece_contains(piece, z)) continue;
      double val = 0.0;
      for (int i = 0; i < decl.n(); ++i) {
        val += piece.q[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
        for (int j = 0; j < decl.n(); ++j)
          val += 0.5 * piece.A[static_cast<size_t>(i * decl.n() + j)] *
                 z[static_cast<size_t>(i)] * z[static_cast<size_t>(j)];
      }
      ExtReal cand = ExtReal::from_double(val - piece.u);
      if (first.is_plus_inf()) {
        first = cand;
      } else if (std::abs(first.value() - cand.value()) > tol) {
        throw PieceInconsistent("overlapping pieces disagree at " + fmt_vec(z));
      }
    }
    ExtReal fv = f.value(xi, ui);
    ExtReal dv = decl.eval(z);
    if (!ext_close(fv, dv, tol * (1.0 + (fv.is_finite() ? std::abs(fv.value()) : 0.0))))
      throw SampleMismatch("PWLQ declaration disagrees with f at " + fmt_vec(z));
  }
  v.is_pwlq = true;
  v.detail = "explicit declaration validated";
  return v;
}

PwlqVerdict is_pwlq_declared(const CompositeProblem& p, int lines,
                             double reject_fraction) {
  PwlqVerdict v;
  v.mode = PwlqVerdict::Mode::DeclaredSpotChecked;
  PerturbationFn f(p);
  std::mt19937 rng(20240916);
  const int n = p.n(), m = p.m();
  std::uniform_int_distribution<std::size_t> dx(0, p.x_grid().size() - 1);
  std::uniform_int_distribution<std::size_t> du(0, p.u_grid().size() - 1);
  std::uniform_int_distribution<int> daxis(0, n + m - 1);
  std::size_t stencils = 0, violations = 0;
  for (int l = 0; l < lines; ++l) {
    std::size_t xi = dx(rng), ui = du(rng);
    int axis = daxis(rng);
    bool on_x = axis < n;
    const Grid& g = on_x ? p.x_grid() : p.u_grid();
    int ga = on_x ? axis : axis - n;
    int count = g.axis(ga).count;
    auto idx = g.unflatten(on_x ? xi : ui);
    // Walk the whole line through this node along the chosen axis.
    for (int i0 = 0; i0 + 3 < count; ++i0) {
      ExtReal vals[4];
      bool all_finite = true;
      for (int t = 0; t < 4; ++t) {
        auto jdx = idx;
        jdx[static_cast<size_t>(ga)] = i0 + t;
        std::size_t flat = g.flatten(std::span<const int>(jdx.data(), static_cast<size_t>(g.dim())));
        vals[t] = on_x ? f.value(flat, ui) : f.value(xi, flat);
        if (!vals[t].is_finite()) all_finite = false;
      }
      if (!all_finite) continue;
      ++stencils;
      double third = vals[3].value() - 3 * vals[2].value() + 3 * vals[1].value() -
                     vals[0].value();
      double scale = 1.0;
      for (const ExtReal& e : vals) scale = std::max(scale, std::abs(e.value()));
      if (std::abs(third) > 1e-6 * scale) ++violations;
    }
  }
  v.stencil_violation_fraction =
      stencils ? static_cast<double>(violations) / static_cast<double>(stencils) : 0.0;
  v.is_pwlq = v.stencil_violation_fraction <= reject_fraction;
  v.detail = "declared, spot-checked: " + std::to_string(violations) + "/" +
             std::to_string(stencils) + " stencils with nonzero third difference";
  return v;
}

namespace {

// Monte Carlo joint midpoint convexity of the bivariate f(x,u).
bool f_jointly_convex_mc(const CompositeProblem& p, int samples) {
  PerturbationFn f(p);
  std::mt19937 rng(20240917);
  std::uniform_int_distribution<std::size_t> dx(0, p.x_grid().size() - 1);
  std::uniform_int_distribution<std::size_t> du(0, p.u_grid().size() - 1);
  auto mid_node = [](const Grid& g, std::size_t a, std::size_t b,
                     std::size_t& out) {
    auto ia = g.unflatten(a), ib = g.unflatten(b);
    std::array<int, 3> im{0, 0, 0};
    for (int d = 0; d < g.dim(); ++d) {
      int s = ia[static_cast<size_t>(d)] + ib[static_cast<size_t>(d)];
      if (s % 2) return false;
      im[static_cast<size_t>(d)] = s / 2;
    }
    out = g.flatten(std::span<const int>(im.data(), static_cast<size_t>(g.dim())));
    return true;
  };
  int done = 0;
  for (int it = 0; it < samples * 4 && done < samples; ++it) {
    std::size_t x1 = dx(rng), x2 = dx(rng), u1 = du(rng), u2 = du(rng);
    std::size_t xm, um;
    if (!mid_node(p.x_grid(), x1, x2, xm) || !mid_node(p.u_grid(), u1, u2, um))
      continue;
    ++done;
    ExtReal lhs = f.value(xm, um) + f.value(xm, um);
    ExtReal rhs = f.value(x1, u1) + f.value(x2, u2);
    double tol = 1e-7;
    if (rhs.is_finite()) tol = 1e-7 * (1.0 + std::abs(rhs.value()));
    if (lhs > rhs + ExtReal::finite(2 * tol)) return false;
  }
  return true;
}

int bool_verdict(bool b) { return b ? 1 : 0; }

}  // namespace

ConditionReport qualification_battery(const CompositeProblem& p,
                                      const std::optional<Cone>& declared_k,
                                      const std::optional<PwlqFn>& pwlq_decl) {
  ConditionReport rep;
  const int m = p.m();
  const bool exact = p.dom_g_vrep.has_value() && p.f_image_vrep.has_value();

  // 0 ∈ U and 0 ∈ rint(U).
  Vec zero(static_cast<size_t>(m), 0.0);
  int in_u = -1, in_rint_u = -1;
  if (exact) {
    VRepSet u = vrep_diff(*p.dom_g_vrep, *p.f_image_vrep);
    in_u = bool_verdict(contains_point(u, zero));
    in_rint_u = bool_verdict(contains_rint(u, zero));
  } else {
    SampledSet u = u_set(p);
    double h = p.w_grid().max_spacing();
    auto near = [&](std::span<const double> q) {
      for (const Vec& pt : u.points) {
        double d = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a)
          d = std::max(d, std::abs(pt[a] - q[a]));
        if (d <= 0.51 * h) return true;
      }
      return false;
    };
    in_u = bool_verdict(near(zero));
    bool rint_ok = in_u == 1;
    for (int a = 0; a < m && rint_ok; ++a) {
      Vec probe = zero;
      probe[static_cast<size_t>(a)] = h;
      if (!near(probe)) rint_ok = false;
      probe[static_cast<size_t>(a)] = -h;
      if (!near(probe)) rint_ok = false;
    }
    in_rint_u = bool_verdict(rint_ok);
  }
  rep.entries.push_back({"zero_in_U", "Udef", in_u, exact, ""});
  rep.entries.push_back({"zero_in_rint_U", "Udef", in_rint_u, exact, ""});

  // Candidate cones filtered to the K_F ⊆ K ⊆ -hzn(g) band; the cone-based
  // conditions hold for one member iff they hold for every member.
  ConeEstimate kf, hzn;
  bool have_estimates = false;
  try {
    kf = k_f_estimate(p.F(), p.x_grid());
    hzn = horizon_cone(p.g_sampled());
    have_estimates = true;
  } catch (const NonConvexDomain&) {
  }
  std::vector<std::pair<std::string, Cone>> candidates;
  if (declared_k) candidates.push_back({"declared", *declared_k});
  if (have_estimates) {
    candidates.push_back({"K_F", kf.cone});
    candidates.push_back({"-hzn(g)", hzn.cone.negated()});
  }
  bool kfkg_nonempty =
      have_estimates && cone_subset(kf.cone, hzn.cone.negated());
  rep.entries.push_back({"KF_in_minus_hzn", "allconvexitypropequiv",
                         have_estimates ? bool_verdict(kfkg_nonempty) : -1, false,
                         ""});

  int csgeneral_any = 0, cspwlq_any = 0, interior_any = 0;
  bool any_member = false;
  for (const auto& [label, k] : candidates) {
    bool member = have_estimates && cone_subset(kf.cone, k) &&
                  cone_subset(k, hzn.cone.negated());
    if (!exact) {
      rep.entries.push_back({"csgeneralf@" + label, "csgeneralf", -1, false,
                             member ? "in K_F..-hzn band" : "outside band"});
      continue;
    }
    VRepSet img_k = vrep_plus_cone(*p.f_image_vrep, k);
    VRepSet diff = vrep_diff(*p.dom_g_vrep, img_k);
    int v_general = bool_verdict(contains_rint(diff, zero));
    VRepSet domg_minus_k = vrep_minus_cone(*p.dom_g_vrep, k);
    VRepSet diff2 = vrep_diff(domg_minus_k, *p.f_image_vrep);
    int v_pwlq = bool_verdict(contains_point(diff2, zero));
    const VRepSet& img_rint_src =
        p.f_image_rint_vrep ? *p.f_image_rint_vrep : *p.f_image_vrep;
    int v_interior = bool_verdict(contains_rint(vrep_diff(domg_minus_k, img_rint_src), zero));
    rep.entries.push_back({"csgeneralf@" + label, "csgeneralf", v_general, true,
                           member ? "in K_F..-hzn band" : "outside band"});
    rep.entries.push_back({"cspwlqf@" + label, "cspwlqf", v_pwlq, true, ""});
    rep.entries.push_back({"interior_qc@" + label, "qc:rewritten", v_interior, true, ""});
    if (member) {
      any_member = true;
      csgeneral_any |= v_general;
      cspwlq_any |= v_pwlq;
      interior_any |= v_interior;
    }
  }
  rep.entries.push_back({"csgeneralf", "csgeneralf",
                         exact ? (any_member ? csgeneral_any : 0) : -1, exact,
                         any_member ? "" : "no candidate cone in the band"});
  rep.entries.push_back({"cspwlqf", "cspwlqf",
                         exact ? (any_member ? cspwlq_any : 0) : -1, exact, ""});
  rep.entries.push_back({"interior_qc", "qc:rewritten",
                         exact ? (any_member ? interior_any : 0) : -1, exact, ""});

  // rint(dom f0) ∩ rint(dom F) != ∅ (f0 ≡ 0 has full domain).
  {
    VRepSet domf0 = p.dom_f0_vrep ? *p.dom_f0_vrep : vrep_full(p.n());
    int v = -1;
    bool ex = p.dom_F_vrep.has_value();
    if (ex) {
      Vec z(static_cast<size_t>(p.n()), 0.0);
      v = bool_verdict(contains_rint(vrep_diff(domf0, *p.dom_F_vrep), z));
    }
    rep.entries.push_back(
        {"rint_domf0_domF", "simplecompositecoro:inf:conv:condion", v, ex, ""});
  }

  // PWLQ relaxation applicability.
  int pwlq_v = -1;
  std::string pwlq_detail;
  if (pwlq_decl) {
    PwlqVerdict pv = is_pwlq_explicit(*pwlq_decl, p);
    pwlq_v = bool_verdict(pv.is_pwlq);
    pwlq_detail = pv.detail;
  } else if (p.flags().pwlq_f) {
    PwlqVerdict pv = is_pwlq_declared(p);
    pwlq_v = bool_verdict(pv.is_pwlq);
    pwlq_detail = pv.detail;
  } else {
    pwlq_v = 0;
    pwlq_detail = "not declared";
  }
  rep.entries.push_back({"pwlq", "pwlq", pwlq_v, false, pwlq_detail});

  // Slater-style conclusions at u = 0 (U = dom p0), verified empirically by
  // the duality module.
  bool strong = in_rint_u == 1 || (in_u == 1 && pwlq_v == 1);
  rep.entries.push_back({"q0_proper", "slater:primal", in_u, exact,
                         "q_0 proper when 0 ∈ dom(p_0)"});
  rep.entries.push_back({"q0_closed_attain", "slater:primal",
                         bool_verdict(strong), exact,
                         "q_0 closed and dual attainment when 0 ∈ rint(U) or PWLQ"});

  rep.f_convexity_diagnostic = f_jointly_convex_mc(p, 4000);
  rep.equality_certificate =
      p.flags().f_gamma0_declared && rep.f_convexity_diagnostic && strong;
  rep.entries.push_back({"equality_certificate", "compositeineq",
                         bool_verdict(rep.equality_certificate), exact,
                         rep.f_convexity_diagnostic ? "" : "f convexity diagnostic failed"});
  return rep;
}

}  // namespace compconj

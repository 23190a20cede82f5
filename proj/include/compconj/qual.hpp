#pragma once

#include <functional>
#include <string>

#include "compconj/composite.hpp"
#include "compconj/kconv.hpp"
#include "compconj/vrep.hpp"

namespace compconj {

struct DegenerateSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PieceInconsistent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SampleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingVRep : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// x ∈ conv(points) + cone(rays), decided by a phase-1 simplex (Bland's rule,
// deterministic) on these tiny instances.
bool contains_point(const VRepSet& s, std::span<const double> x);

// Relative-interior probe: x ∈ S and x ± eps*b_i ∈ S for an orthonormal basis
// {b_i} of the affine hull of S. eps < 0 picks 1e-6*(1+max generator norm).
bool contains_rint(const VRepSet& s, std::span<const double> x, double eps = -1.0);

// A point in rint(S): centroid of the points plus the ray sum.
Vec rint_point(const VRepSet& s);

// Orthonormal basis of the affine hull directions of S.
std::vector<Vec> affine_hull_basis(const VRepSet& s);

struct AffineIneq {
  Vec a;
  double b = 0.0;  // a·x + b <= 0
};

struct PwlqPiece {
  std::vector<AffineIneq> polyhedron;
  std::vector<double> A;  // n*n row-major, symmetric
  Vec q;
  double u = 0.0;
};

// Piecewise linear-quadratic function: min over pieces containing x of
// (1/2)<x,Ax> + <q,x> - u, +inf when no piece contains x.
class PwlqFn {
 public:
  PwlqFn(int n, std::vector<PwlqPiece> pieces);
  int n() const { return n_; }
  ExtReal eval(std::span<const double> x) const;
  bool piece_contains(const PwlqPiece& p, std::span<const double> x,
                      double tol = 1e-9) const;
  const std::vector<PwlqPiece>& pieces() const { return pieces_; }

 private:
  int n_ = 0;
  std::vector<PwlqPiece> pieces_;
};

struct PwlqVerdict {
  bool is_pwlq = false;
  enum class Mode { Explicit, DeclaredSpotChecked } mode = Mode::DeclaredSpotChecked;
  double stencil_violation_fraction = 0.0;
  std::string detail;
};

// Explicit declaration: piece boundary consistency plus agreement with the
// exactly evaluated f(x,u) on random product-lattice nodes.
PwlqVerdict is_pwlq_explicit(const PwlqFn& decl, const CompositeProblem& p,
                             int samples = 100, double tol = 1e-6);

// Flag-only declaration: third differences of f along product-lattice lines
// vanish off a measure-zero kink set for a PWLQ function; a cubic fails on
// every stencil.
PwlqVerdict is_pwlq_declared(const CompositeProblem& p, int lines = 200,
                             double reject_fraction = 0.25);

struct ConditionEntry {
  std::string name;
  std::string eq_tag;  // serialized as paper_eq in the report schema
  int verdict = -1;    // 1 true, 0 false, -1 unknown
  bool exact = false;
  std::string witness;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  bool equality_certificate = false;
  bool f_convexity_diagnostic = false;  // Monte Carlo joint midpoint test

  const ConditionEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  int verdict(const std::string& name) const {
    const ConditionEntry* e = find(name);
    return e ? e->verdict : -1;
  }
};

// Evaluates the qualification-condition battery: 0 ∈ U and 0 ∈ rint(U),
// the cone-based equivalents over candidate cones in K_F..-hzn(g), the
// PWLQ relaxation, the f0/F relative-interior overlap, and the Slater-style
// conclusion lines the duality module verifies empirically. Exact verdicts
// need the declared V-representations; otherwise the battery degrades to
// approximate point-cloud mode.
ConditionReport qualification_battery(const CompositeProblem& p,
                                      const std::optional<Cone>& declared_k,
                                      const std::optional<PwlqFn>& pwlq_decl = {});

}  // namespace compconj

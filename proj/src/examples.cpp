#include "compconj/scenario.hpp"

namespace compconj {

namespace {

// Variant of the cubic/linear-map composite: F(x) = (0, x2),
// g(w) = w1^3/3 on w1 >= 0. The composite is identically zero, its
// conjugate the indicator of the origin; the qualification 0 in rint(U)
// fails until g is regularized along K2 = R+x{0}.
const char* kEx51 = R"json({
  "name": "ex51",
  "f0": "0",
  "g": "pow(w1,3)/3 if w1 >= 0 else +inf",
  "F": {"components": ["0", "x2"], "guard": ""},
  "grids": {
    "x": [[-4,4,81],[-4,4,81]],
    "u": [[-4,4,81],[-4,4,81]],
    "v": [[-4,4,81],[-4,4,81]],
    "y": [[-8,8,161],[-8,8,161]],
    "w": [[-4,4,81],[-4,4,81]]
  },
  "cone": "0xR",
  "flags": {"polyhedral_domg": true, "polyhedral_F": true, "pwlq_f": false, "f_gamma0": true},
  "vreps": {
    "dom_g": {"points": [[0,0]], "rays": [[1,0],[0,1],[0,-1]]},
    "F_image": {"points": [[0,0]], "rays": [[0,1],[0,-1]]},
    "dom_F": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]}
  },
  "probes": [{"v": [0,0], "u": [0,0]}],
  "expected": {"checks": [
    {"id": "gstar_line", "kind": "fn_line", "target": "g_star", "free_axis": 0,
     "fix": [0.0], "expr": "(2/3)*pow(v1, 3/2) if v1 >= 0 else 0",
     "tol": 5e-2, "exclude_suspect": true},
    {"id": "rho_delta", "kind": "delta_pattern", "target": "rho",
     "center": [0,0], "within_nodes": 1, "value": 0.0, "tol": 1e-6},
    {"id": "zero_in_U", "kind": "condition", "name": "zero_in_U", "value": true},
    {"id": "zero_in_rint_U", "kind": "condition", "name": "zero_in_rint_U", "value": false},
    {"id": "csgeneralf_K1", "kind": "condition", "name": "csgeneralf@declared", "value": false},
    {"id": "pwlq_rejected", "kind": "condition", "name": "pwlq", "value": false},
    {"id": "gK2_values", "kind": "regularize", "cone": "R+x0",
     "expect_improper": false, "values_expr": "pow(w1,3)/3 if w1 >= 0 else 0",
     "tol": 1e-9},
    {"id": "gstar_K2_identity", "kind": "reg_conj_identity", "cone": "R+x0", "tol": 1e-6},
    {"id": "KF_zero", "kind": "cone_match", "target": "K_F", "rays": [], "angle_tol_deg": 2.0},
    {"id": "hzn_axis", "kind": "cone_match", "target": "hzn",
     "rays": [[0,1],[0,-1]], "angle_tol_deg": 2.0},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

// Same map with g replaced by its K2-monotone regularization: the
// qualification now holds and rho reproduces the composite conjugate exactly.
const char* kEx51Repaired = R"json({
  "name": "ex51-repaired",
  "f0": "0",
  "g": "pow(w1,3)/3 if w1 >= 0 else 0",
  "F": {"components": ["0", "x2"], "guard": ""},
  "grids": {
    "x": [[-4,4,81],[-4,4,81]],
    "u": [[-4,4,81],[-4,4,81]],
    "v": [[-4,4,81],[-4,4,81]],
    "y": [[-8,8,161],[-8,8,161]],
    "w": [[-4,4,81],[-4,4,81]]
  },
  "cone": "R+x0",
  "flags": {"polyhedral_domg": true, "polyhedral_F": true, "pwlq_f": false, "f_gamma0": true},
  "vreps": {
    "dom_g": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]},
    "F_image": {"points": [[0,0]], "rays": [[0,1],[0,-1]]},
    "dom_F": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]}
  },
  "probes": [{"v": [0,0], "u": [0,0]}],
  "expected": {"checks": [
    {"id": "gstar_line", "kind": "fn_line", "target": "g_star", "free_axis": 0,
     "fix": [0.0], "expr": "(2/3)*pow(v1, 3/2) if v1 >= 0 else +inf",
     "tol": 5e-2, "exclude_suspect": true},
    {"id": "rho_delta", "kind": "delta_pattern", "target": "rho",
     "center": [0,0], "within_nodes": 1, "value": 0.0, "tol": 1e-6},
    {"id": "zero_in_rint_U", "kind": "condition", "name": "zero_in_rint_U", "value": true},
    {"id": "csgeneralf_K2", "kind": "condition", "name": "csgeneralf@declared", "value": true},
    {"id": "equality_cert", "kind": "equality_certificate", "value": true},
    {"id": "rho_equals_conj", "kind": "rho_equality", "tol": 1e-6},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

// Quadratic first component with an absolute-value outer function:
// (g∘F)*(v) = v1^2/2 + indicator of v2 = 0, g* the indicator of
// [-1,1]x{0}; K_F and hzn(g) are axis cones with empty intersection band.
const char* kEx52 = R"json({
  "name": "ex52",
  "f0": "0",
  "g": "abs(w1)",
  "F": {"components": ["pow(x1,2)/2", "x2"], "guard": ""},
  "grids": {
    "x": [[-4,4,81],[-4,4,81]],
    "u": [[-4,4,81],[-4,4,81]],
    "v": [[-4,4,81],[-4,4,81]],
    "y": [[-8,8,161],[-8,8,161]],
    "w": [[-4,4,81],[-4,4,81]]
  },
  "cone": "R+x0",
  "flags": {"polyhedral_domg": true, "polyhedral_F": false, "pwlq_f": false, "f_gamma0": false},
  "vreps": {
    "dom_g": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]},
    "F_image": {"points": [[0,0]], "rays": [[1,0],[0,1],[0,-1]]},
    "dom_F": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]}
  },
  "probes": [{"v": [0,0], "u": [0,0]}],
  "expected": {"checks": [
    {"id": "comp_conj_line", "kind": "fn_line", "target": "composite_conj",
     "free_axis": 0, "fix": [0.0], "expr": "pow(v1,2)/2", "tol": 5e-2,
     "exclude_suspect": true},
    {"id": "comp_conj_domain", "kind": "fn_domain", "target": "composite_conj",
     "box": [[-4,4],[0,0]], "within_nodes": 1, "tol": 1e-6},
    {"id": "rho_line", "kind": "fn_line", "target": "rho", "free_axis": 0,
     "fix": [0.0], "expr": "pow(v1,2)/2", "tol": 5e-2, "exclude_suspect": true},
    {"id": "rho_domain", "kind": "fn_domain", "target": "rho",
     "box": [[-4,4],[0,0]], "within_nodes": 1, "tol": 1e-6},
    {"id": "gstar_domain", "kind": "fn_domain", "target": "g_star",
     "box": [[-1,1],[0,0]], "within_nodes": 1, "value_expr": "0", "tol": 1e-9},
    {"id": "KF", "kind": "cone_match", "target": "K_F", "rays": [[1,0]],
     "angle_tol_deg": 2.0},
    {"id": "hzn", "kind": "cone_match", "target": "hzn", "rays": [[0,1],[0,-1]],
     "angle_tol_deg": 2.0},
    {"id": "kfkg_empty", "kind": "kfkg_empty", "value": true},
    {"id": "gKF_values", "kind": "regularize", "cone": "R+x0",
     "expect_improper": false, "values_expr": "max(w1, 0)", "tol": 1e-9},
    {"id": "gstar_KF_identity", "kind": "reg_conj_identity", "cone": "R+x0", "tol": 1e-6},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

// The repaired variant (g = max(w1,0)): the perturbation function becomes
// jointly convex and PWLQ, the certificate applies, and the chain rule holds
// with equality.
const char* kEx52Repaired = R"json({
  "name": "ex52-repaired",
  "f0": "0",
  "g": "max(w1, 0)",
  "F": {"components": ["pow(x1,2)/2", "x2"], "guard": ""},
  "grids": {
    "x": [[-4,4,81],[-4,4,81]],
    "u": [[-4,4,81],[-4,4,81]],
    "v": [[-4,4,81],[-4,4,81]],
    "y": [[-8,8,161],[-8,8,161]],
    "w": [[-4,4,81],[-4,4,81]]
  },
  "cone": "R+x0",
  "flags": {"polyhedral_domg": true, "polyhedral_F": false, "pwlq_f": true, "f_gamma0": true},
  "vreps": {
    "dom_g": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]},
    "F_image": {"points": [[0,0]], "rays": [[1,0],[0,1],[0,-1]]},
    "dom_F": {"points": [[0,0]], "rays": [[1,0],[-1,0],[0,1],[0,-1]]}
  },
  "probes": [{"v": [0,0], "u": [0,0]}, {"v": [1,0], "u": [0,0]}],
  "expected": {"checks": [
    {"id": "rho_line", "kind": "fn_line", "target": "rho", "free_axis": 0,
     "fix": [0.0], "expr": "pow(v1,2)/2", "tol": 5e-2, "exclude_suspect": true},
    {"id": "gstar_KF_domain", "kind": "fn_domain", "target": "g_star",
     "box": [[0,1],[0,0]], "within_nodes": 1, "value_expr": "0", "tol": 1e-9},
    {"id": "zero_in_rint_U", "kind": "condition", "name": "zero_in_rint_U", "value": true},
    {"id": "equality_cert", "kind": "equality_certificate", "value": true},
    {"id": "rho_equals_conj", "kind": "rho_equality", "tol": 1e-6},
    {"id": "chain_origin", "kind": "chain_rule", "x": [0,0],
     "expect_equality": true, "tol": 1e-3},
    {"id": "chain_right", "kind": "chain_rule", "x": [1,0],
     "expect_equality": true, "tol": 1e-3},
    {"id": "chain_left", "kind": "chain_rule", "x": [-1,0],
     "expect_equality": true, "tol": 1e-3},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

// Square-root coupling: regularizing g along R+x{0} collapses to -inf above
// the axis (improper), while restricting g to the range of F first yields the
// proper indicator of the axis.
const char* kEx53 = R"json({
  "name": "ex53",
  "f0": "0",
  "g": "-sqrt(w1*w2) if w1 >= 0 and w2 >= 0 else +inf",
  "F": {"components": ["pow(x1,2)", "0"], "guard": ""},
  "grids": {
    "x": [[-2,2,81]],
    "u": [[-4,4,81],[-4,4,81]],
    "v": [[-4,4,81]],
    "y": [[-8,8,161],[-8,8,161]],
    "w": [[-4,4,81],[-4,4,81]]
  },
  "cone": "R+x0",
  "flags": {"polyhedral_domg": true, "polyhedral_F": false, "pwlq_f": false, "f_gamma0": false},
  "vreps": {
    "dom_g": {"points": [[0,0]], "rays": [[1,0],[0,1]]},
    "F_image": {"points": [[0,0]], "rays": [[1,0]]},
    "dom_F": {"points": [[0]], "rays": [[1],[-1]]}
  },
  "probes": [{"v": [0], "u": [0,0]}],
  "expected": {"checks": [
    {"id": "gK_improper", "kind": "regularize", "cone": "R+x0",
     "expect_improper": true, "improper_region": {"axis": 1, "value": 0.0}},
    {"id": "gK_restricted", "kind": "regularize",
     "g_expr": "-sqrt(w1*w2) if w1 >= 0 and w2 >= 0 and w2 <= 0 else +inf",
     "cone": "R+x0", "expect_improper": false,
     "domain": {"box": [[-4,4],[0,0]], "within_nodes": 1, "value_expr": "0"},
     "tol": 1e-9},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

// f(x,u) = x + indicator(x^2 + u <= 0): strong duality with primal
// attainment but no dual attainment; p0(u) = -sqrt(-u), q0 identically 0.
const char* kNonattainDual = R"json({
  "name": "nonattain-dual",
  "f0": "x1",
  "g": "0 if u1 <= 0 else +inf",
  "F": {"components": ["pow(x1,2)"], "guard": ""},
  "grids": {
    "x": [[-4,4,321]],
    "u": [[-4,4,321]],
    "v": [[-4,4,161]],
    "y": [[-2,256,517]],
    "w": [[-4,4,321]]
  },
  "flags": {"polyhedral_domg": true, "polyhedral_F": false, "pwlq_f": false, "f_gamma0": true},
  "vreps": {
    "dom_g": {"points": [[0]], "rays": [[-1]]},
    "F_image": {"points": [[0]], "rays": [[1]]},
    "dom_F": {"points": [[0]], "rays": [[1],[-1]]}
  },
  "probes": [{"v": [0], "u": [0]}],
  "expected": {"checks": [
    {"id": "p0_sqrt", "kind": "fn_line", "target": "p0", "free_axis": 0,
     "expr": "-sqrt(-u1) if u1 <= 0 else +inf", "tol": 5e-2},
    {"id": "q0_zero", "kind": "fn_line", "target": "q0", "free_axis": 0,
     "expr": "0", "tol": 5e-2},
    {"id": "fstar_quarter", "kind": "scalar", "target": "fstar",
     "v": [0], "y": [1], "value": 0.25, "tol": 1e-3},
    {"id": "fstar_zero", "kind": "scalar", "target": "fstar",
     "v": [1], "y": [0], "value": 0.0, "tol": 1e-9},
    {"id": "primal_attained", "kind": "primal_argmin", "v": [0], "u": [0],
     "points": [[0]], "within_nodes": 1, "tol": 1e-6},
    {"id": "dual_not_attained", "kind": "dual_nonattain", "v": [0], "u": [0],
     "tol": 1e-6},
    {"id": "subdiff_p0_empty", "kind": "p0_subdiff_empty", "at": [0], "tol": 5e-3},
    {"id": "subdiff_q0_origin", "kind": "q0_subdiff_at", "at": [0],
     "points": [[0]], "within_nodes": 1, "tol": 5e-2},
    {"id": "zero_in_U", "kind": "condition", "name": "zero_in_U", "value": true},
    {"id": "zero_in_rint_U", "kind": "condition", "name": "zero_in_rint_U", "value": false},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

// f(x,u) = exp(x) + u: dual attainment at y = 1 but the primal infimum only
// approached as x goes to -inf; p0(u) = u.
const char* kNonattainPrimal = R"json({
  "name": "nonattain-primal",
  "f0": "exp(x1)",
  "g": "u1",
  "F": {"components": ["0"], "guard": ""},
  "grids": {
    "x": [[-4,4,321]],
    "u": [[-4,4,161]],
    "v": [[-4,4,161]],
    "y": [[-4,6,201]],
    "w": [[-4,4,161]]
  },
  "flags": {"polyhedral_domg": true, "polyhedral_F": true, "pwlq_f": false, "f_gamma0": true},
  "vreps": {
    "dom_g": {"points": [[0]], "rays": [[1],[-1]]},
    "F_image": {"points": [[0]]},
    "dom_F": {"points": [[0]], "rays": [[1],[-1]]}
  },
  "probes": [{"v": [0], "u": [0]}],
  "expected": {"checks": [
    {"id": "p0_linear", "kind": "fn_line", "target": "p0", "free_axis": 0,
     "expr": "u1", "tol": 5e-2},
    {"id": "q0_entropy", "kind": "fn_line", "target": "q0", "free_axis": 0,
     "expr": "v1*ln(v1) - v1 if v1 > 0 else 0", "range": [0, 4],
     "tol": 5e-2},
    {"id": "fstar_minus_one", "kind": "scalar", "target": "fstar",
     "v": [1], "y": [1], "value": -1.0, "tol": 1e-2},
    {"id": "dual_attained", "kind": "dual_argmin", "v": [0], "u": [0],
     "points": [[1]], "within_nodes": 1, "tol": 1e-6},
    {"id": "primal_not_attained", "kind": "primal_nonattain", "v": [0], "u": [0],
     "tol": 1e-6},
    {"id": "zero_in_rint_U", "kind": "condition", "name": "zero_in_rint_U", "value": true},
    {"id": "weak", "kind": "weak_duality_all", "value": true}
  ]}
})json";

}  // namespace

const std::vector<std::string>& builtin_example_names() {
  static const std::vector<std::string> names = {
      "ex51",  "ex51-repaired", "ex52",           "ex52-repaired",
      "ex53",  "nonattain-dual", "nonattain-primal"};
  return names;
}

Json builtin_example_spec(const std::string& name) {
  const char* text = nullptr;
  if (name == "ex51") text = kEx51;
  else if (name == "ex51-repaired") text = kEx51Repaired;
  else if (name == "ex52") text = kEx52;
  else if (name == "ex52-repaired") text = kEx52Repaired;
  else if (name == "ex53") text = kEx53;
  else if (name == "nonattain-dual") text = kNonattainDual;
  else if (name == "nonattain-primal") text = kNonattainPrimal;
  if (!text) throw UnknownExample("unknown example '" + name + "'");
  return Json::parse(text);
}

}  // namespace compconj

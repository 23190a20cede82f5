#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "compconj/grid.hpp"

namespace compconj {

enum class TransformMethod { BruteForce, FastLLT };

struct TransformConfig {
  TransformMethod method = TransformMethod::FastLLT;
  Grid dual_grid;
  double tol_fenchel = 1e-6;
};

// Values whose magnitude passes this cap are stored as the matching infinity,
// so indicator-type conjugates stay recoverable from grids.
inline constexpr double kInfCap = 1e12;

// Conjugate plus per-node truncation diagnostics. A dual node is
// truncation-suspect when every primal argmax (within a tie tolerance) lies
// on the primal grid boundary; its value then reflects the grid box rather
// than the function.
struct ConjugateResult {
  GridFn fn;
  std::vector<std::uint8_t> suspect;

  bool is_suspect(std::size_t i) const { return suspect[i] != 0; }
  // Finite and trusted: the discrete stand-in for "v in dom(h*)".
  bool trusted_finite(std::size_t i) const {
    return fn[i].is_finite() && suspect[i] == 0;
  }
};

// Discrete Legendre-Fenchel transform: h*(v) = sup over primal nodes of
// <v,x> - h(x) under inf-addition. h identically +inf gives -inf everywhere;
// any -inf node gives +inf everywhere. BruteForce and FastLLT agree within
// tol_fenchel (FastLLT factorizes the sup per axis and conjugates the lower
// convex hull on each line, which leaves the result unchanged).
ConjugateResult conjugate_full(const GridFn& h, const TransformConfig& cfg);
GridFn conjugate(const GridFn& h, const TransformConfig& cfg);

// Pointwise conjugate at an arbitrary dual point (brute force over nodes).
ExtReal conjugate_at(const GridFn& h, std::span<const double> v);

// conjugate twice: dual grid inward, primal grid outward. Result <= h.
ConjugateResult biconjugate_full(const GridFn& h, const TransformConfig& cfg);
GridFn biconjugate(const GridFn& h, const TransformConfig& cfg);

// (h1 □ h2)(w) = inf over nodes z of h1(z) + h2(w-z); h2 looked up by
// multilinear interpolation, +inf corners poisoning the cell. Output on h1's
// grid.
GridFn inf_convolution(const GridFn& h1, const GridFn& h2);

// h(x) + h*(v) - <v,x> under inf-addition; never below -tol for consistent
// inputs.
ExtReal fenchel_gap(const GridFn& h, const GridFn& h_star, std::size_t x_node,
                    std::size_t v_node);

// Dual nodes v with fenchel_gap(h, h*, x_bar, v) <= tol; empty when h(x_bar)
// is not finite.
std::vector<std::size_t> subdifferential(const GridFn& h, const GridFn& h_star,
                                         std::size_t x_bar, double tol);

}  // namespace compconj

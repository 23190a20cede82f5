#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "compconj/extreal.hpp"
#include "compconj/grid.hpp"

namespace compconj {

struct MalformedExpr : std::runtime_error {
  MalformedExpr(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " +
                           std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};
struct ArityMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
struct ExprNode;
}

// Parsed scalar expression over up to three variables. Accepted grammar:
//   variables x1..x3 / w1..w3 / u1..u3 (aliases for axis 1..3; v*/y* also
//   accepted), numeric literals, +inf, binary + - * /, pow(e,k), unary
//   abs/sqrt/exp/ln/neg, binary max/min, and `e1 if cond else e2` where cond
//   is a conjunction (`and`) of affine comparisons with <=, <, ==, >=, >.
// Whitespace-insensitive; parse errors carry line and column.
//
// Evaluation maps undefined operations out of the domain: sqrt of a negative
// and ln of a nonpositive value give +inf, NaN results give +inf.
class FunctionExpr {
 public:
  FunctionExpr() = default;
  static FunctionExpr parse(std::string_view src);

  bool empty() const { return root_ == nullptr; }
  // Highest variable index used (1-based), 0 for constant expressions.
  int arity() const { return arity_; }
  ExtReal eval(std::span<const double> point) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  int arity_ = 0;
  std::string text_;
};

// Evaluates expr at every grid node. Requires expr arity <= grid dimension.
GridFn sample(const FunctionExpr& expr, const Grid& grid);

// Count of NaN-to-+inf mappings seen during evaluation (diagnostic).
std::uint64_t nan_eval_count();

}  // namespace compconj

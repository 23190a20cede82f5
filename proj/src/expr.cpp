#include "compconj/expr.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace compconj {

namespace {
std::atomic<std::uint64_t> g_nan_count{0};
}

std::uint64_t nan_eval_count() { return g_nan_count.load(); }

namespace detail {

enum class Op {
  Const,
  PlusInf,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Abs,
  Sqrt,
  Exp,
  Ln,
  Max,
  Min,
  Pow,
  Cond,  // a if cond else b: kids = {a, b}, comparisons attached
};

enum class Rel { Le, Lt, Eq, Ge, Gt };

struct Comparison {
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
  Rel rel;
};

struct ExprNode {
  Op op;
  double constant = 0.0;
  int var = 0;  // 1-based axis
  std::shared_ptr<const ExprNode> a, b;
  std::vector<Comparison> guards;
};

using NodePtr = std::shared_ptr<const ExprNode>;

double eval_raw(const ExprNode& n, std::span<const double> p);

bool guard_holds(const std::vector<Comparison>& guards, std::span<const double> p) {
  for (const Comparison& c : guards) {
    double l = eval_raw(*c.lhs, p);
    double r = eval_raw(*c.rhs, p);
    if (std::isnan(l) || std::isnan(r)) return false;
    double d = l - r;
    double eq_tol = 1e-12 * (1.0 + std::abs(l) + std::abs(r));
    bool ok = false;
    switch (c.rel) {
      case Rel::Le: ok = d <= eq_tol; break;
      case Rel::Lt: ok = d < -eq_tol; break;
      case Rel::Eq: ok = std::abs(d) <= eq_tol; break;
      case Rel::Ge: ok = d >= -eq_tol; break;
      case Rel::Gt: ok = d > eq_tol; break;
    }
    if (!ok) return false;
  }
  return true;
}

double eval_raw(const ExprNode& n, std::span<const double> p) {
  switch (n.op) {
    case Op::Const: return n.constant;
    case Op::PlusInf: return std::numeric_limits<double>::infinity();
    case Op::Var: return p[static_cast<size_t>(n.var - 1)];
    case Op::Add: return eval_raw(*n.a, p) + eval_raw(*n.b, p);
    case Op::Sub: return eval_raw(*n.a, p) - eval_raw(*n.b, p);
    case Op::Mul: return eval_raw(*n.a, p) * eval_raw(*n.b, p);
    case Op::Div: return eval_raw(*n.a, p) / eval_raw(*n.b, p);
    case Op::Neg: return -eval_raw(*n.a, p);
    case Op::Abs: return std::abs(eval_raw(*n.a, p));
    case Op::Sqrt: {
      double x = eval_raw(*n.a, p);
      if (x < 0) return std::numeric_limits<double>::infinity();
      return std::sqrt(x);
    }
    case Op::Exp: return std::exp(eval_raw(*n.a, p));
    case Op::Ln: {
      double x = eval_raw(*n.a, p);
      if (x <= 0) return std::numeric_limits<double>::infinity();
      return std::log(x);
    }
    case Op::Max: return std::max(eval_raw(*n.a, p), eval_raw(*n.b, p));
    case Op::Min: return std::min(eval_raw(*n.a, p), eval_raw(*n.b, p));
    case Op::Pow: return std::pow(eval_raw(*n.a, p), eval_raw(*n.b, p));
    case Op::Cond:
      return guard_holds(n.guards, p) ? eval_raw(*n.a, p) : eval_raw(*n.b, p);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

int max_var(const ExprNode& n) {
  int m = n.var;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  for (const Comparison& c : n.guards) {
    m = std::max(m, max_var(*c.lhs));
    m = std::max(m, max_var(*c.rhs));
  }
  return m;
}

// Recursive-descent parser. Keeps byte offsets so errors report line/column.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = conditional();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw MalformedExpr(msg, line, col);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool consume_word(std::string_view w) {
    skip_ws();
    if (src_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    if (end < src_.size()) {
      char c = src_[end];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
    }
    pos_ = end;
    return true;
  }

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr conditional() {
    NodePtr value = additive();
    if (consume_word("if")) {
      auto n = std::make_shared<ExprNode>();
      n->op = Op::Cond;
      n->a = value;
      n->guards.push_back(comparison());
      while (consume_word("and") || (peek() == '&' && consume('&') && consume('&')))
        n->guards.push_back(comparison());
      if (!consume_word("else")) fail("expected 'else' after condition");
      n->b = conditional();
      return n;
    }
    return value;
  }

  Comparison comparison() {
    Comparison c;
    c.lhs = additive();
    skip_ws();
    if (consume('<')) {
      c.rel = consume('=') ? Rel::Le : Rel::Lt;
    } else if (consume('>')) {
      c.rel = consume('=') ? Rel::Ge : Rel::Gt;
    } else if (consume('=')) {
      if (!consume('=')) fail("expected '==' in comparison");
      c.rel = Rel::Eq;
    } else {
      fail("expected comparison operator");
    }
    c.rhs = additive();
    return c;
  }

  NodePtr additive() {
    NodePtr e = multiplicative();
    for (;;) {
      skip_ws();
      // `+inf` as a literal is handled in primary(); a '+' followed by "inf"
      // in operator position still means addition of the literal.
      if (consume('+')) {
        e = make(Op::Add, e, multiplicative());
      } else if (peek() == '-') {
        ++pos_;
        e = make(Op::Sub, e, multiplicative());
      } else {
        return e;
      }
    }
  }

  NodePtr multiplicative() {
    NodePtr e = unary();
    for (;;) {
      if (consume('*')) {
        e = make(Op::Mul, e, unary());
      } else if (consume('/')) {
        e = make(Op::Div, e, unary());
      } else {
        return e;
      }
    }
  }

  NodePtr unary() {
    if (peek() == '-') {
      ++pos_;
      return make(Op::Neg, unary());
    }
    if (peek() == '+') {
      std::size_t save = pos_;
      ++pos_;
      if (consume_word("inf")) {
        return make(Op::PlusInf);
      }
      pos_ = save;
      ++pos_;  // unary plus
      return unary();
    }
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    char c = src_[pos_];
    if (consume('(')) {
      NodePtr e = conditional();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    skip_ws();
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->constant = v;
    return n;
  }

  NodePtr identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    if (name == "inf") return make(Op::PlusInf);
    if (name.size() == 2 && name[1] >= '1' && name[1] <= '3') {
      char head = name[0];
      if (head == 'x' || head == 'w' || head == 'u' || head == 'v' || head == 'y') {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Var;
        n->var = name[1] - '0';
        return n;
      }
    }
    auto unary_fn = [&](Op op) {
      if (!consume('(')) fail("expected '(' after function name");
      NodePtr a = conditional();
      if (!consume(')')) fail("expected ')'");
      return make(op, a);
    };
    auto binary_fn = [&](Op op) {
      if (!consume('(')) fail("expected '(' after function name");
      NodePtr a = conditional();
      if (!consume(',')) fail("expected ','");
      NodePtr b = conditional();
      if (!consume(')')) fail("expected ')'");
      return make(op, a, b);
    };
    if (name == "abs") return unary_fn(Op::Abs);
    if (name == "sqrt") return unary_fn(Op::Sqrt);
    if (name == "exp") return unary_fn(Op::Exp);
    if (name == "ln") return unary_fn(Op::Ln);
    if (name == "neg") return unary_fn(Op::Neg);
    if (name == "max") return binary_fn(Op::Max);
    if (name == "min") return binary_fn(Op::Min);
    if (name == "pow") return binary_fn(Op::Pow);
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }
};

}  // namespace detail

FunctionExpr FunctionExpr::parse(std::string_view src) {
  detail::Parser p(src);
  FunctionExpr e;
  e.root_ = p.parse();
  e.arity_ = detail::max_var(*e.root_);
  e.text_ = std::string(src);
  return e;
}

ExtReal FunctionExpr::eval(std::span<const double> point) const {
  if (!root_) throw std::logic_error("eval on empty FunctionExpr");
  if (arity_ > static_cast<int>(point.size()))
    throw ArityMismatch("expression uses variable index beyond point dimension");
  double v = detail::eval_raw(*root_, point);
  if (std::isnan(v)) g_nan_count.fetch_add(1, std::memory_order_relaxed);
  return ExtReal::from_double(v);
}

GridFn sample(const FunctionExpr& expr, const Grid& grid) {
  if (expr.arity() > grid.dim())
    throw ArityMismatch("expression arity exceeds grid dimension");
  std::vector<ExtReal> vals(grid.size());
  double pt[3];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point_into(i, pt);
    vals[i] = expr.eval(std::span<const double>(pt, static_cast<size_t>(grid.dim())));
  }
  return GridFn(grid, std::move(vals));
}

}  // namespace compconj

#pragma once

#include <cassert>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace compconj {

// Value in R ∪ {-inf,+inf}. Addition follows the inf-addition convention:
// (+inf) + (-inf) = +inf, so Fenchel-type inequalities never fail on
// out-of-domain points. Finite payloads are always finite (never NaN).
class ExtReal {
 public:
  constexpr ExtReal() : v_(0.0) {}

  static ExtReal finite(double x) {
    assert(std::isfinite(x));
    return ExtReal(x);
  }
  static constexpr ExtReal plus_inf() {
    return ExtReal(std::numeric_limits<double>::infinity());
  }
  static constexpr ExtReal minus_inf() {
    return ExtReal(-std::numeric_limits<double>::infinity());
  }
  // Classifies an arbitrary double; NaN is treated as out-of-domain (+inf).
  static ExtReal from_double(double x) {
    if (std::isnan(x)) return plus_inf();
    return ExtReal(x);
  }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_plus_inf() const { return std::isinf(v_) && v_ > 0; }
  bool is_minus_inf() const { return std::isinf(v_) && v_ < 0; }

  // Finite payload; only valid when is_finite().
  double value() const {
    assert(is_finite());
    return v_;
  }
  // Raw double with ±inf encoding the infinite tags (CSV, comparisons).
  double as_double() const { return v_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_plus_inf() || b.is_plus_inf()) return plus_inf();
    if (a.is_minus_inf() || b.is_minus_inf()) return minus_inf();
    return from_double(a.v_ + b.v_);
  }
  ExtReal operator-() const { return ExtReal(-v_); }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }
  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

  // Total order: -inf < finite < +inf.
  friend auto operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }
  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

  std::string str() const {
    if (is_plus_inf()) return "inf";
    if (is_minus_inf()) return "-inf";
    return std::to_string(v_);
  }

 private:
  explicit constexpr ExtReal(double v) : v_(v) {}
  double v_;
};

inline ExtReal ext_add(ExtReal a, ExtReal b) { return a + b; }

// |a-b| <= tol for finite pairs; infinite values compare equal only to the
// same infinity.
inline bool ext_close(ExtReal a, ExtReal b, double tol) {
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value()) <= tol;
  return a == b;
}

inline ExtReal ext_min(ExtReal a, ExtReal b) { return a < b ? a : b; }
inline ExtReal ext_max(ExtReal a, ExtReal b) { return a < b ? b : a; }

}  // namespace compconj

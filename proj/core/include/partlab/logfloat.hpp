#pragma once

#include <cmath>
#include <limits>

#include "partlab/rational.hpp"

namespace partlab {

/// Signed log-space scalar: value = sign * exp(log_abs).
/// Used as the coefficient type of float-mode series so that quantities such
/// as partition counts at n ~ 1e5 never overflow.
class LogFloat {
 public:
  LogFloat() = default;

  static LogFloat from_double(double v) {
    if (v == 0.0) return LogFloat();
    return LogFloat(std::log(std::fabs(v)), v < 0 ? -1 : 1);
  }

  static LogFloat from_log(double lg, int sign = 1) { return LogFloat(lg, sign); }

  static LogFloat from_rational(const Rat& r) {
    if (r == 0) return LogFloat();
    const Int& num = numerator(r);
    const Int mag = num < 0 ? Int(-num) : num;
    return LogFloat(log_int(mag) - log_int(denominator(r)), num < 0 ? -1 : 1);
  }

  bool is_zero() const { return sign_ == 0; }
  int sign() const { return sign_; }
  double log_abs() const { return lg_; }
  double to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(lg_); }

  LogFloat operator-() const { return LogFloat(lg_, -sign_); }

  friend LogFloat operator*(const LogFloat& a, const LogFloat& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return LogFloat();
    return LogFloat(a.lg_ + b.lg_, a.sign_ * b.sign_);
  }

  friend LogFloat operator/(const LogFloat& a, const LogFloat& b) {
    if (b.sign_ == 0) throw DomainError("LogFloat: division by zero");
    if (a.sign_ == 0) return LogFloat();
    return LogFloat(a.lg_ - b.lg_, a.sign_ * b.sign_);
  }

  friend LogFloat operator+(const LogFloat& a, const LogFloat& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    if (a.sign_ == b.sign_) {
      const double hi = std::max(a.lg_, b.lg_);
      const double lo = std::min(a.lg_, b.lg_);
      return LogFloat(hi + std::log1p(std::exp(lo - hi)), a.sign_);
    }
    if (a.lg_ == b.lg_) return LogFloat();
    const LogFloat& big = a.lg_ > b.lg_ ? a : b;
    const LogFloat& small = a.lg_ > b.lg_ ? b : a;
    const double diff = std::exp(small.lg_ - big.lg_);  // in (0,1)
    return LogFloat(big.lg_ + std::log1p(-diff), big.sign_);
  }

  friend LogFloat operator-(const LogFloat& a, const LogFloat& b) { return a + (-b); }

  LogFloat& operator+=(const LogFloat& o) { return *this = *this + o; }
  LogFloat& operator*=(const LogFloat& o) { return *this = *this * o; }

  friend bool operator==(const LogFloat& a, const LogFloat& b) {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.lg_ == b.lg_);
  }

  /// a/b as a plain double; safe when both share scale.
  friend double ratio(const LogFloat& a, const LogFloat& b) {
    if (b.sign_ == 0) throw DomainError("LogFloat: ratio with zero denominator");
    if (a.sign_ == 0) return 0.0;
    return a.sign_ * b.sign_ * std::exp(a.lg_ - b.lg_);
  }

 private:
  LogFloat(double lg, int sign) : lg_(sign == 0 ? -kInf : lg), sign_(sign) {}

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double lg_ = -kInf;
  int sign_ = 0;
};

}  // namespace partlab

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "partlab/logfloat.hpp"
#include "partlab/rational.hpp"
#include "partlab/weights.hpp"

namespace partlab {

/// Truncated formal power series with coefficients of type T.
/// T is Rat in exact mode and LogFloat in float mode; the algebra is the same.
template <class T>
class SeriesT {
 public:
  SeriesT() : c_(1) {}
  explicit SeriesT(int order) : c_(order + 1) {}
  explicit SeriesT(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.resize(1);
  }

  static SeriesT one(int order) {
    SeriesT s(order);
    s.c_[0] = scalar_one();
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int n) const { return c_[n]; }
  T& at(int n) { return c_[n]; }
  const std::vector<T>& coeffs() const { return c_; }

 private:
  static T scalar_one();
  std::vector<T> c_;
};

template <>
inline Rat SeriesT<Rat>::scalar_one() {
  return 1;
}
template <>
inline LogFloat SeriesT<LogFloat>::scalar_one() {
  return LogFloat::from_double(1.0);
}

using Series = SeriesT<Rat>;
using FloatSeries = SeriesT<LogFloat>;

namespace scalar {

inline bool is_zero(const Rat& v) { return v == 0; }
inline bool is_zero(const LogFloat& v) { return v.is_zero(); }
inline double as_double(const Rat& v) { return to_double(v); }
inline double as_double(const LogFloat& v) { return v.to_double(); }
inline double ratio_as_double(const Rat& a, const Rat& b) { return to_double(Rat(a / b)); }
inline double ratio_as_double(const LogFloat& a, const LogFloat& b) { return ratio(a, b); }

template <class T>
T from_rat(const Rat& r);
template <>
inline Rat from_rat<Rat>(const Rat& r) {
  return r;
}
template <>
inline LogFloat from_rat<LogFloat>(const Rat& r) {
  return LogFloat::from_rational(r);
}

template <class T>
T from_index(int n);
template <>
inline Rat from_index<Rat>(int n) {
  return Rat(n);
}
template <>
inline LogFloat from_index<LogFloat>(int n) {
  return LogFloat::from_double(n);
}

/// Scaled weight at (j,k) in the scalar type of the target series.
template <class T>
T scaled_weight_as(const WeightSpec& spec, int j, int k);
template <>
inline Rat scaled_weight_as<Rat>(const WeightSpec& spec, int j, int k) {
  return spec.scaled_weight(j, k);
}
template <>
inline LogFloat scaled_weight_as<LogFloat>(const WeightSpec& spec, int j, int k) {
  const double lw = spec.scaled_weight_log(j, k);
  if (lw == -std::numeric_limits<double>::infinity()) return LogFloat();
  return LogFloat::from_log(lw);
}

}  // namespace scalar

/// c_n(result) = sum_{i+k=n} f_i g_k, exact per scalar type, for n <= order.
template <class T>
SeriesT<T> cauchy_product(const SeriesT<T>& f, const SeriesT<T>& g, int order);

/// exp(q) with q_0 = 0, via the differential recurrence n e_n = sum k q_k e_{n-k}.
template <class T>
SeriesT<T> series_exp(const SeriesT<T>& q, int order);

/// log(f) with f_0 = 1; inverse of series_exp.
template <class T>
SeriesT<T> series_log(const SeriesT<T>& f, int order);

/// f / g with g_0 != 0, standard leading-coefficient recurrence.
template <class T>
SeriesT<T> series_divide(const SeriesT<T>& f, const SeriesT<T>& g, int order);

/// Per-size generating factor: sum_k w(j,k) x^{jk}, truncated.
template <class T>
SeriesT<T> component_series(const WeightSpec& spec, int j, int order);

/// Product of all component factors (sizes 1..order): the generating function
/// of the scaled partition-function sequence.
template <class T>
SeriesT<T> partition_series(const WeightSpec& spec, int order);

/// Product of the factors for sizes > l only.
template <class T>
SeriesT<T> tail_series(const WeightSpec& spec, int l, int order);

/// Product of the factors for sizes <= l (a polynomial-like head).
template <class T>
SeriesT<T> head_series(const WeightSpec& spec, int l, int order);

/// Ratios r_n = d_{n-1} / d_n for n = 1..order; NaN where undefined.
template <class T>
std::vector<double> ratio_sequence(const SeriesT<T>& d);

/// Elementwise tail_n / c_n as doubles; NaN where c_n = 0.
template <class T>
std::vector<double> fraction_sequence(const SeriesT<T>& tail, const SeriesT<T>& c);

/// Scaled partition coefficients plus tail coefficients for selected l.
struct CoefficientTables {
  Series c;
  std::map<int, Series> tails;

  const Series& tail(int l) const;
};
struct FloatCoefficientTables {
  FloatSeries c;
  std::map<int, FloatSeries> tails;

  const FloatSeries& tail(int l) const;
};

CoefficientTables build_tables(const WeightSpec& spec, int order, const std::vector<int>& ls);
FloatCoefficientTables build_tables_float(const WeightSpec& spec, int order,
                                          const std::vector<int>& ls);

/// Exact closed-form value of the per-size factor at x = rho.
/// Multiset: (1 - (p rho)^j)^{-m_j} (requires p*rho < 1); selection:
/// (1 + (p rho)^j)^{m_j}; custom: finite polynomial.  Assemblies have no
/// rational closed form; use eval_component.
Rat eval_component_exact(const WeightSpec& spec, int j, const Rat& rho);

/// Floating closed-form value of the per-size factor at x = rho (all families).
double eval_component(const WeightSpec& spec, int j, const Rat& rho);

/// Partial sum of a truncated series at rational rho, with a geometric tail
/// bound when the caller supplies a majorant ratio q in (0,1) such that
/// |f_{n+1} rho| <= q |f_n|.
struct PartialEval {
  Rat value;
  std::optional<Rat> tail_bound;
};
PartialEval eval_truncated(const Series& f, const Rat& rho,
                           std::optional<Rat> majorant_ratio = std::nullopt);

// --- template implementations ---

namespace detail {

/// In-place multiply by a factor supported on exponents j, 2j, ... with unit
/// constant term: acc_n += sum_{k>=1} f_k acc_{n-jk}.
template <class T>
void multiply_strided(std::vector<T>& acc, int j, const std::vector<T>& f) {
  const int order = static_cast<int>(acc.size()) - 1;
  for (int n = order; n >= j; --n) {
    T sum = acc[n];
    for (int k = 1; k * j <= n && k < static_cast<int>(f.size()); ++k) {
      if (!scalar::is_zero(f[k])) sum += f[k] * acc[n - k * j];
    }
    acc[n] = sum;
  }
}

void check_series_budget(const std::vector<Rat>& coeffs);
inline void check_series_budget(const std::vector<LogFloat>&) {}

template <class T>
std::vector<T> component_factor(const WeightSpec& spec, int j, int order) {
  std::vector<T> f;
  f.reserve(order / j + 1);
  for (int k = 0; k * j <= order; ++k) f.push_back(scalar::scaled_weight_as<T>(spec, j, k));
  return f;
}

}  // namespace detail

template <class T>
SeriesT<T> cauchy_product(const SeriesT<T>& f, const SeriesT<T>& g, int order) {
  if (f.order() < order || g.order() < order) {
    throw DomainError("cauchy_product: operands truncated shorter than the requested order");
  }
  SeriesT<T> out(order);
  for (int n = 0; n <= order; ++n) {
    T sum{};
    for (int i = 0; i <= n; ++i) {
      if (!scalar::is_zero(f[i]) && !scalar::is_zero(g[n - i])) sum += f[i] * g[n - i];
    }
    out.at(n) = sum;
  }
  return out;
}

template <class T>
SeriesT<T> series_exp(const SeriesT<T>& q, int order) {
  if (q.order() < order) throw DomainError("series_exp: operand truncated short");
  if (!scalar::is_zero(q[0])) throw DomainError("series_exp: constant term must be 0");
  SeriesT<T> e(order);
  e.at(0) = scalar::from_rat<T>(1);
  for (int n = 1; n <= order; ++n) {
    T sum{};
    for (int k = 1; k <= n; ++k) {
      if (!scalar::is_zero(q[k]) && !scalar::is_zero(e[n - k])) {
        sum += scalar::from_index<T>(k) * q[k] * e[n - k];
      }
    }
    e.at(n) = sum / scalar::from_index<T>(n);
  }
  return e;
}

template <class T>
SeriesT<T> series_log(const SeriesT<T>& f, int order) {
  if (f.order() < order) throw DomainError("series_log: operand truncated short");
  if (scalar::is_zero(f[0])) throw DomainError("series_log: constant term must be nonzero");
  SeriesT<T> q(order);
  const T one = scalar::from_rat<T>(1);
  if (!scalar::is_zero(f[0] - one)) {
    throw DomainError("series_log: constant term must be 1");
  }
  for (int n = 1; n <= order; ++n) {
    T sum = scalar::from_index<T>(n) * f[n];
    for (int k = 1; k < n; ++k) {
      if (!scalar::is_zero(q[k]) && !scalar::is_zero(f[n - k])) {
        sum += -(scalar::from_index<T>(k) * q[k] * f[n - k]);
      }
    }
    q.at(n) = sum / scalar::from_index<T>(n);
  }
  return q;
}

template <class T>
SeriesT<T> series_divide(const SeriesT<T>& f, const SeriesT<T>& g, int order) {
  if (f.order() < order || g.order() < order) {
    throw DomainError("series_divide: operands truncated shorter than the requested order");
  }
  if (scalar::is_zero(g[0])) throw DomainError("series_divide: divisor has zero constant term");
  SeriesT<T> h(order);
  for (int n = 0; n <= order; ++n) {
    T sum = f[n];
    for (int k = 1; k <= n; ++k) {
      if (!scalar::is_zero(g[k]) && !scalar::is_zero(h[n - k])) sum += -(g[k] * h[n - k]);
    }
    h.at(n) = sum / g[0];
  }
  return h;
}

template <class T>
SeriesT<T> component_series(const WeightSpec& spec, int j, int order) {
  SeriesT<T> s(order);
  for (int k = 0; k * j <= order; ++k) {
    s.at(k * j) = scalar::scaled_weight_as<T>(spec, j, k);
  }
  return s;
}

namespace detail {

template <class T>
SeriesT<T> product_over_sizes(const WeightSpec& spec, int from, int to, int order) {
  std::vector<T> acc(order + 1);
  acc[0] = scalar::from_rat<T>(1);
  for (int j = from; j <= to && j <= order; ++j) {
    std::vector<T> f = component_factor<T>(spec, j, order);
    bool trivial = true;
    for (std::size_t k = 1; k < f.size(); ++k) {
      if (!scalar::is_zero(f[k])) {
        trivial = false;
        break;
      }
    }
    if (trivial) continue;
    multiply_strided(acc, j, f);
    if (j % 16 == 0) check_series_budget(acc);
  }
  check_series_budget(acc);
  return SeriesT<T>(std::move(acc));
}

}  // namespace detail

template <class T>
SeriesT<T> partition_series(const WeightSpec& spec, int order) {
  return detail::product_over_sizes<T>(spec, 1, order, order);
}

template <class T>
SeriesT<T> tail_series(const WeightSpec& spec, int l, int order) {
  if (l < 0) throw DomainError("tail_series: l must be >= 0");
  return detail::product_over_sizes<T>(spec, l + 1, order, order);
}

template <class T>
SeriesT<T> head_series(const WeightSpec& spec, int l, int order) {
  if (l < 0) throw DomainError("head_series: l must be >= 0");
  return detail::product_over_sizes<T>(spec, 1, l, order);
}

template <class T>
std::vector<double> ratio_sequence(const SeriesT<T>& d) {
  std::vector<double> r(d.order() + 1, std::numeric_limits<double>::quiet_NaN());
  for (int n = 1; n <= d.order(); ++n) {
    if (!scalar::is_zero(d[n])) r[n] = scalar::ratio_as_double(d[n - 1], d[n]);
  }
  return r;
}

template <class T>
std::vector<double> fraction_sequence(const SeriesT<T>& tail, const SeriesT<T>& c) {
  const int order = std::min(tail.order(), c.order());
  std::vector<double> q(order + 1, std::numeric_limits<double>::quiet_NaN());
  for (int n = 0; n <= order; ++n) {
    if (!scalar::is_zero(c[n])) q[n] = scalar::ratio_as_double(tail[n], c[n]);
  }
  return q;
}

}  // namespace partlab

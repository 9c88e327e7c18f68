#include "partlab/series.hpp"

#include <boost/multiprecision/integer.hpp>

#include "partlab/errors.hpp"
#include "partlab/limits.hpp"

namespace partlab {

namespace detail {

void check_series_budget(const std::vector<Rat>& coeffs) {
  std::uint64_t bytes = 0;
  for (const Rat& c : coeffs) {
    if (c == 0) continue;
    const Int& num = numerator(c);
    const Int mag = num < 0 ? Int(-num) : num;
    bytes += (boost::multiprecision::msb(mag) + boost::multiprecision::msb(denominator(c))) / 8 + 2;
  }
  if (bytes > work_limit()) {
    throw ResourceError("series coefficient storage exceeds the memory budget "
                        "(raise PARTLAB_WORK_LIMIT or lower the truncation order)");
  }
}

}  // namespace detail

const Series& CoefficientTables::tail(int l) const {
  const auto it = tails.find(l);
  if (it == tails.end()) throw DomainError("tables hold no tail for l=" + std::to_string(l));
  return it->second;
}

const FloatSeries& FloatCoefficientTables::tail(int l) const {
  const auto it = tails.find(l);
  if (it == tails.end()) throw DomainError("tables hold no tail for l=" + std::to_string(l));
  return it->second;
}

CoefficientTables build_tables(const WeightSpec& spec, int order, const std::vector<int>& ls) {
  CoefficientTables t{partition_series<Rat>(spec, order), {}};
  for (int l : ls) {
    if (!t.tails.count(l)) t.tails.emplace(l, tail_series<Rat>(spec, l, order));
  }
  return t;
}

FloatCoefficientTables build_tables_float(const WeightSpec& spec, int order,
                                          const std::vector<int>& ls) {
  FloatCoefficientTables t{partition_series<LogFloat>(spec, order), {}};
  // Tails come from dividing the head factors back out of the full product;
  // each factor has unit constant term, so the recurrence is stable here
  // (coefficients stay positive and of the same scale).
  int l_max = 0;
  for (int l : ls) l_max = std::max(l_max, l);
  FloatSeries running = t.c;
  for (int l = 0; l <= l_max; ++l) {
    if (l > 0) {
      std::vector<LogFloat> f = detail::component_factor<LogFloat>(spec, l, order);
      std::vector<LogFloat> acc = running.coeffs();
      // acc / (1 + f_1 x^l + f_2 x^{2l} + ...) in place, ascending.
      for (int n = l; n <= order; ++n) {
        LogFloat sum = acc[n];
        for (int k = 1; k * l <= n && k < static_cast<int>(f.size()); ++k) {
          if (!f[k].is_zero()) sum += -(f[k] * acc[n - k * l]);
        }
        acc[n] = sum;
      }
      running = FloatSeries(std::move(acc));
    }
    if (std::find(ls.begin(), ls.end(), l) != ls.end()) t.tails.emplace(l, running);
  }
  return t;
}

Rat eval_component_exact(const WeightSpec& spec, int j, const Rat& rho) {
  if (rho < 0) throw DomainError("eval: rho must be >= 0");
  const Rat x = rho * spec.tilt();
  switch (spec.family()) {
    case Family::Assembly:
      throw DomainError("eval_component_exact: assembly normalizers are irrational");
    case Family::Multiset: {
      const Rat px = spec.p() * x;
      if (px >= 1) {
        throw DomainError("eval: rho at or beyond the radius of convergence (need rho < 1/p)");
      }
      const Int m = spec.multiplicity(j);
      const Rat base = 1 - pow_rat(px, j);
      return pow_rat(base, -m.convert_to<long>());
    }
    case Family::Selection: {
      const Rat px = spec.p() * x;
      const Int m = spec.multiplicity(j);
      const Rat base = 1 + pow_rat(px, j);
      return pow_rat(base, m.convert_to<long>());
    }
    case Family::Custom: {
      Rat sum = 1;
      const auto it = spec.custom_rows().find(j);
      if (it == spec.custom_rows().end()) return sum;
      sum = 0;
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        sum += it->second[k] * pow_rat(x, static_cast<long>(j) * static_cast<long>(k));
      }
      return sum;
    }
  }
  return 1;
}

double eval_component(const WeightSpec& spec, int j, const Rat& rho) {
  if (spec.family() == Family::Assembly) {
    const double la = spec.scaled_weight_log(j, 1);  // ln(a_j * tilt^j)
    return std::exp(std::exp(la) * std::pow(to_double(rho), j));
  }
  return to_double(eval_component_exact(spec, j, rho));
}

PartialEval eval_truncated(const Series& f, const Rat& rho, std::optional<Rat> majorant_ratio) {
  Rat sum = 0;
  Rat power = 1;
  Rat last_term = 0;
  for (int n = 0; n <= f.order(); ++n) {
    last_term = f[n] * power;
    sum += last_term;
    power *= rho;
  }
  PartialEval out{sum, std::nullopt};
  if (majorant_ratio) {
    const Rat& q = *majorant_ratio;
    if (q <= 0 || q >= 1) throw DomainError("eval_truncated: majorant ratio must be in (0,1)");
    Rat bound = last_term < 0 ? Rat(-last_term) : last_term;
    out.tail_bound = bound * q / (1 - q);
  }
  return out;
}

}  // namespace partlab

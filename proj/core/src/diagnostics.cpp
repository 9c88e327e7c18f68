#include "partlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "partlab/errors.hpp"

namespace partlab {

namespace {

bool usable(double r) { return std::isfinite(r); }

double window_mean(const std::vector<double>& r, int last, int w) {
  double sum = 0;
  for (int n = last - w + 1; n <= last; ++n) sum += r[n];
  return sum / w;
}

std::pair<double, double> window_range(const std::vector<double>& r, int last, int w) {
  double lo = r[last], hi = r[last];
  for (int n = last - w + 1; n <= last; ++n) {
    lo = std::min(lo, r[n]);
    hi = std::max(hi, r[n]);
  }
  return {lo, hi};
}

}  // namespace

std::string verdict_name(RatioReport::Verdict v) {
  switch (v) {
    case RatioReport::Verdict::RT: return "RT";
    case RatioReport::Verdict::Oscillating: return "Oscillating";
    case RatioReport::Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

RatioReport ratio_report_from_ratios(std::vector<double> ratios, const RatioOptions& opt) {
  if (opt.window < 2) throw DomainError("ratio_report: window must be >= 2");
  const int last = static_cast<int>(ratios.size()) - 1;
  int burn_in = last + 1;
  for (int n = last; n >= 1 && usable(ratios[n]); --n) burn_in = n;
  const int usable_count = last - burn_in + 1;
  RatioReport report;
  report.ratios = std::move(ratios);
  report.window = opt.window;
  report.burn_in = burn_in;
  if (usable_count < 2 * opt.window) {
    throw DomainError("ratio_report: fewer than 2W usable ratio terms");
  }
  const auto [lo, hi] = window_range(report.ratios, last, opt.window);
  const double est = window_mean(report.ratios, last, opt.window);
  report.fluctuation = hi - lo;
  if (report.fluctuation <= opt.tol_rel * std::max(est, opt.floor)) {
    report.verdict = RatioReport::Verdict::RT;
    report.estimate = est;
    return report;
  }
  // Period-2 analysis over the last 2W terms.
  std::vector<double> even, odd;
  for (int n = last - 2 * opt.window + 1; n <= last; ++n) {
    (n % 2 == 0 ? even : odd).push_back(report.ratios[n]);
  }
  const auto stats = [](const std::vector<double>& v) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    return std::tuple<double, double>(mean, *mx - *mn);
  };
  const auto [mean_e, fluct_e] = stats(even);
  const auto [mean_o, fluct_o] = stats(odd);
  report.subseq_limits = std::make_pair(mean_e, mean_o);
  const bool settled_e = fluct_e <= opt.tol_rel * std::max(mean_e, opt.floor);
  const bool settled_o = fluct_o <= opt.tol_rel * std::max(mean_o, opt.floor);
  const double sep = std::fabs(mean_e - mean_o);
  if (settled_e && settled_o &&
      sep > opt.osc_separation * std::max({mean_e, mean_o, opt.floor})) {
    report.verdict = RatioReport::Verdict::Oscillating;
    return report;
  }
  report.verdict = RatioReport::Verdict::Inconclusive;
  return report;
}

RatioReport ratio_report(const Series& d, const RatioOptions& opt) {
  return ratio_report_from_ratios(ratio_sequence(d), opt);
}

RatioReport ratio_report(const FloatSeries& d, const RatioOptions& opt) {
  return ratio_report_from_ratios(ratio_sequence(d), opt);
}

std::optional<double> extrapolate_ratio_limit(const std::vector<double>& ratios, int window) {
  const int last = static_cast<int>(ratios.size()) - 1;
  const int n1 = last / 4, n2 = last / 2;
  const auto safe_mean = [&](int at) -> std::optional<double> {
    if (at - window + 1 < 1) return std::nullopt;
    for (int n = at - window + 1; n <= at; ++n) {
      if (!usable(ratios[n])) return std::nullopt;
    }
    return window_mean(ratios, at, window);
  };
  const auto r1 = safe_mean(n1), r2 = safe_mean(n2), r3 = safe_mean(last);
  if (!r1 || !r2 || !r3) return std::nullopt;
  const double d1 = *r2 - *r1, d2 = *r3 - *r2;
  if (d1 == 0 || d2 == 0) return *r3;
  if ((d1 > 0) != (d2 > 0)) return std::nullopt;
  const double t = d2 / d1;
  if (t <= 0 || t >= 1) return std::nullopt;
  return *r3 + d2 * t / (1 - t);
}

FractionSequence tail_fraction_empirical(const WeightSpec& spec, int l, int order,
                                         int window, bool float_mode) {
  FractionSequence out;
  if (float_mode) {
    const auto tables = build_tables_float(spec, order, {l});
    out.values = fraction_sequence(tables.tail(l), tables.c);
  } else {
    const auto tables = build_tables(spec, order, {l});
    out.values = fraction_sequence(tables.tail(l), tables.c);
  }
  const int last = static_cast<int>(out.values.size()) - 1;
  if (last < window) throw DomainError("tail_fraction_empirical: order below the window");
  double sum = 0;
  for (int n = last - window + 1; n <= last; ++n) {
    if (!usable(out.values[n])) {
      throw DomainError("tail_fraction_empirical: vanishing coefficients in the window");
    }
    sum += out.values[n];
  }
  out.last_window_mean = sum / window;
  return out;
}

double tail_fraction_limit(const WeightSpec& spec, int l, const Rat& rho) {
  double prod = 1;
  for (int j = 1; j <= l; ++j) prod *= eval_component(spec, j, rho);
  return 1.0 / prod;
}

Rat tail_fraction_limit_exact(const WeightSpec& spec, int l, const Rat& rho) {
  Rat prod = 1;
  for (int j = 1; j <= l; ++j) prod *= eval_component_exact(spec, j, rho);
  return 1 / prod;
}

SchurReport schur_check(const Series& f1, const Series& f2, const Rat& rho, int order,
                        const RatioOptions& opt, std::optional<Rat> f2_closed) {
  if (f1.order() < order) throw DomainError("schur_check: f1 truncated short");
  Series padded(order);
  for (int n = 0; n <= order && n <= f2.order(); ++n) padded.at(n) = f2[n];
  const Series f = cauchy_product(f1, padded, order);
  SchurReport report;
  report.ratio_exact.assign(order + 1, 0);
  report.ratios.assign(order + 1, std::numeric_limits<double>::quiet_NaN());
  for (int n = 0; n <= order; ++n) {
    if (f1[n] == 0) continue;  // undefined ratio
    report.ratio_exact[n] = f[n] / f1[n];
    report.ratios[n] = to_double(report.ratio_exact[n]);
  }
  const int last = order;
  for (int n = last - opt.window + 1; n <= last; ++n) {
    if (n < 0 || !usable(report.ratios[n])) {
      throw DomainError("schur_check: zero coefficients in the evaluation window");
    }
  }
  report.window_mean = window_mean(report.ratios, last, opt.window);
  const auto [lo, hi] = window_range(report.ratios, last, opt.window);
  report.fluctuation = hi - lo;
  report.settled =
      report.fluctuation <= opt.tol_rel * std::max(std::fabs(report.window_mean), opt.floor);
  if (f2_closed) {
    report.f2_exact = f2_closed;
  } else {
    report.f2_exact = eval_truncated(padded, rho).value;
  }
  report.f2_value = to_double(*report.f2_exact);
  report.gap = std::fabs(report.window_mean - report.f2_value);
  return report;
}

std::vector<Rat> star_transform(const std::vector<Rat>& m, const Rat& p, int order) {
  std::vector<Rat> star(order + 1, 0);
  for (int l = 1; l <= order; ++l) {
    const Rat ml = static_cast<std::size_t>(l) <= m.size() ? m[l - 1] : Rat(0);
    if (ml == 0) continue;
    if (ml < 0) throw DomainError("star_transform: weights must be >= 0");
    const Rat mpl = ml * pow_rat(p, l);
    for (int k = 1; l * k <= order; ++k) star[l * k] += mpl / k;
  }
  return star;
}

bool star_identity_holds(const std::vector<Rat>& m, const Rat& p, int order) {
  const std::vector<Rat> star = star_transform(m, p, order);
  Series exponent(order);
  for (int j = 1; j <= order; ++j) exponent.at(j) = star[j];
  const Series lhs = series_exp(exponent, order);
  std::vector<Rat> acc(order + 1, 0);
  acc[0] = 1;
  for (int j = 1; j <= order; ++j) {
    const Rat mr = static_cast<std::size_t>(j) <= m.size() ? m[j - 1] : Rat(0);
    if (mr == 0) continue;
    if (denominator(mr) != 1) throw DomainError("star identity: integer weights expected");
    const Int mj = numerator(mr);
    std::vector<Rat> f;
    for (int k = 0; k * j <= order; ++k) {
      f.push_back(Rat(binomial(mj + k - 1, static_cast<unsigned>(k))) *
                  pow_rat(p, static_cast<long>(j) * k));
    }
    detail::multiply_strided(acc, j, f);
  }
  for (int n = 0; n <= order; ++n) {
    if (lhs[n] != acc[n]) return false;
  }
  return true;
}

std::string verdict_name(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::Convergent: return "Convergent";
    case ConvergenceVerdict::Divergent: return "Divergent";
    case ConvergenceVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// Dyadic rational equal to the given double.
Rat rat_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("rho estimate is not finite");
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  const long long scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rat r(scaled);
  const int shift = exp - 53;
  if (shift >= 0) {
    r *= Rat(Int(1) << shift);
  } else {
    r /= Rat(Int(1) << -shift);
  }
  return r;
}

}  // namespace

ClassificationResult classify(const WeightSpec& spec, const ClassifyOptions& opt) {
  ClassificationResult result;
  result.family = spec.family();
  const bool has_p = spec.family() == Family::Multiset || spec.family() == Family::Selection;
  result.threshold =
      has_p ? 1.0 / to_double(spec.p()) : std::numeric_limits<double>::infinity();

  std::vector<int> ls;
  for (int l = 1; l <= opt.l_max; ++l) ls.push_back(l);

  std::vector<std::vector<double>> q_sequences(opt.l_max + 1);
  if (opt.float_mode) {
    const auto tables = build_tables_float(spec, opt.order, ls);
    result.report = ratio_report(tables.c, opt.ratio);
    for (int l = 1; l <= opt.l_max; ++l) {
      q_sequences[l] = fraction_sequence(tables.tail(l), tables.c);
    }
  } else {
    const auto tables = build_tables(spec, opt.order, ls);
    result.report = ratio_report(tables.c, opt.ratio);
    for (int l = 1; l <= opt.l_max; ++l) {
      q_sequences[l] = fraction_sequence(tables.tail(l), tables.c);
    }
  }

  result.rho_window = window_mean(result.report.ratios,
                                  static_cast<int>(result.report.ratios.size()) - 1,
                                  opt.ratio.window);
  const auto extrapolated = extrapolate_ratio_limit(result.report.ratios, opt.ratio.window);
  result.rho_hat = extrapolated.value_or(result.rho_window);

  switch (result.report.verdict) {
    case RatioReport::Verdict::Oscillating:
      result.verdict = ConvergenceVerdict::Divergent;
      break;
    case RatioReport::Verdict::Inconclusive:
      result.verdict = ConvergenceVerdict::Inconclusive;
      break;
    case RatioReport::Verdict::RT: {
      if (spec.family() == Family::Multiset) {
        const double scaled = result.rho_hat / result.threshold;
        if (std::fabs(scaled - 1.0) <= opt.boundary_tol) {
          // Ratio limit at the radius: the tail fractions vanish there and
          // the multiset diverges.
          result.verdict = ConvergenceVerdict::Divergent;
        } else if (scaled < 1.0) {
          result.verdict = ConvergenceVerdict::Convergent;
        } else {
          result.verdict = ConvergenceVerdict::Inconclusive;
        }
      } else {
        // Assemblies converge at any finite ratio limit; selections up to and
        // including 1/p, which the limit cannot exceed structurally.
        result.verdict = ConvergenceVerdict::Convergent;
      }
      break;
    }
  }

  const bool in_domain =
      result.rho_hat >= 0 && std::isfinite(result.rho_hat) &&
      (!has_p || result.rho_hat * to_double(spec.p()) < 1.0 - 1e-9);
  std::optional<Rat> rho_exact;
  if (in_domain) rho_exact = rat_from_double(std::max(0.0, result.rho_hat));
  for (int l = 1; l <= opt.l_max; ++l) {
    QlEntry entry;
    const auto& seq = q_sequences[l];
    const int last = static_cast<int>(seq.size()) - 1;
    double sum = 0;
    int count = 0;
    for (int n = std::max(0, last - opt.ratio.window + 1); n <= last; ++n) {
      if (usable(seq[n])) {
        sum += seq[n];
        ++count;
      }
    }
    entry.empirical = count ? sum / count : std::numeric_limits<double>::quiet_NaN();
    if (rho_exact) entry.closed = tail_fraction_limit(spec, l, *rho_exact);
    result.q_l.emplace(l, entry);
  }
  return result;
}

std::string ClassificationResult::to_text() const {
  std::ostringstream os;
  os << "family=" << family_name(family) << "\n";
  os << "verdict=" << verdict_name(verdict) << "\n";
  os << "rho_hat=" << rho_hat << "\n";
  os << "rho_window=" << rho_window << "\n";
  os << "threshold=" << threshold << "\n";
  os << "ratio_verdict=" << verdict_name(report.verdict) << "\n";
  os << "window=" << report.window << "\n";
  os << "fluctuation=" << report.fluctuation << "\n";
  if (report.subseq_limits) {
    os << "subseq_even=" << report.subseq_limits->first << "\n";
    os << "subseq_odd=" << report.subseq_limits->second << "\n";
  }
  for (const auto& [l, q] : q_l) {
    os << "q_empirical_l" << l << "=" << q.empirical << "\n";
    if (q.closed) os << "q_closed_l" << l << "=" << *q.closed << "\n";
  }
  return os.str();
}

}  // namespace partlab

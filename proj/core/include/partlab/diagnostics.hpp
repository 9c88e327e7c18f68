#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "partlab/series.hpp"
#include "partlab/weights.hpp"

namespace partlab {

struct RatioOptions {
  int window = 25;
  double tol_rel = 1e-3;
  double floor = 1e-6;
  // Minimal relative gap between the two period-2 subsequence estimates for
  // an Oscillating verdict.
  double osc_separation = 1e-2;
};

/// Ratio diagnostics of a nonnegative coefficient sequence.  Verdicts are
/// heuristics: a limit property cannot be proven from finitely many terms,
/// so the raw ratios are always exposed.
struct RatioReport {
  enum class Verdict { RT, Oscillating, Inconclusive };

  std::vector<double> ratios;  // r_n = d_{n-1}/d_n; NaN where undefined
  int window = 0;
  int burn_in = 0;  // first index with a usable ratio
  std::optional<double> estimate;  // set for verdict RT
  double fluctuation = 0;          // max - min over the last window
  // (even-index estimate, odd-index estimate) when the parity analysis ran.
  std::optional<std::pair<double, double>> subseq_limits;
  Verdict verdict = Verdict::Inconclusive;
};

std::string verdict_name(RatioReport::Verdict v);

/// Core analysis on a precomputed ratio sequence (index n holds d_{n-1}/d_n).
RatioReport ratio_report_from_ratios(std::vector<double> ratios,
                                     const RatioOptions& opt = {});

RatioReport ratio_report(const Series& d, const RatioOptions& opt = {});
RatioReport ratio_report(const FloatSeries& d, const RatioOptions& opt = {});

/// Windowed power-law extrapolation of a slowly converging ratio sequence:
/// window means at orders N/4, N/2 and N are accelerated assuming
/// r_n ~ rho (1 - c n^{-gamma}).  Returns nullopt when ill-conditioned.
std::optional<double> extrapolate_ratio_limit(const std::vector<double>& ratios, int window);

/// Sequence of tail-to-total coefficient fractions with its last-window mean.
struct FractionSequence {
  std::vector<double> values;
  double last_window_mean = 0;
};
FractionSequence tail_fraction_empirical(const WeightSpec& spec, int l, int order,
                                         int window = 25, bool float_mode = false);

/// Closed-form limit of the tail fraction at tilt rho:
/// the reciprocal of the product of the first l per-size normalizers.
double tail_fraction_limit(const WeightSpec& spec, int l, const Rat& rho);
/// Exact variant (multisets/selections/custom only).
Rat tail_fraction_limit_exact(const WeightSpec& spec, int l, const Rat& rho);

/// Ratio check for a Cauchy product f = f1 * f2: the coefficient ratios
/// d_n / d_n^{(1)} settle at f2(rho) when f1 has the matching ratio limit and
/// f2 converges beyond it.  Only the numerical conclusion is tested; the
/// hypotheses are the caller's assertion.
struct SchurReport {
  std::vector<Rat> ratio_exact;  // d_n/d_n^{(1)}, index n (0 where undefined)
  std::vector<double> ratios;
  double window_mean = 0;
  double fluctuation = 0;
  bool settled = false;
  std::optional<Rat> f2_exact;  // partial sum or caller-supplied closed value
  double f2_value = 0;
  double gap = 0;  // |window mean - f2(rho)|
};
SchurReport schur_check(const Series& f1, const Series& f2, const Rat& rho, int order,
                        const RatioOptions& opt = {},
                        std::optional<Rat> f2_closed = std::nullopt);

/// Multiset-to-assembly exponent map: result[j] = sum over factorizations
/// j = l*k of m_l p^l / k (result[0] = 0).  exp of the resulting series
/// reproduces the Euler product coefficientwise.
std::vector<Rat> star_transform(const std::vector<Rat>& m, const Rat& p, int order);

/// Convenience check of the star identity to the given order.
bool star_identity_holds(const std::vector<Rat>& m, const Rat& p, int order);

enum class ConvergenceVerdict { Convergent, Divergent, Inconclusive };

std::string verdict_name(ConvergenceVerdict v);

struct ClassifyOptions {
  int order = 400;
  bool float_mode = true;
  RatioOptions ratio;
  // A ratio limit within this relative distance of 1/p marks the boundary
  // case, which diverges for multisets.
  double boundary_tol = 0.05;
  int l_max = 3;
};

struct QlEntry {
  double empirical = 0;
  std::optional<double> closed;  // absent when rho-hat is outside the domain
};

struct ClassificationResult {
  Family family = Family::Assembly;
  double rho_hat = 0;     // extrapolated estimate when available
  double rho_window = 0;  // plain last-window mean
  double threshold = 0;   // 1/p for multisets/selections, infinity otherwise
  ConvergenceVerdict verdict = ConvergenceVerdict::Inconclusive;
  RatioReport report;
  std::map<int, QlEntry> q_l;

  std::string to_text() const;  // structured key=value record
};

ClassificationResult classify(const WeightSpec& spec, const ClassifyOptions& opt = {});

}  // namespace partlab

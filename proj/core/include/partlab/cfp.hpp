#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "partlab/measure.hpp"
#include "partlab/oracle.hpp"
#include "partlab/weights.hpp"

namespace partlab::cfp {

/// How coagulation/fragmentation rates are fixed.  Only ratios are pinned by
/// reversibility; the gauge here puts fragmentation at unit rate per cluster
/// and derives coagulation.
enum class RateMode {
  MeanField,   // pairwise rates k_i k_j phi(i,j) with phi = a_{i+j}/(a_i a_j); assemblies only
  RatioGauge,  // u_f = k_{i+j}, u_c from the reversibility ratio; all families
};

struct CfpModel {
  int n;
  WeightSpec spec;
  RateMode mode;

  CfpModel(int n, WeightSpec spec, RateMode mode);
};

struct Transition {
  enum class Kind { Coag, Frag };
  Kind kind;
  int i = 0, j = 0;  // unordered pair, i <= j
  PartitionState to;
  Rat rate;
};

/// Measure ratio mu(eta^{(i,j)})/mu(eta) written in scaled weights (the
/// zeroth weights cancel).  Preconditions: i + j <= n; i != j needs
/// k_i, k_j >= 1; i == j needs k_i >= 2; eta must carry positive mass.
Rat transition_ratio(const WeightSpec& spec, const PartitionState& eta, int i, int j);

/// True when every component weight of eta is nonzero.
bool has_positive_mass(const WeightSpec& spec, const PartitionState& eta);

/// All transitions out of eta with their rates.  Transitions into or out of
/// zero-mass states are omitted (their rates are forced to zero by detailed
/// balance).
std::vector<Transition> build_rates(const CfpModel& model, const PartitionState& eta);

struct BalanceViolation {
  PartitionState from;
  int i = 0, j = 0;
  Rat forward_flow;   // mu(eta)   * u_c(eta -> eta')
  Rat backward_flow;  // mu(eta')  * u_f(eta' -> eta)
};

struct BalanceReport {
  int n = 0;
  std::size_t pairs_checked = 0;
  std::vector<BalanceViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Test hook: maps (state, transition, rate) -> adjusted rate.
using RateAdjustment =
    std::function<Rat(const PartitionState&, const Transition&, const Rat&)>;

/// Verifies mu(eta) u_c(eta->eta') == mu(eta') u_f(eta'->eta) exactly for
/// every coagulation over all positive-mass states of Omega_n.
BalanceReport check_detailed_balance(const CfpModel& model,
                                     const RateAdjustment& adjust = nullptr);

struct StationaryResult {
  oracle::PartitionList states;  // positive-mass states, canonical order
  std::vector<Rat> pi;
  bool reducible = false;
  bool matches_measure = false;  // pi equals the point masses coefficientwise
};

/// Exact global-balance solve (pi Q = 0, sum pi = 1) by rational elimination.
StationaryResult stationary_exact(const CfpModel& model);

struct SimulationOptions {
  double t_max = 100;
  std::uint64_t seed = 1;
  std::optional<PartitionState> initial;  // default: single cluster of size n
  int batches = 20;                       // batch means for standard errors
  int histogram_sizes = 8;                // track K_j for j <= this
  int occupation_limit = 16;              // per-state occupations for n <= this
};

struct StateOccupation {
  PartitionState state;
  double fraction = 0;
  double std_error = 0;  // batch-means standard error
};

struct SimulationReport {
  int n = 0;
  double t_max = 0;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  std::vector<StateOccupation> occupations;        // populated for small n
  std::map<int, std::vector<double>> histograms;   // j -> fraction of time K_j = k
  PartitionState final_state;
  bool rates_rescaled = false;
  double log_rate_scale = 0;  // subtracted from every log-rate when rescaled
};

/// Seeded continuous-time simulation with exponential holding times.
/// Identical (model, options) inputs produce identical trajectories.
SimulationReport simulate(const CfpModel& model, const SimulationOptions& opt);

}  // namespace partlab::cfp

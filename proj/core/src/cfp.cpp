#include "partlab/cfp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "partlab/errors.hpp"
#include "partlab/limits.hpp"

namespace partlab::cfp {

namespace {

PartitionState coagulate(const PartitionState& eta, int i, int j) {
  PartitionState out = eta;
  out.k(i) -= 1;
  out.k(j) -= 1;
  out.k(i + j) += 1;
  return out;
}

PartitionState fragment(const PartitionState& eta, int i, int j) {
  PartitionState out = eta;
  out.k(i + j) -= 1;
  out.k(i) += 1;
  out.k(j) += 1;
  return out;
}

Rat unnormalized_mass(const WeightSpec& spec, const PartitionState& eta) {
  Rat w = 1;
  for (int j = 1; j <= eta.n && w != 0; ++j) {
    if (eta.k(j) > 0) w *= spec.scaled_weight(j, eta.k(j));
  }
  return w;
}

}  // namespace

CfpModel::CfpModel(int n_, WeightSpec spec_, RateMode mode_)
    : n(n_), spec(std::move(spec_)), mode(mode_) {
  if (n < 1) throw DomainError("CfpModel: n must be >= 1");
  if (mode == RateMode::MeanField) {
    if (spec.family() != Family::Assembly) {
      throw DomainError("mean-field rates require an assembly");
    }
    for (int j = 1; j <= n; ++j) {
      if (spec.assembly_rate(j) == 0) {
        throw DomainError("mean-field rates require a_j > 0 for all j <= n");
      }
    }
  }
}

bool has_positive_mass(const WeightSpec& spec, const PartitionState& eta) {
  return unnormalized_mass(spec, eta) != 0;
}

Rat transition_ratio(const WeightSpec& spec, const PartitionState& eta, int i, int j) {
  if (i < 1 || j < 1 || i + j > eta.n) throw DomainError("transition_ratio: need i+j <= n");
  if (i > j) std::swap(i, j);
  const int s = i + j;
  if (i != j) {
    if (eta.k(i) < 1 || eta.k(j) < 1) {
      throw DomainError("transition_ratio: i != j requires k_i, k_j >= 1");
    }
  } else if (eta.k(i) < 2) {
    throw DomainError("transition_ratio: i = j requires k_i >= 2");
  }
  const auto w = [&](int size, int count) { return spec.scaled_weight(size, count); };
  Rat num, den;
  if (i != j) {
    num = w(i, eta.k(i) - 1) * w(j, eta.k(j) - 1) * w(s, eta.k(s) + 1);
    den = w(i, eta.k(i)) * w(j, eta.k(j)) * w(s, eta.k(s));
  } else {
    num = w(i, eta.k(i) - 2) * w(s, eta.k(s) + 1);
    den = w(i, eta.k(i)) * w(s, eta.k(s));
  }
  if (den == 0) {
    throw DomainError("transition_ratio: state carries zero mass; ratio undefined");
  }
  return num / den;
}

std::vector<Transition> build_rates(const CfpModel& model, const PartitionState& eta) {
  if (!eta.valid() || eta.n != model.n) throw DomainError("build_rates: invalid state");
  const WeightSpec& spec = model.spec;
  std::vector<Transition> out;
  // Coagulations over unordered pairs {i,j}.
  for (int i = 1; i <= model.n; ++i) {
    if (eta.k(i) < 1) continue;
    for (int j = i; i + j <= model.n; ++j) {
      if (j == i ? eta.k(i) < 2 : eta.k(j) < 1) continue;
      Rat rate;
      if (model.mode == RateMode::MeanField) {
        const Rat phi =
            spec.assembly_rate(i + j) / (spec.assembly_rate(i) * spec.assembly_rate(j));
        const Rat pairs = (i == j) ? Rat(eta.k(i)) * Rat(eta.k(i) - 1)
                                   : Rat(eta.k(i)) * Rat(eta.k(j));
        rate = pairs * phi;
      } else {
        const Rat q = transition_ratio(spec, eta, i, j);
        if (q == 0) continue;  // target has zero mass
        rate = q * Rat(eta.k(i + j) + 1);
      }
      if (rate == 0) continue;
      out.push_back(Transition{Transition::Kind::Coag, i, j, coagulate(eta, i, j), rate});
    }
  }
  // Fragmentations of a size-s cluster into (i, s-i), one transition per
  // unordered split.
  for (int s = 2; s <= model.n; ++s) {
    if (eta.k(s) < 1) continue;
    for (int i = 1; 2 * i <= s; ++i) {
      const int j = s - i;
      const PartitionState target = fragment(eta, i, j);
      if (model.mode == RateMode::RatioGauge && !has_positive_mass(spec, target)) {
        continue;  // detailed balance forces a zero rate here
      }
      out.push_back(Transition{Transition::Kind::Frag, i, j, target, Rat(eta.k(s))});
    }
  }
  return out;
}

BalanceReport check_detailed_balance(const CfpModel& model, const RateAdjustment& adjust) {
  BalanceReport report;
  report.n = model.n;
  const oracle::PartitionList states = oracle::enumerate_partitions(model.n);
  std::map<std::vector<int>, Rat> mass;
  std::vector<PartitionState> positive;
  for (const PartitionState& eta : states.items) {
    const Rat w = unnormalized_mass(model.spec, eta);
    if (w != 0) {
      mass.emplace(eta.counts, w);
      positive.push_back(eta);
    }
  }
  const auto adjusted_rates = [&](const PartitionState& eta) {
    std::vector<Transition> ts = build_rates(model, eta);
    if (adjust) {
      for (Transition& t : ts) t.rate = adjust(eta, t, t.rate);
    }
    return ts;
  };
  for (const PartitionState& eta : positive) {
    for (const Transition& t : adjusted_rates(eta)) {
      if (t.kind != Transition::Kind::Coag) continue;
      ++report.pairs_checked;
      // Find the reverse fragmentation out of the coagulated state.
      Rat reverse = 0;
      for (const Transition& back : adjusted_rates(t.to)) {
        if (back.kind == Transition::Kind::Frag && back.i == t.i && back.j == t.j &&
            back.to == eta) {
          reverse = back.rate;
          break;
        }
      }
      const Rat forward_flow = mass.at(eta.counts) * t.rate;
      const Rat backward_flow = mass.at(t.to.counts) * reverse;
      if (forward_flow != backward_flow) {
        report.violations.push_back(
            BalanceViolation{eta, t.i, t.j, forward_flow, backward_flow});
      }
    }
  }
  return report;
}

StationaryResult stationary_exact(const CfpModel& model) {
  if (model.n > kStationaryLimit) {
    throw DomainError("stationary_exact: limited to n <= " + std::to_string(kStationaryLimit));
  }
  StationaryResult result;
  const oracle::PartitionList all = oracle::enumerate_partitions(model.n);
  result.states.n = model.n;
  for (const PartitionState& eta : all.items) {
    if (has_positive_mass(model.spec, eta)) result.states.items.push_back(eta);
  }
  const std::size_t m = result.states.items.size();
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t s = 0; s < m; ++s) index.emplace(result.states.items[s].counts, s);

  // Generator and connectivity.
  std::vector<std::vector<Rat>> q(m, std::vector<Rat>(m, 0));
  std::vector<std::size_t> component(m);
  for (std::size_t s = 0; s < m; ++s) component[s] = s;
  const std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (component[x] != x) x = component[x] = component[component[x]];
    return x;
  };
  for (std::size_t s = 0; s < m; ++s) {
    for (const Transition& t : build_rates(model, result.states.items[s])) {
      const auto it = index.find(t.to.counts);
      if (it == index.end()) continue;
      q[s][it->second] += t.rate;
      q[s][s] -= t.rate;
      component[find(s)] = find(it->second);
    }
  }
  for (std::size_t s = 0; s < m; ++s) {
    if (find(s) != find(0)) {
      result.reducible = true;
      return result;
    }
  }

  // Solve pi Q = 0 with sum pi = 1: columns of Q transposed, last row ones.
  std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m + 1, 0));
  for (std::size_t r = 0; r + 1 < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) a[r][c] = q[c][r];
    a[r][m] = 0;
  }
  for (std::size_t c = 0; c < m; ++c) a[m - 1][c] = 1;
  a[m - 1][m] = 1;
  for (std::size_t col = 0, row = 0; col < m && row < m; ++col) {
    std::size_t pivot = row;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) continue;
    std::swap(a[pivot], a[row]);
    const Rat inv = a[row][col];
    for (std::size_t c = col; c <= m; ++c) a[row][c] /= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rat factor = a[r][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= factor * a[row][c];
    }
    ++row;
  }
  result.pi.resize(m);
  for (std::size_t s = 0; s < m; ++s) result.pi[s] = a[s][m];

  // Compare with the target measure.
  Rat total = 0;
  std::vector<Rat> mu(m);
  for (std::size_t s = 0; s < m; ++s) {
    mu[s] = unnormalized_mass(model.spec, result.states.items[s]);
    total += mu[s];
  }
  result.matches_measure = true;
  for (std::size_t s = 0; s < m; ++s) {
    if (result.pi[s] != mu[s] / total) {
      result.matches_measure = false;
      break;
    }
  }
  return result;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa in [0,1); stdlib-independent for reproducibility.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_rat(const Rat& r) {
  const Int& num = numerator(r);
  return log_int(num) - log_int(denominator(r));
}

}  // namespace

SimulationReport simulate(const CfpModel& model, const SimulationOptions& opt) {
  if (opt.t_max < 0) throw DomainError("simulate: t_max must be >= 0");
  SimulationReport report;
  report.n = model.n;
  report.t_max = opt.t_max;
  report.seed = opt.seed;

  PartitionState state = opt.initial.value_or(PartitionState::singleton(model.n));
  if (!state.valid() || state.n != model.n) throw DomainError("simulate: invalid initial state");
  if (!has_positive_mass(model.spec, state)) {
    throw DomainError("simulate: initial state carries zero mass");
  }

  const bool track_states = model.n <= opt.occupation_limit;
  const int hist_sizes = std::min(opt.histogram_sizes, model.n);
  std::map<std::vector<int>, double> occupancy;
  std::map<std::vector<int>, std::vector<double>> batch_occupancy;
  std::map<int, std::vector<double>> histograms;
  for (int j = 1; j <= hist_sizes; ++j) histograms[j].assign(model.n / j + 1, 0.0);

  const int batches = std::max(1, opt.batches);
  const double batch_len = opt.t_max / batches;

  std::mt19937_64 rng(opt.seed);
  double now = 0;
  const auto credit = [&](const PartitionState& s, double from, double to) {
    if (to <= from) return;
    const double dt = to - from;
    if (track_states) {
      occupancy[s.counts] += dt;
      auto& row = batch_occupancy[s.counts];
      row.resize(batches, 0.0);
      for (int b = static_cast<int>(from / batch_len);
           b < batches && b * batch_len < to; ++b) {
        const double lo = std::max(from, b * batch_len);
        const double hi = std::min(to, (b + 1) * batch_len);
        if (hi > lo) row[b] += hi - lo;
      }
    }
    for (int j = 1; j <= hist_sizes; ++j) histograms[j][s.k(j)] += dt;
  };

  while (now < opt.t_max) {
    const std::vector<Transition> transitions = build_rates(model, state);
    if (transitions.empty()) {
      credit(state, now, opt.t_max);
      now = opt.t_max;
      break;
    }
    // Convert rates to doubles, rescaling time when they overflow.
    std::vector<double> logs(transitions.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < transitions.size(); ++t) {
      logs[t] = log_rat(transitions[t].rate);
      max_log = std::max(max_log, logs[t]);
    }
    double shift = 0;
    if (max_log > 600) {
      shift = max_log - 600;
      report.rates_rescaled = true;
      report.log_rate_scale = std::max(report.log_rate_scale, shift);
    }
    double total = 0;
    std::vector<double> rates(transitions.size());
    for (std::size_t t = 0; t < transitions.size(); ++t) {
      rates[t] = std::exp(logs[t] - shift);
      total += rates[t];
    }
    const double u1 = uniform01(rng);
    const double dt = -std::log1p(-u1) / total;
    const double next = now + dt;
    if (next >= opt.t_max) {
      credit(state, now, opt.t_max);
      now = opt.t_max;
      break;
    }
    credit(state, now, next);
    now = next;
    double pick = uniform01(rng) * total;
    std::size_t chosen = transitions.size() - 1;
    for (std::size_t t = 0; t < transitions.size(); ++t) {
      pick -= rates[t];
      if (pick <= 0) {
        chosen = t;
        break;
      }
    }
    state = transitions[chosen].to;
    ++report.events;
  }
  report.final_state = state;

  if (opt.t_max > 0) {
    for (auto& [j, hist] : histograms) {
      for (double& v : hist) v /= opt.t_max;
    }
    report.histograms = std::move(histograms);
    if (track_states) {
      for (const auto& [counts, time] : occupancy) {
        StateOccupation occ;
        occ.state = PartitionState::from_counts(model.n, counts);
        occ.fraction = time / opt.t_max;
        const auto& row = batch_occupancy[counts];
        double mean = 0;
        for (int b = 0; b < batches; ++b) mean += row.empty() ? 0 : row[b] / batch_len;
        mean /= batches;
        double var = 0;
        for (int b = 0; b < batches; ++b) {
          const double f = row.empty() ? 0 : row[b] / batch_len;
          var += (f - mean) * (f - mean);
        }
        var /= batches > 1 ? (batches - 1) : 1;
        occ.std_error = std::sqrt(var / batches);
        report.occupations.push_back(std::move(occ));
      }
      std::sort(report.occupations.begin(), report.occupations.end(),
                [](const StateOccupation& a, const StateOccupation& b) {
                  return state_less(a.state, b.state);
                });
    }
  } else {
    // t_max = 0: the initial state occupies everything.
    if (track_states) {
      report.occupations.push_back(StateOccupation{state, 1.0, 0.0});
    }
    report.histograms.clear();
    for (int j = 1; j <= hist_sizes; ++j) {
      std::vector<double> hist(model.n / j + 1, 0.0);
      hist[state.k(j)] = 1.0;
      report.histograms[j] = std::move(hist);
    }
  }
  return report;
}

}  // namespace partlab::cfp

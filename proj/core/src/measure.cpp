#include "partlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "partlab/errors.hpp"

namespace partlab {

PartitionState PartitionState::singleton(int n) {
  PartitionState s;
  s.n = n;
  s.counts.assign(n, 0);
  s.counts[n - 1] = 1;
  return s;
}

PartitionState PartitionState::from_counts(int n, std::vector<int> counts) {
  PartitionState s;
  s.n = n;
  counts.resize(n, 0);
  s.counts = std::move(counts);
  if (!s.valid()) throw DomainError("partition state does not sum to n");
  return s;
}

bool PartitionState::valid() const {
  if (n < 1 || static_cast<int>(counts.size()) != n) return false;
  long sum = 0;
  for (int j = 1; j <= n; ++j) {
    if (counts[j - 1] < 0) return false;
    sum += static_cast<long>(j) * counts[j - 1];
  }
  return sum == n;
}

int PartitionState::component_count() const {
  int total = 0;
  for (int c : counts) total += c;
  return total;
}

std::string PartitionState::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int j = n; j >= 1; --j) {
    for (int r = 0; r < counts[j - 1]; ++r) {
      if (!first) os << "+";
      os << j;
      first = false;
    }
  }
  return first ? "()" : os.str();
}

bool state_less(const PartitionState& a, const PartitionState& b) {
  for (int j = std::max(a.n, b.n); j >= 1; --j) {
    const int ka = j <= a.n ? a.counts[j - 1] : 0;
    const int kb = j <= b.n ? b.counts[j - 1] : 0;
    if (ka != kb) return ka < kb;
  }
  return false;
}

namespace {

Rat c_value(const WeightSpec& spec, int n, const CoefficientTables* tables) {
  if (tables) {
    if (tables->c.order() < n) throw DomainError("tables too short for n");
    return tables->c[n];
  }
  return partition_series<Rat>(spec, n)[n];
}

Rat tail_value(const WeightSpec& spec, int l, int at, int n, const CoefficientTables* tables) {
  if (tables) {
    const Series& t = tables->tail(l);
    if (t.order() < at) throw DomainError("tables too short for n");
    return t[at];
  }
  return tail_series<Rat>(spec, l, n)[at];
}

}  // namespace

Rat point_mass(const WeightSpec& spec, const PartitionState& eta,
               const CoefficientTables* tables) {
  if (!eta.valid()) throw DomainError("point_mass: invalid partition state");
  const Rat cn = c_value(spec, eta.n, tables);
  if (cn == 0) {
    throw DomainError("point_mass: the partition function vanishes at n=" +
                      std::to_string(eta.n));
  }
  Rat w = 1;
  for (int j = 1; j <= eta.n && w != 0; ++j) {
    if (eta.k(j) > 0) w *= spec.scaled_weight(j, eta.k(j));
  }
  return w / cn;
}

Rat prefix_probability(const WeightSpec& spec, int n, const std::vector<int>& prefix,
                       const CoefficientTables* tables) {
  const int l = static_cast<int>(prefix.size());
  if (l < 1 || l > n) throw DomainError("prefix_probability: need 1 <= l <= n");
  long m = 0;
  for (int j = 1; j <= l; ++j) {
    if (prefix[j - 1] < 0) throw DomainError("prefix_probability: negative count");
    m += static_cast<long>(j) * prefix[j - 1];
  }
  if (m > n) return 0;
  const Rat cn = c_value(spec, n, tables);
  if (cn == 0) {
    throw DomainError("prefix_probability: the partition function vanishes at n=" +
                      std::to_string(n));
  }
  Rat w = 1;
  for (int j = 1; j <= l && w != 0; ++j) {
    if (prefix[j - 1] > 0) w *= spec.scaled_weight(j, prefix[j - 1]);
  }
  if (w == 0) return 0;
  return w * tail_value(spec, l, n - static_cast<int>(m), n, tables) / cn;
}

CountLawTable exact_prefix_law(const WeightSpec& spec, int n, int l,
                               const CoefficientTables* tables) {
  if (l < 1 || l > n) throw DomainError("exact_prefix_law: need 1 <= l <= n");
  CoefficientTables local;
  if (!tables) {
    local = build_tables(spec, n, {l});
    tables = &local;
  }
  CountLawTable table;
  table.kind = CountLawTable::Kind::Exact;
  table.l = l;
  table.n = n;
  std::vector<int> prefix(l, 0);
  const auto emit = [&](auto&& self, int j, int used) -> void {
    if (j > l) {
      const Rat p = prefix_probability(spec, n, prefix, tables);
      if (p != 0) table.entries.emplace(prefix, CountLawTable::Entry{p, to_double(p)});
      return;
    }
    for (int k = 0; used + j * k <= n; ++k) {
      prefix[j - 1] = k;
      self(self, j + 1, used + j * k);
    }
    prefix[j - 1] = 0;
  };
  emit(emit, 1, 0);
  return table;
}

ComponentLaw tilted_component_law(const WeightSpec& spec, const Rat& rho, int j,
                                  double tail_eps) {
  if (rho < 0) throw DomainError("tilted_component_law: rho must be >= 0");
  ComponentLaw law;
  law.j = j;
  if (rho == 0) {  // degenerate extension: all mass at k = 0
    law.probs = {1.0};
    return law;
  }
  const WeightSpec tilted = spec.tilted_by(rho);
  const double normalizer = eval_component(tilted, j, 1);
  if (!std::isfinite(normalizer) || normalizer <= 0) {
    throw DomainError("tilted_component_law: normalizer diverges");
  }
  const double lz = std::log(normalizer);
  double cum = 0;
  const std::optional<long> bound = spec.support_bound(j);
  for (long k = 0;; ++k) {
    if (bound && k > *bound) break;
    const double lw = tilted.scaled_weight_log(j, static_cast<int>(k));
    const double p = std::exp(lw - lz);
    law.probs.push_back(p);
    cum += p;
    if (!bound && 1 - cum < tail_eps) break;
    if (k > 100000) throw ResourceError("tilted_component_law: law does not concentrate");
  }
  law.truncated_mass = std::max(0.0, 1 - cum);
  return law;
}

CountLawTable limit_prefix_law(const WeightSpec& spec, const Rat& rho, int l,
                               double tail_eps) {
  if (l < 1) throw DomainError("limit_prefix_law: need l >= 1");
  std::vector<ComponentLaw> laws;
  laws.reserve(l);
  double kept = 1;
  for (int j = 1; j <= l; ++j) {
    laws.push_back(tilted_component_law(spec, rho, j, tail_eps / (2.0 * l)));
    kept *= 1 - laws.back().truncated_mass;
  }
  CountLawTable table;
  table.kind = CountLawTable::Kind::Limit;
  table.l = l;
  table.truncated_mass = 1 - kept;
  std::vector<int> prefix(l, 0);
  const auto emit = [&](auto&& self, int j, double acc) -> void {
    if (j > l) {
      table.entries.emplace(prefix, CountLawTable::Entry{std::nullopt, acc});
      return;
    }
    for (std::size_t k = 0; k < laws[j - 1].probs.size(); ++k) {
      prefix[j - 1] = static_cast<int>(k);
      self(self, j + 1, acc * laws[j - 1].probs[k]);
    }
    prefix[j - 1] = 0;
  };
  emit(emit, 1, 1.0);
  return table;
}

double tv_distance(const CountLawTable& a, const CountLawTable& b) {
  if (a.l != b.l) throw DomainError("tv_distance: prefix lengths differ");
  double sum = 0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      sum += std::fabs(ia->second.value);
      ++ia;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      sum += std::fabs(ib->second.value);
      ++ib;
    } else {
      sum += std::fabs(ia->second.value - ib->second.value);
      ++ia;
      ++ib;
    }
  }
  return (sum + a.truncated_mass + b.truncated_mass) / 2.0;
}

Rat exact_covariance(const WeightSpec& spec, int n, int j1, int j2) {
  if (j1 < 1 || j2 < 1 || j1 == j2 || j1 > n || j2 > n) {
    throw DomainError("exact_covariance: need distinct sizes within 1..n");
  }
  // Product of all component factors except the two tracked sizes.
  std::vector<Rat> rest(n + 1, 0);
  rest[0] = 1;
  for (int j = 1; j <= n; ++j) {
    if (j == j1 || j == j2) continue;
    std::vector<Rat> f = detail::component_factor<Rat>(spec, j, n);
    bool trivial = true;
    for (std::size_t k = 1; k < f.size(); ++k) {
      if (f[k] != 0) {
        trivial = false;
        break;
      }
    }
    if (!trivial) detail::multiply_strided(rest, j, f);
  }
  // Single-size exclusions reuse the same accumulator times the other factor.
  const auto with_factor = [&](int j) {
    std::vector<Rat> acc = rest;
    std::vector<Rat> f = detail::component_factor<Rat>(spec, j, n);
    detail::multiply_strided(acc, j, f);
    return acc;
  };
  const std::vector<Rat> rest1 = with_factor(j2);  // everything except j1
  const std::vector<Rat> rest2 = with_factor(j1);  // everything except j2
  std::vector<Rat> all = rest1;
  {
    std::vector<Rat> f = detail::component_factor<Rat>(spec, j1, n);
    detail::multiply_strided(all, j1, f);
  }
  const Rat cn = all[n];
  if (cn == 0) throw DomainError("exact_covariance: partition function vanishes");
  Rat e1 = 0, e2 = 0, e12 = 0;
  for (int a = 1; static_cast<long>(a) * j1 <= n; ++a) {
    const Rat wa = spec.scaled_weight(j1, a);
    if (wa == 0) continue;
    e1 += Rat(a) * wa * rest1[n - a * j1];
    for (int b = 1; static_cast<long>(a) * j1 + static_cast<long>(b) * j2 <= n; ++b) {
      const Rat wb = spec.scaled_weight(j2, b);
      if (wb == 0) continue;
      e12 += Rat(a) * Rat(b) * wa * wb * rest[n - a * j1 - b * j2];
    }
  }
  for (int b = 1; static_cast<long>(b) * j2 <= n; ++b) {
    const Rat wb = spec.scaled_weight(j2, b);
    if (wb == 0) continue;
    e2 += Rat(b) * wb * rest2[n - b * j2];
  }
  return e12 / cn - (e1 / cn) * (e2 / cn);
}

}  // namespace partlab

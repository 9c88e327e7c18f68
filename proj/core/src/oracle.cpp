#include "partlab/oracle.hpp"

#include <algorithm>

#include "partlab/errors.hpp"

namespace partlab::oracle {

namespace {

void check_limit(int n, int limit) {
  if (n < 1) throw DomainError("enumeration: n must be >= 1");
  if (n > limit) {
    throw ResourceError("enumeration limit exceeded (n=" + std::to_string(n) +
                        ", limit=" + std::to_string(limit) + ")");
  }
}

void descend(int remaining, int max_part, std::vector<int>& counts, int n,
             std::vector<PartitionState>& out) {
  if (remaining == 0) {
    out.push_back(PartitionState::from_counts(n, counts));
    return;
  }
  for (int part = std::min(max_part, remaining); part >= 1; --part) {
    ++counts[part - 1];
    descend(remaining - part, part, counts, n, out);
    --counts[part - 1];
  }
}

}  // namespace

PartitionList enumerate_partitions(int n, int limit) {
  check_limit(n, limit);
  PartitionList list;
  list.n = n;
  std::vector<int> counts(n, 0);
  descend(n, n, counts, n, list.items);
  std::sort(list.items.begin(), list.items.end(), state_less);
  return list;
}

std::vector<PartitionState> enumerate_partitions_k(int n, int k, int limit) {
  check_limit(n, limit);
  if (k < 1 || k > n) throw DomainError("enumerate_partitions_k: need 1 <= k <= n");
  std::vector<PartitionState> out;
  for (const PartitionState& eta : enumerate_partitions(n, limit).items) {
    if (eta.component_count() == k) out.push_back(eta);
  }
  return out;
}

Rat brute_c_tilde(const WeightSpec& spec, int n, int limit) {
  check_limit(n, limit);
  Rat sum = 0;
  for (const PartitionState& eta : enumerate_partitions(n, limit).items) {
    Rat w = 1;
    for (int j = 1; j <= n && w != 0; ++j) {
      if (eta.k(j) > 0) w *= spec.scaled_weight(j, eta.k(j));
    }
    sum += w;
  }
  return sum;
}

CountLawTable brute_marginal(const WeightSpec& spec, int n, int l, int limit) {
  check_limit(n, limit);
  if (l < 1 || l > n) throw DomainError("brute_marginal: need 1 <= l <= n");
  Rat total = 0;
  std::map<std::vector<int>, Rat> mass;
  for (const PartitionState& eta : enumerate_partitions(n, limit).items) {
    Rat w = 1;
    for (int j = 1; j <= n && w != 0; ++j) {
      if (eta.k(j) > 0) w *= spec.scaled_weight(j, eta.k(j));
    }
    if (w == 0) continue;
    total += w;
    std::vector<int> prefix(eta.counts.begin(), eta.counts.begin() + l);
    mass[prefix] += w;
  }
  if (total == 0) throw DomainError("brute_marginal: partition function vanishes");
  CountLawTable table;
  table.kind = CountLawTable::Kind::Exact;
  table.l = l;
  table.n = n;
  for (auto& [prefix, w] : mass) {
    const Rat p = w / total;
    table.entries.emplace(prefix, CountLawTable::Entry{p, to_double(p)});
  }
  return table;
}

namespace {

Rat block_weight(const std::vector<Rat>& m, int size) {
  if (size < 1 || static_cast<std::size_t>(size) > m.size()) {
    throw DomainError("bell_polynomial: weight table shorter than a block size");
  }
  return m[size - 1];
}

}  // namespace

Rat bell_polynomial_enumerated(const std::vector<Rat>& m, int n, int k) {
  if (n < 1 || k < 1 || k > n) throw DomainError("bell_polynomial: need 1 <= k <= n");
  if (n > kSetPartitionLimit) {
    throw ResourceError("bell_polynomial_enumerated: capped at n <= " +
                        std::to_string(kSetPartitionLimit));
  }
  // Restricted growth strings enumerate set partitions of [n].
  std::vector<int> assign(n, 0);
  Rat sum = 0;
  const auto weigh = [&]() {
    int blocks = 0;
    std::vector<int> sizes(n, 0);
    for (int v : assign) {
      blocks = std::max(blocks, v + 1);
      ++sizes[v];
    }
    if (blocks != k) return;
    Rat w = 1;
    for (int b = 0; b < blocks; ++b) w *= block_weight(m, sizes[b]);
    sum += w;
  };
  // assign[0] = 0 fixed; assign[i] <= max(assign[0..i-1]) + 1.
  const auto step = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      weigh();
      return;
    }
    for (int v = 0; v <= used && v < k; ++v) {
      assign[i] = v;
      self(self, i + 1, std::max(used, v + 1));
    }
  };
  step(step, 1, 1);
  return sum;
}

Rat bell_polynomial(const std::vector<Rat>& m, int n, int k) {
  if (n < 1 || k < 1 || k > n) throw DomainError("bell_polynomial: need 1 <= k <= n");
  Rat sum = 0;
  for (const PartitionState& eta : enumerate_partitions_k(n, k)) {
    Rat term = 1;
    for (int j = 1; j <= n; ++j) {
      const int kj = eta.k(j);
      if (kj == 0) continue;
      term *= pow_rat(block_weight(m, j) / Rat(factorial(j)), kj);
      term /= Rat(factorial(kj));
    }
    sum += term;
  }
  sum *= Rat(factorial(n));
  if (n <= kSetPartitionLimit) {
    const Rat direct = bell_polynomial_enumerated(m, n, k);
    if (direct != sum) {
      throw Error("bell_polynomial: enumeration and partition-sum paths disagree");
    }
  }
  return sum;
}

Int set_partition_count(const PartitionState& eta) {
  if (!eta.valid()) throw DomainError("set_partition_count: invalid state");
  Rat value(factorial(eta.n));
  for (int j = 1; j <= eta.n; ++j) {
    const int kj = eta.k(j);
    if (kj == 0) continue;
    value /= Rat(factorial(kj)) * pow_rat(Rat(factorial(j)), kj);
  }
  if (denominator(value) != 1) throw Error("set_partition_count: non-integer result");
  return numerator(value);
}

Rat gibbs_pnk(const std::vector<Rat>& m, int n, int k, const PartitionState& eta) {
  if (!eta.valid() || eta.n != n || eta.component_count() != k) {
    throw DomainError("gibbs_pnk: eta is not a partition of n into k parts");
  }
  const auto weight = [&](const PartitionState& state) {
    Rat term = 1;
    for (int j = 1; j <= n; ++j) {
      const int kj = state.k(j);
      if (kj == 0) continue;
      term *= pow_rat(block_weight(m, j) / Rat(factorial(j)), kj);
      term /= Rat(factorial(kj));
    }
    return term;
  };
  Rat total = 0;
  for (const PartitionState& state : enumerate_partitions_k(n, k)) total += weight(state);
  if (total == 0) throw DomainError("gibbs_pnk: partition function vanishes");
  return weight(eta) / total;
}

}  // namespace partlab::oracle

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "partlab/series.hpp"
#include "partlab/weights.hpp"

namespace partlab {

/// Multiplicity vector (k_1,...,k_n) with sum j*k_j = n.
struct PartitionState {
  int n = 0;
  std::vector<int> counts;  // counts[j-1] = number of components of size j

  static PartitionState singleton(int n);  // one component of size n
  static PartitionState from_counts(int n, std::vector<int> counts);

  int k(int j) const { return counts[j - 1]; }
  int& k(int j) { return counts[j - 1]; }
  bool valid() const;
  int component_count() const;  // sum of k_j
  std::string to_string() const;

  friend bool operator==(const PartitionState& a, const PartitionState& b) {
    return a.n == b.n && a.counts == b.counts;
  }
};

/// Canonical order: lexicographic on the reversed multiplicity vector
/// (k_n,...,k_1).
bool state_less(const PartitionState& a, const PartitionState& b);

/// Joint law of the first l component counts: exact at finite n, floating for
/// the limit product law.
struct CountLawTable {
  enum class Kind { Exact, Limit };

  struct Entry {
    std::optional<Rat> exact;
    double value = 0;
  };

  Kind kind = Kind::Exact;
  int l = 0;
  std::optional<int> n;  // empty for the limit law
  std::map<std::vector<int>, Entry> entries;
  double truncated_mass = 0;  // reported tail mass dropped from limit laws
};

/// Point mass of the measure at eta, computed in scaled form
/// (product of scaled weights over the scaled partition-function value).
Rat point_mass(const WeightSpec& spec, const PartitionState& eta,
               const CoefficientTables* tables = nullptr);

/// P(K_1 = k_1,...,K_l = k_l) at size n, exact; 0 when the prefix carries
/// more than n.
Rat prefix_probability(const WeightSpec& spec, int n, const std::vector<int>& prefix,
                       const CoefficientTables* tables = nullptr);

/// Full exact joint law of the first l counts at size n.
CountLawTable exact_prefix_law(const WeightSpec& spec, int n, int l,
                               const CoefficientTables* tables = nullptr);

/// One tilted component law: k -> rho^{jk} w(j,k) / normalizer, truncated at
/// tail mass < tail_eps (the dropped mass is reported).
struct ComponentLaw {
  int j = 0;
  std::vector<double> probs;  // index k
  double truncated_mass = 0;
};
ComponentLaw tilted_component_law(const WeightSpec& spec, const Rat& rho, int j,
                                  double tail_eps = 1e-12);

/// Limit product law of the first l counts under tilt rho.
CountLawTable limit_prefix_law(const WeightSpec& spec, const Rat& rho, int l,
                               double tail_eps = 1e-12);

/// (1/2) sum |A - B| over the union support plus half the unmatched
/// truncated tail masses.  Both tables must share l.
double tv_distance(const CountLawTable& a, const CountLawTable& b);

/// Exact covariance of the component counts at two sizes.
Rat exact_covariance(const WeightSpec& spec, int n, int j1, int j2);

}  // namespace partlab

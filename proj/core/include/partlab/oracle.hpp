#pragma once

#include <vector>

#include "partlab/limits.hpp"
#include "partlab/measure.hpp"

namespace partlab::oracle {

/// Every partition of n in canonical order.  Ground truth for the series
/// engine; deliberately independent of it.
struct PartitionList {
  int n = 0;
  std::vector<PartitionState> items;
};

PartitionList enumerate_partitions(int n, int limit = kEnumerationLimit);

/// Partitions of n with exactly k parts.
std::vector<PartitionState> enumerate_partitions_k(int n, int k, int limit = kEnumerationLimit);

/// Scaled partition-function value by direct summation over all partitions.
Rat brute_c_tilde(const WeightSpec& spec, int n, int limit = kEnumerationLimit);

/// Exact joint law of the first l counts by direct summation.
CountLawTable brute_marginal(const WeightSpec& spec, int n, int l,
                             int limit = kEnumerationLimit);

/// Weighted count of set partitions of [n] into k blocks with block-size
/// weights m (m[j-1] weights blocks of size j).  Evaluated through the
/// integer-partition sum n! * sum over partitions of prod (m_j/j!)^{k_j}/k_j!;
/// for n <= 10 the direct set-partition enumeration is run as well and a
/// disagreement throws.
Rat bell_polynomial(const std::vector<Rat>& m, int n, int k);

/// Direct set-partition enumeration path (n <= 10).
Rat bell_polynomial_enumerated(const std::vector<Rat>& m, int n, int k);

/// Number of set partitions of [n] whose block sizes form eta:
/// n! / prod k_j! (j!)^{k_j}.
Int set_partition_count(const PartitionState& eta);

/// Microcanonical mass of eta among partitions of n into k parts under
/// block-size weights m.
Rat gibbs_pnk(const std::vector<Rat>& m, int n, int k, const PartitionState& eta);

}  // namespace partlab::oracle

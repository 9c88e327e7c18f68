#pragma once

#include <cstdint>

namespace partlab {

// Work/memory guard shared by the enumeration, lattice-count and series
// builders.  Overridable through the PARTLAB_WORK_LIMIT environment variable
// (a plain integer; unit is "elementary operations or bytes", whichever the
// guarded routine meters).
std::uint64_t work_limit();

/// Full partition enumeration is refused above this n.
constexpr int kEnumerationLimit = 40;

/// Set-partition enumeration (Bell-number growth) is capped here.
constexpr int kSetPartitionLimit = 10;

/// Exact stationary solves are limited to this n.
constexpr int kStationaryLimit = 12;

}  // namespace partlab

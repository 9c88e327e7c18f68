#include "partlab/limits.hpp"

#include <cstdlib>
#include <string>

namespace partlab {

std::uint64_t work_limit() {
  static const std::uint64_t value = [] {
    if (const char* env = std::getenv("PARTLAB_WORK_LIMIT")) {
      try {
        const long long v = std::stoll(env);
        if (v > 0) return static_cast<std::uint64_t>(v);
      } catch (...) {
        // fall through to the default on malformed input
      }
    }
    return static_cast<std::uint64_t>(2'000'000'000);
  }();
  return value;
}

}  // namespace partlab

#pragma once

#include <stdexcept>
#include <string>

namespace partlab {

/// Base class for all partlab errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter or mathematical-domain violation (bad p, rho beyond radius,
/// precondition failure, c_n = 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// A configured work or memory budget was exceeded.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(what) {}
};

}  // namespace partlab

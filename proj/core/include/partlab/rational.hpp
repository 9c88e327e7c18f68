#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace partlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// n! as a big integer, memoized.
const Int& factorial(unsigned n);

/// Binomial coefficient with arbitrarily large top argument and small k.
/// Negative n is not supported; k past n yields 0.
Int binomial(const Int& n, unsigned k);

/// x^e for rational x and integer e (e may be negative when x != 0).
Rat pow_rat(const Rat& x, long e);

/// Nearest integer, ties rounded up (floor(x + 1/2)).
Int round_nearest(const Rat& x);

/// ln(x) for a positive big integer, accurate to double precision.
double log_int(const Int& x);

/// Rational -> double without intermediate overflow for huge num/den.
double to_double(const Rat& x);

/// "num/den" when den != 1, plain integer string otherwise.
std::string to_string(const Rat& x);

/// Parse "123", "-4/7" exactly.  Returns nullopt on malformed input or a
/// zero denominator.  Decimal strings are *not* accepted here; see
/// parse_decimal.
std::optional<Rat> parse_rational(const std::string& text);

/// Parse a decimal literal like "0.5" or "-1.25e3" to an exact rational.
std::optional<Rat> parse_decimal(const std::string& text);

}  // namespace partlab

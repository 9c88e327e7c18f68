#include "partlab/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cctype>
#include <cmath>
#include <mutex>
#include <vector>

#include "partlab/errors.hpp"

namespace partlab {

const Int& factorial(unsigned n) {
  static std::vector<Int> cache{1};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (cache.size() <= n) {
    cache.push_back(cache.back() * static_cast<unsigned>(cache.size()));
  }
  return cache[n];
}

Int binomial(const Int& n, unsigned k) {
  if (n < 0) throw DomainError("binomial: negative top argument");
  if (n < k) return 0;
  Int num = 1;
  Int den = 1;
  for (unsigned i = 1; i <= k; ++i) {
    num *= n - k + i;
    den *= i;
  }
  return num / den;  // exact: binomials are integers
}

Rat pow_rat(const Rat& x, long e) {
  using boost::multiprecision::pow;
  if (e == 0) return 1;
  if (x == 0) {
    if (e < 0) throw DomainError("pow_rat: 0 to a negative power");
    return 0;
  }
  const unsigned a = static_cast<unsigned>(e < 0 ? -e : e);
  Int num = pow(numerator(x), a);
  Int den = pow(denominator(x), a);
  return e < 0 ? Rat(den, num) : Rat(num, den);
}

Int round_nearest(const Rat& x) {
  const Rat shifted = x + Rat(1, 2);
  Int q = numerator(shifted) / denominator(shifted);
  if (shifted < 0 && q * denominator(shifted) != numerator(shifted)) --q;
  return q;
}

double log_int(const Int& x) {
  if (x <= 0) throw DomainError("log_int: nonpositive argument");
  const unsigned bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 53) return std::log(x.convert_to<double>());
  const unsigned shift = bits - 53;
  const Int top = x >> shift;
  return std::log(top.convert_to<double>()) + shift * M_LN2;
}

double to_double(const Rat& x) {
  if (x == 0) return 0.0;
  const Int& num = numerator(x);
  const Int& den = denominator(x);
  const Int mag = num < 0 ? Int(-num) : num;
  const unsigned bn = boost::multiprecision::msb(mag);
  const unsigned bd = boost::multiprecision::msb(den);
  if (bn < 900 && bd < 900) return x.convert_to<double>();
  const double lg = log_int(mag) - log_int(den);
  const double v = std::exp(lg);
  return num < 0 ? -v : v;
}

std::string to_string(const Rat& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

std::optional<Rat> parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_integer_token(text)) return std::nullopt;
    return Rat(Int(text));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!is_integer_token(num) || !is_integer_token(den)) return std::nullopt;
  Int d(den);
  if (d == 0) return std::nullopt;
  return Rat(Int(num), d);
}

std::optional<Rat> parse_decimal(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  std::string digits;
  long scale = 0;
  bool seen_dot = false, seen_digit = false;
  long exponent = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (seen_dot) ++scale;
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      const std::string tail = text.substr(i + 1);
      if (!is_integer_token(tail)) return std::nullopt;
      exponent = std::stol(tail);
      break;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  Rat value(Int(digits.empty() ? "0" : digits));
  if (text[0] == '-') value = -value;
  const long net = exponent - scale;
  Rat ten(10);
  value *= pow_rat(ten, net);
  return value;
}

}  // namespace partlab

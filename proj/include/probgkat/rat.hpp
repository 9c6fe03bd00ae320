#pragma once

// Exact rational arithmetic. All probabilities, masses and capacities in the
// library are rationals; no floating point enters any semantic computation.

#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace probgkat {

using Int = boost::multiprecision::cpp_int;

// Canonical form (reduced, positive denominator) is maintained by the type.
using Rat = boost::multiprecision::cpp_rational;

inline bool is_probability(const Rat& r) { return r >= 0 && r <= 1; }

// Renders "num/den", omitting "/den" when the denominator is 1.
inline std::string rat_to_string(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

// Accepts "num", "num/den" and finite decimals like "0.25". Throws
// std::invalid_argument on malformed input or a zero denominator.
inline Rat rat_from_string(const std::string& s) {
  auto fail = [&]() -> Rat {
    throw std::invalid_argument("malformed rational literal: '" + s + "'");
  };
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
    neg = s[i] == '-';
    ++i;
  }
  auto digits = [&](std::string& out) {
    std::size_t start = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') out += s[i++];
    return i > start;
  };
  std::string whole;
  if (!digits(whole)) return fail();
  Rat value;
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::string frac;
    if (!digits(frac)) return fail();
    Int scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    value = Rat(Int(whole) * scale + Int(frac), scale);
  } else if (i < s.size() && s[i] == '/') {
    ++i;
    std::string den;
    if (!digits(den)) return fail();
    Int d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    value = Rat(Int(whole), d);
  } else {
    value = Rat(Int(whole));
  }
  if (i != s.size()) return fail();
  return neg ? Rat(-value) : value;
}

inline std::size_t hash_rat(const Rat& r) {
  std::size_t seed = 0;
  boost::hash_combine(seed, numerator(r));
  boost::hash_combine(seed, denominator(r));
  return seed;
}

}  // namespace probgkat

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace starspec {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// n! for n >= 0. Values are memoised; safe to call from several threads.
const BigInt& factorial(int n);

// Binomial coefficient, zero when k < 0 or k > n (and for negative n).
BigInt binomial(int n, int k);

// Multinomial (sum parts)! / prod(parts!).
BigInt multinomial(const int* parts, int count);

// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);

// Parse "p/q" or "p". Throws std::invalid_argument on malformed input.
Rational parse_rational(const std::string& text);

double to_double(const Rational& value);

}  // namespace starspec

#include "starspec/combinatorics.hpp"

#include <deque>
#include <mutex>
#include <stdexcept>

namespace starspec {

const BigInt& factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of a negative integer");
  // std::deque keeps references stable while the table grows.
  static std::deque<BigInt> table{BigInt(1)};
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  while (static_cast<int>(table.size()) <= n) {
    const auto k = static_cast<long>(table.size());
    table.push_back(table.back() * k);
  }
  return table[static_cast<std::size_t>(n)];
}

BigInt binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

BigInt multinomial(const int* parts, int count) {
  int total = 0;
  BigInt denom = 1;
  for (int i = 0; i < count; ++i) {
    if (parts[i] < 0) return 0;
    total += parts[i];
    denom *= factorial(parts[i]);
  }
  return factorial(total) / denom;
}

std::string to_string(const Rational& value) {
  const auto num = boost::multiprecision::numerator(value);
  const auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (text.empty() || slash == 0 || slash + 1 == text.size()) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace starspec

#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace tropsand {

using int128 = __int128;

/// Exact rational number with a 128-bit numerator and positive denominator,
/// always kept in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(int128 num, int128 den = 1);  // NOLINT(google-explicit-constructor)

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  double to_double() const;
  std::string str() const;  // "n/d", or "n" when integral

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  int128 num_ = 0;
  int128 den_ = 1;
};

int128 gcd128(int128 a, int128 b);
std::string to_string(int128 v);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace tropsand

#pragma once

#include <cstdint>
#include <compare>

namespace persp {

__extension__ typedef __int128 Int128;

/// Exact fraction with a positive denominator, always in lowest terms.
/// Arithmetic throws persp::Error on 128-bit overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(Int128 num, Int128 den = 1);

  Int128 num() const noexcept { return num_; }
  Int128 den() const noexcept { return den_; }

  // Correctly rounded when numerator and denominator fit in 53 bits.
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  Int128 num_ = 0;
  Int128 den_ = 1;
};

}  // namespace persp

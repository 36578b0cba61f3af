#pragma once

#include <cstdint>
#include <string>

namespace stencil {

/// A constant that stays an exact rational for as long as the arithmetic
/// allows, and degrades to a double once a float enters the computation or
/// an intermediate overflows 64 bits.
class Number {
 public:
  Number() = default;

  static Number integer(int64_t v) { return Number(v, 1); }
  static Number rational(int64_t num, int64_t den);
  static Number real(double v);

  bool is_exact() const { return exact_; }
  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  double value() const { return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : real_; }

  bool is_zero() const { return exact_ ? num_ == 0 : real_ == 0.0; }
  bool is_one() const { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
  bool is_minus_one() const { return exact_ ? (num_ == -1 && den_ == 1) : real_ == -1.0; }
  bool is_negative() const { return value() < 0; }
  /// True for exact integers and for floats with an integral value.
  bool is_integral() const;
  int64_t as_integer() const;

  Number operator-() const;
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b) { return a + (-b); }
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator/(const Number& a, const Number& b);
  Number pow(int exponent) const;
  Number abs() const { return is_negative() ? -*this : *this; }
  Number to_real() const { return real(value()); }

  /// Structural equality: exactness and value must both match.
  friend bool operator==(const Number& a, const Number& b);
  /// Total order used for canonical sorting.
  int compare(const Number& other) const;

  size_t hash() const;
  /// "1/12", "-3", "9.0", "0.25".
  std::string str() const;

 private:
  Number(int64_t num, int64_t den) : exact_(true), num_(num), den_(den) {}

  bool exact_ = true;
  int64_t num_ = 0;
  int64_t den_ = 1;
  double real_ = 0.0;
};

/// Shortest round-trip text for a double, always carrying a '.' or exponent.
std::string format_double(double v);

}  // namespace stencil

#include "stencil/number.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace stencil {

namespace {

using i128 = __int128;

bool fits(i128 v) {
  return v >= std::numeric_limits<int64_t>::min() && v <= std::numeric_limits<int64_t>::max();
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Reduces num/den; falls back to a double when the reduced form overflows.
Number make_reduced(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("division by zero in constant arithmetic");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits(num) || !fits(den)) return Number::real(static_cast<double>(num) / static_cast<double>(den));
  return Number::rational(static_cast<int64_t>(num), static_cast<int64_t>(den));
}

}  // namespace

Number Number::rational(int64_t num, int64_t den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Number(num, den);
}

Number Number::real(double v) {
  Number n;
  n.exact_ = false;
  n.real_ = v;
  return n;
}

bool Number::is_integral() const {
  if (exact_) return den_ == 1;
  return std::isfinite(real_) && std::floor(real_) == real_;
}

int64_t Number::as_integer() const {
  if (exact_) return den_ == 1 ? num_ : static_cast<int64_t>(std::floor(value()));
  return static_cast<int64_t>(std::llround(real_));
}

Number Number::operator-() const {
  if (exact_) return Number(-num_, den_);
  return real(-real_);
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_)
    return make_reduced(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                        static_cast<i128>(a.den_) * b.den_);
  return Number::real(a.value() + b.value());
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_)
    return make_reduced(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
  return Number::real(a.value() * b.value());
}

Number operator/(const Number& a, const Number& b) {
  if (b.is_zero()) throw std::domain_error("division by zero in constant arithmetic");
  if (a.exact_ && b.exact_)
    return make_reduced(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
  return Number::real(a.value() / b.value());
}

Number Number::pow(int exponent) const {
  if (exponent == 0) return integer(1);
  if (!exact_) return real(std::pow(real_, exponent));
  Number base = exponent < 0 ? integer(1) / *this : *this;
  Number result = integer(1);
  for (int i = 0, n = exponent < 0 ? -exponent : exponent; i < n; ++i) result = result * base;
  return result;
}

bool operator==(const Number& a, const Number& b) {
  if (a.exact_ != b.exact_) return false;
  if (a.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
  return std::memcmp(&a.real_, &b.real_, sizeof(double)) == 0 || a.real_ == b.real_;
}

int Number::compare(const Number& other) const {
  double x = value(), y = other.value();
  if (x < y) return -1;
  if (x > y) return 1;
  if (exact_ != other.exact_) return exact_ ? -1 : 1;
  if (exact_) {
    // Equal doubles from distinct rationals: order by exact cross product.
    i128 l = static_cast<i128>(num_) * other.den_, r = static_cast<i128>(other.num_) * den_;
    return l < r ? -1 : (l > r ? 1 : 0);
  }
  return 0;
}

size_t Number::hash() const {
  if (exact_) return std::hash<int64_t>{}(num_) * 31 + std::hash<int64_t>{}(den_) * 7 + 1;
  double v = real_ == 0.0 ? 0.0 : real_;
  return std::hash<double>{}(v) * 17 + 3;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string Number::str() const {
  if (!exact_) return format_double(real_);
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace stencil

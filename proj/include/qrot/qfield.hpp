#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace qrot {

using BigInt = mpz_class;
using Rational = mpq_class;

class ArithmeticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact element (a + b*sqrt(d)) / q of a real quadratic field.
///
/// Values are kept in canonical form: q > 0 and gcd(a, b, q) = 1, so two
/// elements are equal iff their fields are equal. The radicand is carried
/// per element; mixing radicands in a binary operation throws. A rational
/// (b == 0) may be combined with any radicand.
class QuadElem {
 public:
  QuadElem() = default;
  QuadElem(long a, unsigned d);  // NOLINT(google-explicit-constructor)
  QuadElem(BigInt a, BigInt b, BigInt q, unsigned d);

  static QuadElem rational(const Rational& r, unsigned d);
  static QuadElem sqrt(unsigned d);  // sqrt(d) itself

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& q() const { return q_; }
  unsigned d() const { return d_; }

  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  QuadElem operator-() const;
  QuadElem& operator+=(const QuadElem& o);
  QuadElem& operator-=(const QuadElem& o);
  QuadElem& operator*=(const QuadElem& o);
  QuadElem& operator/=(const QuadElem& o);

  friend QuadElem operator+(QuadElem x, const QuadElem& y) { return x += y; }
  friend QuadElem operator-(QuadElem x, const QuadElem& y) { return x -= y; }
  friend QuadElem operator*(QuadElem x, const QuadElem& y) { return x *= y; }
  friend QuadElem operator/(QuadElem x, const QuadElem& y) { return x /= y; }

  friend bool operator==(const QuadElem& x, const QuadElem& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.q_ == y.q_ &&
           (x.b_ == 0 || x.d_ == y.d_);
  }
  /// Orders by real value.
  friend std::strong_ordering operator<=>(const QuadElem& x,
                                          const QuadElem& y);

  /// Galois conjugate: sqrt(d) -> -sqrt(d).
  QuadElem conj() const;
  /// x * conj(x), always rational.
  Rational norm() const;
  /// -1, 0 or +1; exact.
  int sign() const;
  BigInt floor() const;
  BigInt ceil() const;
  QuadElem frac() const;
  QuadElem abs() const { return sign() < 0 ? -*this : *this; }

  /// Floating-point approximation, for diagnostics and plotting only.
  double to_double() const;

  /// "(a+b*sqrt(d))/q"; rationals print as "a" or "a/q".
  std::string str() const;
  /// Accepts the output of str() and also "a", "a/q", "(a+b*sqrt(d))/q",
  /// "b*sqrt(d)", "sqrt(d)" with optional signs.
  static QuadElem parse(std::string_view text, unsigned default_d = 0);

  std::size_t hash() const;

  /// Common radicand for a binary operation; throws on mismatch.
  static unsigned join_d(const QuadElem& x, const QuadElem& y);

 private:
  void normalize();

  BigInt a_{0};
  BigInt b_{0};
  BigInt q_{1};
  unsigned d_ = 0;
};

std::ostream& operator<<(std::ostream& os, const QuadElem& x);

/// Sign of a + b*sqrt(d) for integers, via a^2 versus d*b^2.
int sign_of(const BigInt& a, const BigInt& b, unsigned d);

/// Floor of the exact square root of n >= 0.
BigInt isqrt(const BigInt& n);

QuadElem min(const QuadElem& x, const QuadElem& y);
QuadElem max(const QuadElem& x, const QuadElem& y);

/// Ordered pair of field elements: torus points, scaled coordinates, row
/// vectors.
struct Point {
  QuadElem x;
  QuadElem y;

  friend bool operator==(const Point&, const Point&) = default;
  /// Lexicographic by exact value.
  friend std::strong_ordering operator<=>(const Point& p, const Point& q) {
    if (auto c = p.x <=> q.x; c != 0) return c;
    return p.y <=> q.y;
  }

  Point operator-() const { return {-x, -y}; }
  friend Point operator+(const Point& p, const Point& q) {
    return {p.x + q.x, p.y + q.y};
  }
  friend Point operator-(const Point& p, const Point& q) {
    return {p.x - q.x, p.y - q.y};
  }
  friend Point operator*(const QuadElem& s, const Point& p) {
    return {s * p.x, s * p.y};
  }
  Point conj() const { return {x.conj(), y.conj()}; }
  /// max(|x|, |y|).
  QuadElem sup_norm() const { return max(x.abs(), y.abs()); }
  bool in_unit_square() const;

  std::string str() const;
  /// "(x, y)" with both coordinates in QuadElem text form.
  static Point parse(std::string_view text, unsigned default_d = 0);

  std::size_t hash() const;
};

std::ostream& operator<<(std::ostream& os, const Point& p);

struct PointHash {
  std::size_t operator()(const Point& p) const { return p.hash(); }
};

}  // namespace qrot

template <>
struct std::hash<qrot::QuadElem> {
  std::size_t operator()(const qrot::QuadElem& x) const { return x.hash(); }
};

#include "qrot/qfield.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>

namespace qrot {
namespace {

bool valid_radicand(unsigned d) { return d == 0 || d == 2 || d == 3 || d == 5; }

BigInt floor_div(const BigInt& n, const BigInt& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), n.get_mpz_t(), q.get_mpz_t());
  return r;
}

std::size_t limb_hash(const BigInt& v) {
  std::size_t h = static_cast<std::size_t>(mpz_size(v.get_mpz_t()));
  if (mpz_size(v.get_mpz_t()) > 0) {
    h = h * 1000003u ^ static_cast<std::size_t>(mpz_getlimbn(v.get_mpz_t(), 0));
  }
  return h * 31u + static_cast<std::size_t>(mpz_sgn(v.get_mpz_t()) + 1);
}

}  // namespace

int sign_of(const BigInt& a, const BigInt& b, unsigned d) {
  const int sa = sgn(a);
  const int sb = sgn(b);
  if (sb == 0 || d == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: the term with the larger square wins.
  const BigInt a2 = a * a;
  const BigInt b2d = b * b * d;
  if (a2 > b2d) return sa;
  if (a2 < b2d) return sb;
  return 0;  // unreachable for squarefree d > 1
}

BigInt isqrt(const BigInt& n) {
  if (n < 0) throw ArithmeticError("isqrt of a negative number");
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

QuadElem::QuadElem(long a, unsigned d) : a_(a), d_(d) {
  if (!valid_radicand(d)) throw ArithmeticError("radicand must be 2, 3 or 5");
}

QuadElem::QuadElem(BigInt a, BigInt b, BigInt q, unsigned d)
    : a_(std::move(a)), b_(std::move(b)), q_(std::move(q)), d_(d) {
  if (!valid_radicand(d)) throw ArithmeticError("radicand must be 2, 3 or 5");
  if (q_ == 0) throw ArithmeticError("zero denominator");
  if (d_ == 0 && b_ != 0) throw ArithmeticError("sqrt term without radicand");
  normalize();
}

QuadElem QuadElem::rational(const Rational& r, unsigned d) {
  return QuadElem(r.get_num(), 0, r.get_den(), d);
}

QuadElem QuadElem::sqrt(unsigned d) {
  if (d == 0) throw ArithmeticError("sqrt needs a radicand");
  return QuadElem(0, 1, 1, d);
}

void QuadElem::normalize() {
  if (q_ < 0) {
    q_ = -q_;
    a_ = -a_;
    b_ = -b_;
  }
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), q_.get_mpz_t());
  if (g != 1) {
    mpz_divexact(a_.get_mpz_t(), a_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(b_.get_mpz_t(), b_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(q_.get_mpz_t(), q_.get_mpz_t(), g.get_mpz_t());
  }
}

unsigned QuadElem::join_d(const QuadElem& x, const QuadElem& y) {
  if (x.d_ == y.d_) return x.d_;
  if (x.d_ == 0) return y.d_;
  if (y.d_ == 0) return x.d_;
  throw ArithmeticError("mixed radicands: sqrt(" + std::to_string(x.d_) +
                        ") and sqrt(" + std::to_string(y.d_) + ")");
}

QuadElem QuadElem::operator-() const {
  QuadElem r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

QuadElem& QuadElem::operator+=(const QuadElem& o) {
  d_ = join_d(*this, o);
  if (q_ == o.q_) {
    a_ += o.a_;
    b_ += o.b_;
  } else {
    a_ = a_ * o.q_ + o.a_ * q_;
    b_ = b_ * o.q_ + o.b_ * q_;
    q_ *= o.q_;
  }
  normalize();
  return *this;
}

QuadElem& QuadElem::operator-=(const QuadElem& o) { return *this += -o; }

QuadElem& QuadElem::operator*=(const QuadElem& o) {
  d_ = join_d(*this, o);
  BigInt na = a_ * o.a_ + b_ * o.b_ * d_;
  BigInt nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  q_ *= o.q_;
  normalize();
  return *this;
}

QuadElem& QuadElem::operator/=(const QuadElem& o) {
  if (o.is_zero()) throw ArithmeticError("division by zero");
  d_ = join_d(*this, o);
  // x / y = x * conj(y) * q_y^2 / (q_y * (a_y^2 - d b_y^2))
  const BigInt n = o.a_ * o.a_ - o.b_ * o.b_ * d_;
  QuadElem c(o.a_ * o.q_, -o.b_ * o.q_, n, d_);
  *this *= c;
  return *this;
}

std::strong_ordering operator<=>(const QuadElem& x, const QuadElem& y) {
  const int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

QuadElem QuadElem::conj() const {
  QuadElem r = *this;
  r.b_ = -r.b_;
  return r;
}

Rational QuadElem::norm() const {
  Rational r(a_ * a_ - b_ * b_ * d_, q_ * q_);
  r.canonicalize();
  return r;
}

int QuadElem::sign() const { return sign_of(a_, b_, d_); }

BigInt QuadElem::floor() const {
  BigInt num = a_;
  if (b_ != 0) {
    // floor(b*sqrt(d)) exactly; b^2 d is never a perfect square.
    const BigInt root = isqrt(b_ * b_ * d_);
    num += (b_ > 0) ? root : BigInt(-root - 1);
  }
  // floor((a + s)/q) == floor((a + floor(s))/q) for integer a and q > 0.
  BigInt n = floor_div(num, q_);
#ifndef NDEBUG
  const QuadElem lo = *this - QuadElem(n, 0, 1, d_);
  if (lo.sign() < 0 || (lo - QuadElem(1, d_)).sign() >= 0) {
    throw ArithmeticError("floor verification failed");
  }
#endif
  return n;
}

BigInt QuadElem::ceil() const { return -(-*this).floor(); }

QuadElem QuadElem::frac() const { return *this - QuadElem(floor(), 0, 1, d_); }

double QuadElem::to_double() const {
  const double s = (d_ == 0) ? 0.0 : std::sqrt(static_cast<double>(d_));
  return (a_.get_d() + b_.get_d() * s) / q_.get_d();
}

std::string QuadElem::str() const {
  std::ostringstream os;
  if (b_ == 0) {
    os << a_;
    if (q_ != 1) os << '/' << q_;
    return os.str();
  }
  os << '(' << a_ << (b_ < 0 ? '-' : '+') << BigInt(::abs(b_)) << "*sqrt(" << d_
     << "))/" << q_;
  return os.str();
}

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  bool eat_word(std::string_view w) {
    skip();
    if (s_.substr(i_, w.size()) == w) {
      i_ += w.size();
      return true;
    }
    return false;
  }
  bool peek_digit() {
    skip();
    return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]));
  }
  BigInt integer() {
    skip();
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected integer");
    return BigInt(std::string(s_.substr(start, i_ - start)));
  }
  bool done() {
    skip();
    return i_ == s_.size();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(i_) + " in '" +
                     std::string(s_) + "'");
  }
  std::size_t pos() const { return i_; }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

// sum := term (('+'|'-') term)* ; term := INT ['*' 'sqrt(' INT ')'] | 'sqrt(' INT ')'
void parse_sum(Scanner& sc, BigInt& a, BigInt& b, unsigned& d) {
  bool first = true;
  for (;;) {
    int sgn = 1;
    if (sc.eat('-')) {
      sgn = -1;
    } else if (!sc.eat('+') && !first) {
      break;
    }
    first = false;
    BigInt coef = 1;
    bool has_coef = false;
    if (sc.peek_digit()) {
      coef = sc.integer();
      has_coef = true;
    }
    bool root = false;
    if (has_coef) {
      if (sc.eat('*')) {
        if (!sc.eat_word("sqrt")) sc.fail("expected sqrt");
        root = true;
      }
    } else if (sc.eat_word("sqrt")) {
      root = true;
    } else {
      sc.fail("expected term");
    }
    if (root) {
      if (!sc.eat('(')) sc.fail("expected '('");
      const BigInt r = sc.integer();
      if (!sc.eat(')')) sc.fail("expected ')'");
      const unsigned rd = static_cast<unsigned>(r.get_ui());
      if (rd != 2 && rd != 3 && rd != 5) sc.fail("radicand must be 2, 3 or 5");
      if (d != 0 && d != rd) sc.fail("mixed radicands");
      d = rd;
      b += sgn * coef;
    } else {
      a += sgn * coef;
    }
  }
}

}  // namespace

QuadElem QuadElem::parse(std::string_view text, unsigned default_d) {
  Scanner sc(text);
  BigInt a = 0, b = 0, q = 1;
  unsigned d = 0;
  if (sc.eat('(')) {
    parse_sum(sc, a, b, d);
    if (!sc.eat(')')) sc.fail("expected ')'");
  } else {
    parse_sum(sc, a, b, d);
  }
  if (sc.eat('/')) {
    q = sc.integer();
    if (q == 0) sc.fail("zero denominator");
  }
  if (!sc.done()) sc.fail("trailing characters");
  if (d == 0) d = default_d;
  if (default_d != 0 && d != default_d) {
    throw ArithmeticError("element uses sqrt(" + std::to_string(d) +
                          ") but sqrt(" + std::to_string(default_d) +
                          ") was expected");
  }
  return QuadElem(a, b, q, d);
}

std::size_t QuadElem::hash() const {
  return (limb_hash(a_) * 0x9e3779b97f4a7c15ull) ^ (limb_hash(b_) * 1315423911u) ^
         limb_hash(q_);
}

std::ostream& operator<<(std::ostream& os, const QuadElem& x) { return os << x.str(); }

QuadElem min(const QuadElem& x, const QuadElem& y) { return (y < x) ? y : x; }
QuadElem max(const QuadElem& x, const QuadElem& y) { return (x < y) ? y : x; }

bool Point::in_unit_square() const {
  return x.sign() >= 0 && y.sign() >= 0 && (x - QuadElem(1, 0)).sign() < 0 &&
         (y - QuadElem(1, 0)).sign() < 0;
}

std::string Point::str() const { return "(" + x.str() + ", " + y.str() + ")"; }

Point Point::parse(std::string_view text, unsigned default_d) {
  // Split "(X, Y)" at the top-level comma.
  std::size_t first = text.find_first_not_of(" \t");
  std::size_t last = text.find_last_not_of(" \t");
  if (first == std::string_view::npos || text[first] != '(' || text[last] != ')') {
    throw ParseError("point must look like (x, y): '" + std::string(text) + "'");
  }
  std::string_view inner = text.substr(first + 1, last - first - 1);
  int depth = 0;
  std::size_t comma = std::string_view::npos;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '(') ++depth;
    if (inner[i] == ')') --depth;
    if (inner[i] == ',' && depth == 0) {
      if (comma != std::string_view::npos) throw ParseError("too many coordinates");
      comma = i;
    }
  }
  if (comma == std::string_view::npos) throw ParseError("missing ',' in point");
  return {QuadElem::parse(inner.substr(0, comma), default_d),
          QuadElem::parse(inner.substr(comma + 1), default_d)};
}

std::size_t Point::hash() const { return x.hash() * 0x100000001b3ull ^ y.hash(); }

std::ostream& operator<<(std::ostream& os, const Point& p) { return os << p.str(); }

}  // namespace qrot

#include "qrot/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace qrot {
namespace {

constexpr __int128 kSafe = static_cast<__int128>(1) << 60;

bool safe(__int128 v) { return v < kSafe && v > -kSafe; }

BigInt to_big(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  BigInt hi(static_cast<unsigned long>(u >> 64));
  BigInt lo(static_cast<unsigned long>(u & 0xffffffffffffffffull));
  BigInt r = (hi << 64) + lo;
  return neg ? BigInt(-r) : r;
}

std::optional<std::int64_t> to_i64(const BigInt& v) {
  if (!mpz_fits_slong_p(v.get_mpz_t())) return std::nullopt;
  const long r = v.get_si();
  if (!safe(r)) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

__int128 isqrt128(__int128 m) {
  auto r = static_cast<__int128>(std::sqrt(static_cast<long double>(m)));
  while (r > 0 && r * r > m) --r;
  while ((r + 1) * (r + 1) <= m) ++r;
  return r;
}

__int128 floor_div128(__int128 n, __int128 den) {
  __int128 q = n / den;
  if ((n % den != 0) && ((n < 0) != (den < 0))) --q;
  return q;
}

LambdaCase make_case(CaseTag tag, QuadElem lam, QuadElem lam_conj, Rational theta) {
  LambdaCase c{tag, std::move(lam), std::move(lam_conj), std::move(theta), 0};
  const Mat2 a = c.matrix();
  Mat2 p = a;
  for (int h = 1; h <= 64; ++h) {
    if (p.is_identity()) {
      c.a_order = h;
      return c;
    }
    p = p * a;
  }
  throw ArithmeticError("matrix A has no finite order");
}

}  // namespace

std::string to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::gamma: return "gamma";
    case CaseTag::neg_inv_gamma: return "neg-inv-gamma";
    case CaseTag::inv_gamma: return "inv-gamma";
    case CaseTag::neg_gamma: return "neg-gamma";
    case CaseTag::sqrt2: return "sqrt2";
    case CaseTag::neg_sqrt2: return "neg-sqrt2";
    case CaseTag::sqrt3: return "sqrt3";
    case CaseTag::neg_sqrt3: return "neg-sqrt3";
  }
  return "?";
}

CaseTag parse_case_tag(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  for (CaseTag t : kAllCases) {
    if (to_string(t) == n) return t;
  }
  throw ParseError("unknown case '" + std::string(name) +
                   "' (expected gamma, neg-inv-gamma, inv-gamma, neg-gamma, sqrt2, "
                   "neg-sqrt2, sqrt3, neg-sqrt3)");
}

Mat2 Mat2::identity(unsigned d) {
  return {QuadElem(1, d), QuadElem(0, d), QuadElem(0, d), QuadElem(1, d)};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

Mat2 Mat2::inverse_unimodular() const {
  const QuadElem det = m11 * m22 - m12 * m21;
  if (det != QuadElem(1, det.d())) throw ArithmeticError("matrix is not unimodular");
  return {m22, -m12, -m21, m11};
}

bool Mat2::is_identity() const {
  return m11 == QuadElem(1, 0) && m12.is_zero() && m21.is_zero() && m22 == QuadElem(1, 0);
}

Point operator*(const Point& p, const Mat2& m) {
  return {p.x * m.m11 + p.y * m.m21, p.x * m.m12 + p.y * m.m22};
}

const LambdaCase& LambdaCase::get(CaseTag tag) {
  static const std::array<LambdaCase, 8> table = [] {
    auto q = [](long a, long b, long den, unsigned d) { return QuadElem(a, b, den, d); };
    return std::array<LambdaCase, 8>{
        make_case(CaseTag::gamma, q(1, 1, 2, 5), q(1, -1, 2, 5), Rational(4, 5)),
        make_case(CaseTag::neg_inv_gamma, q(1, -1, 2, 5), q(1, 1, 2, 5), Rational(2, 5)),
        make_case(CaseTag::inv_gamma, q(-1, 1, 2, 5), q(-1, -1, 2, 5), Rational(3, 5)),
        make_case(CaseTag::neg_gamma, q(-1, -1, 2, 5), q(-1, 1, 2, 5), Rational(1, 5)),
        make_case(CaseTag::sqrt2, q(0, 1, 1, 2), q(0, -1, 1, 2), Rational(3, 4)),
        make_case(CaseTag::neg_sqrt2, q(0, -1, 1, 2), q(0, 1, 1, 2), Rational(1, 4)),
        make_case(CaseTag::sqrt3, q(0, 1, 1, 3), q(0, -1, 1, 3), Rational(5, 6)),
        make_case(CaseTag::neg_sqrt3, q(0, -1, 1, 3), q(0, 1, 1, 3), Rational(1, 6)),
    };
  }();
  return table[static_cast<std::size_t>(tag)];
}

Mat2 LambdaCase::matrix() const {
  const unsigned d = lambda.d();
  return {QuadElem(0, d), QuadElem(-1, d), QuadElem(1, d), -lambda_conj};
}

Point step(const LambdaCase& c, const Point& z) {
  const QuadElem u = z.x + c.lambda_conj * z.y;
  const BigInt k = u.ceil();
  Point r{z.y, QuadElem(k, 0, 1, c.d()) - u};
#ifndef NDEBUG
  // Matrix form must agree with the fractional-part form.
  const Point m = z * c.matrix() + Point{QuadElem(0, c.d()), QuadElem(k, 0, 1, c.d())};
  const QuadElem f = (-z.x - c.lambda_conj * z.y).frac();
  if (!(m == r) || !(f == r.y)) throw ArithmeticError("step forms disagree");
#endif
  return r;
}

Point step_inv(const LambdaCase& c, const Point& z) {
  const QuadElem u = c.lambda_conj * z.x + z.y;
  const BigInt k = u.ceil();
  return {QuadElem(k, 0, 1, c.d()) - u, z.x};
}

Point step_n(const LambdaCase& c, Point z, long k) {
  OrbitCursor cur(c, z);
  for (long i = 0; i < k; ++i) cur.forward();
  for (long i = 0; i > k; --i) cur.backward();
  return cur.point();
}

Mat2 matrix_pow(const LambdaCase& c, long h) {
  Mat2 base = c.matrix();
  if (h < 0) {
    base = base.inverse_unimodular();
    h = -h;
  }
  h %= c.a_order;
  Mat2 r = Mat2::identity(c.d());
  while (h > 0) {
    if (h & 1) r = r * base;
    base = base * base;
    h >>= 1;
  }
  return r;
}

std::pair<BigInt, BigInt> seq_step(const LambdaCase& c, const std::pair<BigInt, BigInt>& ab) {
  const QuadElem lb = c.lambda * QuadElem(ab.second, 0, 1, c.d());
  return {ab.second, BigInt(-ab.first - lb.floor())};
}

Point embed(const LambdaCase& c, const std::pair<BigInt, BigInt>& ab) {
  return {(c.lambda * QuadElem(ab.first, 0, 1, c.d())).frac(),
          (c.lambda * QuadElem(ab.second, 0, 1, c.d())).frac()};
}

BrutePeriod brute_period(const LambdaCase& c, const Point& z, std::uint64_t cap) {
  OrbitCursor cur(c, z);
  const auto start = cur.snapshot();
  for (std::uint64_t i = 1; i <= cap; ++i) {
    cur.forward();
    if (cur.equals(start)) return {BigInt(static_cast<unsigned long>(i))};
  }
  return {};
}

// ---------------------------------------------------------------------------

std::int64_t floor_quad(__int128 n0, __int128 n1, unsigned d, std::int64_t den) {
  if (!safe(n0) || !safe(n1)) throw OverflowError("floor_quad operand out of range");
  __int128 s = 0;
  if (n1 != 0) {
    const __int128 r = isqrt128(n1 * n1 * d);
    s = (n1 > 0) ? r : -r - 1;  // n1^2 d is never a square
  }
  const __int128 f = floor_div128(n0 + s, den);
  return static_cast<std::int64_t>(f);
}

int sign_quad(__int128 n0, __int128 n1, unsigned d) {
  const int s0 = (n0 > 0) - (n0 < 0);
  const int s1 = (n1 > 0) - (n1 < 0);
  if (s1 == 0) return s0;
  if (s0 == 0 || s0 == s1) return s0 == 0 ? s1 : s0;
  if (!safe(n0) || !safe(n1)) return sign_of(to_big(n0), to_big(n1), d);
  const __int128 a2 = n0 * n0;
  const __int128 b2 = n1 * n1 * d;
  if (a2 > b2) return s0;
  if (a2 < b2) return s1;
  return 0;
}

std::optional<FastFrame> FastFrame::for_point(const LambdaCase& c, const Point& z) {
  const QuadElem& lc = c.lambda_conj;
  BigInt den;
  mpz_lcm(den.get_mpz_t(), z.x.q().get_mpz_t(), z.y.q().get_mpz_t());
  den *= lc.q();
  auto den64 = to_i64(den);
  auto lu = to_i64(lc.a());
  auto lv = to_i64(lc.b());
  auto lw = to_i64(lc.q());
  if (!den64 || !lu || !lv || !lw || *den64 > (std::int64_t{1} << 40)) return std::nullopt;
  FastFrame f(c.d(), *den64, *lu, *lv, *lw);
  if (!f.to_fast(z)) return std::nullopt;
  return f;
}

std::optional<FastPoint> FastFrame::to_fast(const Point& z) const {
  if (z.x.d() != 0 && z.x.d() != d_) return std::nullopt;
  if (z.y.d() != 0 && z.y.d() != d_) return std::nullopt;
  const BigInt den(static_cast<long>(den_));
  if (den % z.x.q() != 0 || den % z.y.q() != 0) return std::nullopt;
  const BigInt fx = den / z.x.q();
  const BigInt fy = den / z.y.q();
  auto x0 = to_i64(BigInt(z.x.a() * fx));
  auto x1 = to_i64(BigInt(z.x.b() * fx));
  auto y0 = to_i64(BigInt(z.y.a() * fy));
  auto y1 = to_i64(BigInt(z.y.b() * fy));
  if (!x0 || !x1 || !y0 || !y1) return std::nullopt;
  return FastPoint{*x0, *x1, *y0, *y1};
}

Point FastFrame::to_point(const FastPoint& p) const {
  const BigInt den(static_cast<long>(den_));
  return {QuadElem(BigInt(static_cast<long>(p.x0)), BigInt(static_cast<long>(p.x1)), den, d_),
          QuadElem(BigInt(static_cast<long>(p.y0)), BigInt(static_cast<long>(p.y1)), den, d_)};
}

void FastFrame::mul_conj(std::int64_t n0, std::int64_t n1, __int128& r0, __int128& r1) const {
  r0 = static_cast<__int128>(lu_) * n0 + static_cast<__int128>(lv_) * n1 * d_;
  r1 = static_cast<__int128>(lu_) * n1 + static_cast<__int128>(lv_) * n0;
  if (lw_ != 1) {
    if (r0 % lw_ != 0 || r1 % lw_ != 0) throw OverflowError("inexact frame division");
    r0 /= lw_;
    r1 /= lw_;
  }
}

FastPoint FastFrame::step(const FastPoint& p) const {
  __int128 t0, t1;
  mul_conj(p.y0, p.y1, t0, t1);
  const __int128 u0 = p.x0 + t0;
  const __int128 u1 = p.x1 + t1;
  const __int128 k = -static_cast<__int128>(floor_quad(-u0, -u1, d_, den_));
  const __int128 ny0 = k * den_ - u0;
  const __int128 ny1 = -u1;
  if (!safe(ny0) || !safe(ny1)) throw OverflowError("orbit left the machine-integer range");
  return {p.y0, p.y1, static_cast<std::int64_t>(ny0), static_cast<std::int64_t>(ny1)};
}

FastPoint FastFrame::step_inv(const FastPoint& p) const {
  __int128 t0, t1;
  mul_conj(p.x0, p.x1, t0, t1);
  const __int128 u0 = t0 + p.y0;
  const __int128 u1 = t1 + p.y1;
  const __int128 k = -static_cast<__int128>(floor_quad(-u0, -u1, d_, den_));
  const __int128 nx0 = k * den_ - u0;
  const __int128 nx1 = -u1;
  if (!safe(nx0) || !safe(nx1)) throw OverflowError("orbit left the machine-integer range");
  return {static_cast<std::int64_t>(nx0), static_cast<std::int64_t>(nx1), p.x0, p.x1};
}

// ---------------------------------------------------------------------------

OrbitCursor::OrbitCursor(const LambdaCase& c, const Point& z) : case_(&c), slow_(z) {
  frame_ = FastFrame::for_point(c, z);
  if (frame_) fast_ = frame_->to_fast(z);
}

void OrbitCursor::demote() {
  slow_ = frame_->to_point(*fast_);
  fast_.reset();
}

void OrbitCursor::forward() {
  if (fast_) {
    try {
      fast_ = frame_->step(*fast_);
      return;
    } catch (const OverflowError&) {
      demote();
    }
  }
  slow_ = qrot::step(*case_, slow_);
}

void OrbitCursor::backward() {
  if (fast_) {
    try {
      fast_ = frame_->step_inv(*fast_);
      return;
    } catch (const OverflowError&) {
      demote();
    }
  }
  slow_ = qrot::step_inv(*case_, slow_);
}

Point OrbitCursor::point() const { return fast_ ? frame_->to_point(*fast_) : slow_; }

OrbitCursor::Snapshot OrbitCursor::snapshot() const {
  if (fast_) return {fast_, Point{}};
  return {std::nullopt, slow_};
}

bool OrbitCursor::equals(const Snapshot& s) const {
  if (fast_ && s.fast) return *fast_ == *s.fast;
  const Point mine = point();
  const Point theirs = s.fast ? frame_->to_point(*s.fast) : s.slow;
  return mine == theirs;
}

}  // namespace qrot

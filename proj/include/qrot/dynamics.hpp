#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrot/qfield.hpp"

namespace qrot {

enum class CaseTag {
  gamma,
  neg_inv_gamma,
  inv_gamma,
  neg_gamma,
  sqrt2,
  neg_sqrt2,
  sqrt3,
  neg_sqrt3,
};

inline constexpr std::array<CaseTag, 8> kAllCases = {
    CaseTag::gamma, CaseTag::neg_inv_gamma, CaseTag::inv_gamma,
    CaseTag::neg_gamma, CaseTag::sqrt2, CaseTag::neg_sqrt2,
    CaseTag::sqrt3, CaseTag::neg_sqrt3};

std::string to_string(CaseTag tag);
/// Accepts "gamma", "neg-inv-gamma", ... (underscores also accepted).
CaseTag parse_case_tag(std::string_view name);

/// 2x2 matrix acting on row vectors from the right: (x, y) * M.
struct Mat2 {
  QuadElem m11, m12, m21, m22;

  static Mat2 identity(unsigned d);
  friend Mat2 operator*(const Mat2& a, const Mat2& b);
  friend bool operator==(const Mat2&, const Mat2&) = default;
  /// Inverse of a determinant-one matrix.
  Mat2 inverse_unimodular() const;
  bool is_identity() const;
};

Point operator*(const Point& p, const Mat2& m);

/// One of the eight quadratic parameters.
struct LambdaCase {
  CaseTag tag;
  QuadElem lambda;
  QuadElem lambda_conj;
  Rational theta;  // -lambda = 2 cos(theta * pi)
  int a_order;     // least h >= 1 with A^h = identity

  static const LambdaCase& get(CaseTag tag);
  unsigned d() const { return lambda.d(); }
  /// A = [[0, -1], [1, -lambda']].
  Mat2 matrix() const;
};

/// The torus map T(x, y) = (y, {-x - lambda' y}).
Point step(const LambdaCase& c, const Point& z);
/// T^{-1}(x, y) = (x, y) A^{-1} + (ceil(lambda' x + y), 0).
Point step_inv(const LambdaCase& c, const Point& z);
/// T^k for any integer k.
Point step_n(const LambdaCase& c, Point z, long k);
Mat2 matrix_pow(const LambdaCase& c, long h);

/// (a, b) -> (b, c) with 0 <= a + lambda b + c < 1.
std::pair<BigInt, BigInt> seq_step(const LambdaCase& c, const std::pair<BigInt, BigInt>& ab);
/// (a, b) -> ({lambda a}, {lambda b}).
Point embed(const LambdaCase& c, const std::pair<BigInt, BigInt>& ab);

struct BrutePeriod {
  std::optional<BigInt> period;  // empty when the cap was exceeded
  bool exceeded() const { return !period.has_value(); }
};

/// Minimal period of z under T by first return to z, or cap-exceeded.
BrutePeriod brute_period(const LambdaCase& c, const Point& z, std::uint64_t cap);

class OverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point with coordinates (x0 + x1 sqrt d)/den, (y0 + y1 sqrt d)/den held in
/// machine integers. The denominator is shared by the whole orbit.
struct FastPoint {
  std::int64_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  friend bool operator==(const FastPoint&, const FastPoint&) = default;
};

/// Fixed-denominator arithmetic context for one orbit.
class FastFrame {
 public:
  /// Returns nullopt when the point does not fit the machine-integer range.
  static std::optional<FastFrame> for_point(const LambdaCase& c, const Point& z);

  std::optional<FastPoint> to_fast(const Point& z) const;
  Point to_point(const FastPoint& p) const;

  /// Both throw OverflowError when an intermediate leaves the safe range.
  FastPoint step(const FastPoint& p) const;
  FastPoint step_inv(const FastPoint& p) const;

  unsigned d() const { return d_; }
  std::int64_t den() const { return den_; }

 private:
  FastFrame(unsigned d, std::int64_t den, std::int64_t lu, std::int64_t lv, std::int64_t lw)
      : d_(d), den_(den), lu_(lu), lv_(lv), lw_(lw) {}

  // lambda' * (n0 + n1 sqrt d), exact, as numerators over the same denominator.
  void mul_conj(std::int64_t n0, std::int64_t n1, __int128& r0, __int128& r1) const;

  unsigned d_;
  std::int64_t den_;
  std::int64_t lu_, lv_, lw_;  // lambda' = (lu + lv sqrt d)/lw
};

/// floor((n0 + n1 sqrt d)/den), exact, den > 0.
std::int64_t floor_quad(__int128 n0, __int128 n1, unsigned d, std::int64_t den);
/// Sign of n0 + n1 sqrt d, exact.
int sign_quad(__int128 n0, __int128 n1, unsigned d);

/// A cursor walking the T-orbit of a point. Runs on machine integers while
/// the orbit fits and silently continues in exact big-integer arithmetic
/// otherwise.
class OrbitCursor {
 public:
  OrbitCursor(const LambdaCase& c, const Point& z);

  void forward();
  void backward();
  Point point() const;

  bool is_fast() const { return fast_.has_value(); }
  const FastFrame& frame() const { return *frame_; }
  const FastPoint& fast_point() const { return *fast_; }
  const LambdaCase& lambda_case() const { return *case_; }

  /// Cheap equality against a snapshot taken from the same cursor.
  struct Snapshot {
    std::optional<FastPoint> fast;
    Point slow;
  };
  Snapshot snapshot() const;
  bool equals(const Snapshot& s) const;

 private:
  void demote();

  const LambdaCase* case_;
  std::optional<FastFrame> frame_;
  std::optional<FastPoint> fast_;
  Point slow_;
};

}  // namespace qrot

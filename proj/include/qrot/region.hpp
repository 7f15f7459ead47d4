#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrot/dynamics.hpp"
#include "qrot/qfield.hpp"

namespace qrot {

enum class Rel { lt, le, eq, ge, gt, ne };

std::string_view to_string(Rel r);
bool holds(Rel r, int sign);

/// p*x + q*y REL r.
struct HalfPlane {
  QuadElem p, q, r;
  Rel rel = Rel::lt;

  bool contains(const Point& z) const;
  /// Same constraint expressed on z where the original was on
  /// w = scale * (z - shift).
  HalfPlane pulled_back(const QuadElem& scale, const Point& shift) const;
  std::string str() const;
};

/// A half-plane with all coefficients multiplied by a positive integer so
/// that they lie in Z[sqrt d]; evaluated on FastPoint numerators.
struct CompiledHalfPlane {
  std::int64_t p0, p1, q0, q1, r0, r1;
  Rel rel;
  bool contains(const FastPoint& z, std::int64_t den, unsigned d) const;
};

/// Conjunction of constraints; the empty conjunction is everything.
struct Polytope {
  std::vector<HalfPlane> constraints;

  bool contains(const Point& z) const;
  Polytope pulled_back(const QuadElem& scale, const Point& shift) const;
};

/// Conjunction of both constraint lists.
Polytope intersect(const Polytope& a, const Polytope& b);

struct Box {
  double x0, x1, y0, y1;
};

/// Floating-point bounding box of the polytope within the unit square, for
/// choosing sample windows only. Empty when no vertex survives.
std::optional<Box> bounding_box(const Polytope& p);

/// Union of polytopes minus a union of polytopes.
class Region {
 public:
  void include(Polytope p);
  void exclude(Polytope p);

  bool contains(const Point& z) const;
  /// Fast path; falls back to exact arithmetic when numbers are large.
  bool contains(const FastPoint& z, const FastFrame& frame) const;

  const std::vector<Polytope>& included() const { return include_; }
  const std::vector<Polytope>& excluded() const { return exclude_; }
  bool empty() const { return include_.empty(); }

 private:
  struct CompiledPolytope {
    std::vector<CompiledHalfPlane> constraints;
    bool ok = true;  // false when coefficients did not fit machine integers
  };
  static CompiledPolytope compile(const Polytope& p);
  static bool contains(const CompiledPolytope& cp, const Polytope& p, const FastPoint& z,
                       const FastFrame& frame);

  std::vector<Polytope> include_;
  std::vector<Polytope> exclude_;
  std::vector<CompiledPolytope> include_c_;
  std::vector<CompiledPolytope> exclude_c_;
};

/// Linear form cx*x + cy*y + c0 produced by the expression parser.
struct LinearForm {
  QuadElem cx, cy, c0;
  bool is_constant() const { return cx.is_zero() && cy.is_zero(); }
};

/// Expressions over integers, x, y, sqrt2, sqrt3, sqrt5, sqrt(n), gamma
/// (the golden mean), + - * / ^ and parentheses. Products and quotients
/// must keep the form linear in x and y.
LinearForm parse_linear(std::string_view text, unsigned d);
QuadElem parse_constant(std::string_view text, unsigned d);
/// "(expr, expr)" with constant coordinates.
Point parse_point_expr(std::string_view text, unsigned d);
/// Comma-separated comparisons; chains such as "a < b <= c" are allowed.
Polytope parse_constraints(std::string_view text, unsigned d);

}  // namespace qrot

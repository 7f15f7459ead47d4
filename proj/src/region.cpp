#include "qrot/region.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>

namespace qrot {

std::string_view to_string(Rel r) {
  switch (r) {
    case Rel::lt: return "<";
    case Rel::le: return "<=";
    case Rel::eq: return "=";
    case Rel::ge: return ">=";
    case Rel::gt: return ">";
    case Rel::ne: return "!=";
  }
  return "?";
}

bool holds(Rel r, int s) {
  switch (r) {
    case Rel::lt: return s < 0;
    case Rel::le: return s <= 0;
    case Rel::eq: return s == 0;
    case Rel::ge: return s >= 0;
    case Rel::gt: return s > 0;
    case Rel::ne: return s != 0;
  }
  return false;
}

bool HalfPlane::contains(const Point& z) const {
  return holds(rel, (p * z.x + q * z.y - r).sign());
}

HalfPlane HalfPlane::pulled_back(const QuadElem& scale, const Point& shift) const {
  // p*s*(x - vx) + q*s*(y - vy) REL r
  HalfPlane h;
  h.p = p * scale;
  h.q = q * scale;
  h.r = r + h.p * shift.x + h.q * shift.y;
  h.rel = rel;
  return h;
}

std::string HalfPlane::str() const {
  std::ostringstream os;
  os << p.str() << "*x + " << q.str() << "*y " << to_string(rel) << ' ' << r.str();
  return os.str();
}

bool CompiledHalfPlane::contains(const FastPoint& z, std::int64_t den, unsigned d) const {
  using I = __int128;
  const I n0 = I{p0} * z.x0 + I{p1} * z.x1 * d + I{q0} * z.y0 + I{q1} * z.y1 * d - I{r0} * den;
  const I n1 = I{p0} * z.x1 + I{p1} * z.x0 + I{q0} * z.y1 + I{q1} * z.y0 - I{r1} * den;
  return holds(rel, sign_quad(n0, n1, d));
}

bool Polytope::contains(const Point& z) const {
  for (const auto& h : constraints)
    if (!h.contains(z)) return false;
  return true;
}

Polytope Polytope::pulled_back(const QuadElem& scale, const Point& shift) const {
  Polytope out;
  for (const auto& h : constraints) out.constraints.push_back(h.pulled_back(scale, shift));
  return out;
}

Polytope intersect(const Polytope& a, const Polytope& b) {
  Polytope out = a;
  out.constraints.insert(out.constraints.end(), b.constraints.begin(), b.constraints.end());
  return out;
}

std::optional<Box> bounding_box(const Polytope& poly) {
  struct Line {
    double p, q, r;
  };
  std::vector<Line> lines = {{1, 0, 0}, {1, 0, 1}, {0, 1, 0}, {0, 1, 1}};
  for (const auto& h : poly.constraints) lines.push_back({h.p.to_double(), h.q.to_double(), h.r.to_double()});
  constexpr double tol = 1e-9;
  auto inside = [&](double x, double y) {
    if (x < -tol || x > 1 + tol || y < -tol || y > 1 + tol) return false;
    for (const auto& h : poly.constraints) {
      const double v = h.p.to_double() * x + h.q.to_double() * y - h.r.to_double();
      const double scale = 1 + std::abs(h.p.to_double()) + std::abs(h.q.to_double());
      const double t = tol * scale;
      switch (h.rel) {
        case Rel::lt: case Rel::le: if (v > t) return false; break;
        case Rel::gt: case Rel::ge: if (v < -t) return false; break;
        case Rel::eq: if (std::abs(v) > t) return false; break;
        case Rel::ne: break;
      }
    }
    return true;
  };
  std::optional<Box> box;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double det = lines[i].p * lines[j].q - lines[i].q * lines[j].p;
      if (std::abs(det) < 1e-15) continue;
      const double x = (lines[i].r * lines[j].q - lines[i].q * lines[j].r) / det;
      const double y = (lines[i].p * lines[j].r - lines[i].r * lines[j].p) / det;
      if (!inside(x, y)) continue;
      if (!box) box = Box{x, x, y, y};
      box->x0 = std::min(box->x0, x);
      box->x1 = std::max(box->x1, x);
      box->y0 = std::min(box->y0, y);
      box->y1 = std::max(box->y1, y);
    }
  return box;
}

void Region::include(Polytope p) {
  include_c_.push_back(compile(p));
  include_.push_back(std::move(p));
}

void Region::exclude(Polytope p) {
  exclude_c_.push_back(compile(p));
  exclude_.push_back(std::move(p));
}

bool Region::contains(const Point& z) const {
  bool in = false;
  for (const auto& p : include_)
    if (p.contains(z)) {
      in = true;
      break;
    }
  if (!in) return false;
  for (const auto& p : exclude_)
    if (p.contains(z)) return false;
  return true;
}

bool Region::contains(const FastPoint& z, const FastFrame& frame) const {
  bool in = false;
  for (std::size_t i = 0; i < include_.size(); ++i)
    if (contains(include_c_[i], include_[i], z, frame)) {
      in = true;
      break;
    }
  if (!in) return false;
  for (std::size_t i = 0; i < exclude_.size(); ++i)
    if (contains(exclude_c_[i], exclude_[i], z, frame)) return false;
  return true;
}

bool Region::contains(const CompiledPolytope& cp, const Polytope& p, const FastPoint& z,
                      const FastFrame& frame) {
  if (!cp.ok) return p.contains(frame.to_point(z));
  for (const auto& h : cp.constraints)
    if (!h.contains(z, frame.den(), frame.d())) return false;
  return true;
}

namespace {

constexpr long kCoeffLimit = 1L << 30;

std::optional<std::int64_t> small(const BigInt& v) {
  if (abs(v) >= kCoeffLimit) return std::nullopt;
  return v.get_si();
}

}  // namespace

Region::CompiledPolytope Region::compile(const Polytope& poly) {
  CompiledPolytope cp;
  for (const auto& h : poly.constraints) {
    BigInt l = 1;
    for (const QuadElem* e : {&h.p, &h.q, &h.r}) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e->q().get_mpz_t());
    auto scaled = [&](const QuadElem& e, std::int64_t& c0, std::int64_t& c1) {
      const BigInt f = l / e.q();
      auto a = small(e.a() * f);
      auto b = small(e.b() * f);
      if (!a || !b) return false;
      c0 = *a;
      c1 = *b;
      return true;
    };
    CompiledHalfPlane c{};
    c.rel = h.rel;
    if (!scaled(h.p, c.p0, c.p1) || !scaled(h.q, c.q0, c.q1) || !scaled(h.r, c.r0, c.r1)) {
      cp.ok = false;
      cp.constraints.clear();
      return cp;
    }
    cp.constraints.push_back(c);
  }
  return cp;
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, unsigned d) : s_(text), d_(d) {}

  LinearForm expr() {
    LinearForm acc = term();
    for (;;) {
      skip();
      if (eat('+')) {
        acc = add(acc, term(), 1);
      } else if (eat('-')) {
        acc = add(acc, term(), -1);
      } else {
        return acc;
      }
    }
  }

  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  bool done() {
    skip();
    return i_ == s_.size();
  }

  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  LinearForm constant(const QuadElem& v) { return {QuadElem(0, d_), QuadElem(0, d_), v}; }

  static LinearForm add(const LinearForm& a, const LinearForm& b, int sign) {
    if (sign > 0) return {a.cx + b.cx, a.cy + b.cy, a.c0 + b.c0};
    return {a.cx - b.cx, a.cy - b.cy, a.c0 - b.c0};
  }

  LinearForm scale(const LinearForm& a, const QuadElem& s) { return {a.cx * s, a.cy * s, a.c0 * s}; }

  LinearForm term() {
    LinearForm acc = unary();
    for (;;) {
      if (eat('*')) {
        LinearForm r = unary();
        if (r.is_constant()) {
          acc = scale(acc, r.c0);
        } else if (acc.is_constant()) {
          acc = scale(r, acc.c0);
        } else {
          fail("nonlinear product");
        }
      } else if (eat('/')) {
        LinearForm r = unary();
        if (!r.is_constant()) fail("division by a variable");
        if (r.c0.is_zero()) fail("division by zero");
        acc = scale(acc, QuadElem(1, d_) / r.c0);
      } else {
        return acc;
      }
    }
  }

  LinearForm unary() {
    if (eat('-')) return scale(unary(), QuadElem(-1, d_));
    if (eat('+')) return unary();
    return power();
  }

  LinearForm power() {
    LinearForm base = primary();
    if (eat('^')) {
      bool neg = eat('-');
      long n = integer();
      if (!base.is_constant()) fail("power of a variable");
      QuadElem r(1, d_);
      for (long k = 0; k < n; ++k) r *= base.c0;
      if (neg) r = QuadElem(1, d_) / r;
      return constant(r);
    }
    return base;
  }

  long integer() {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    if (j == i_) fail("expected integer");
    long v = std::stol(std::string(s_.substr(i_, j - i_)));
    i_ = j;
    return v;
  }

  QuadElem root(long n) {
    if (n == 0 || n == 1 || n == 4) return QuadElem(n == 4 ? 2 : n, d_);
    if (static_cast<unsigned>(n) != d_) fail("sqrt(" + std::to_string(n) + ") outside the field");
    return QuadElem::sqrt(d_);
  }

  LinearForm primary() {
    skip();
    if (eat('(')) {
      LinearForm e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) return constant(QuadElem(integer(), d_));
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j]))) ++j;
      std::string id(s_.substr(i_, j - i_));
      i_ = j;
      if (id == "x") return {QuadElem(1, d_), QuadElem(0, d_), QuadElem(0, d_)};
      if (id == "y") return {QuadElem(0, d_), QuadElem(1, d_), QuadElem(0, d_)};
      if (id == "gamma") {
        if (d_ != 5) fail("gamma outside Q(sqrt 5)");
        return constant(QuadElem(1, 1, 2, 5));
      }
      if (id == "sqrt") {
        if (!eat('(')) fail("expected '(' after sqrt");
        long n = integer();
        if (!eat(')')) fail("expected ')'");
        return constant(root(n));
      }
      if (id.rfind("sqrt", 0) == 0 && id.size() > 4) return constant(root(std::stol(id.substr(4))));
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }

  std::string_view s_;
  unsigned d_;
  std::size_t i_ = 0;
};

}  // namespace

LinearForm parse_linear(std::string_view text, unsigned d) {
  ExprParser p(text, d);
  LinearForm f = p.expr();
  if (!p.done()) p.fail("trailing input");
  return f;
}

QuadElem parse_constant(std::string_view text, unsigned d) {
  LinearForm f = parse_linear(text, d);
  if (!f.is_constant()) throw ParseError("expected a constant: '" + std::string(text) + "'");
  return f.c0;
}

namespace {

// Splits at top-level occurrences of sep.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits "a < b <= c" into operands and relations.
void split_chain(std::string_view s, std::vector<std::string_view>& operands, std::vector<Rel>& rels) {
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth != 0) continue;
    std::optional<Rel> r;
    std::size_t len = 1;
    char n = i + 1 < s.size() ? s[i + 1] : '\0';
    if (c == '<') r = n == '=' ? Rel::le : Rel::lt;
    else if (c == '>') r = n == '=' ? Rel::ge : Rel::gt;
    else if (c == '!' && n == '=') r = Rel::ne;
    else if (c == '=') r = Rel::eq;
    if (!r) continue;
    if ((c == '<' || c == '>' || c == '!') && n == '=') len = 2;
    else if (c == '=' && n == '=') len = 2;
    operands.push_back(s.substr(start, i - start));
    rels.push_back(*r);
    i += len - 1;
    start = i + 1;
  }
  operands.push_back(s.substr(start));
}

}  // namespace

Point parse_point_expr(std::string_view text, unsigned d) {
  std::string_view s = trim(text);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw ParseError("expected '(x, y)': '" + std::string(text) + "'");
  auto parts = split_top(s.substr(1, s.size() - 2), ',');
  if (parts.size() != 2) throw ParseError("expected two coordinates: '" + std::string(text) + "'");
  return {parse_constant(parts[0], d), parse_constant(parts[1], d)};
}

Polytope parse_constraints(std::string_view text, unsigned d) {
  Polytope poly;
  for (std::string_view part : split_top(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    std::vector<std::string_view> operands;
    std::vector<Rel> rels;
    split_chain(part, operands, rels);
    if (rels.empty()) throw ParseError("constraint without relation: '" + std::string(part) + "'");
    std::vector<LinearForm> forms;
    for (auto o : operands) forms.push_back(parse_linear(o, d));
    for (std::size_t k = 0; k < rels.size(); ++k) {
      // lhs REL rhs  ->  (lhs - rhs) REL 0  ->  p x + q y REL r
      const LinearForm& l = forms[k];
      const LinearForm& r = forms[k + 1];
      poly.constraints.push_back({l.cx - r.cx, l.cy - r.cy, r.c0 - l.c0, rels[k]});
    }
  }
  return poly;
}

}  // namespace qrot

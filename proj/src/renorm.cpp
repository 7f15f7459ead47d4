#include "qrot/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

namespace qrot {

namespace {

// Walks the T-orbit of a point one first return at a time.
class ReturnWalker {
 public:
  ReturnWalker(const CaseData& cd, const Point& z)
      : cd_(&cd), cur_(cd.lambda_case(), z), budget_(4 * cd.max_return() + 1000) {}

  long forward() { return walk(true); }
  long backward() { return -walk(false); }

  Point point() const { return cur_.point(); }

  bool in(const Region& r) const {
    return cur_.is_fast() ? r.contains(cur_.fast_point(), cur_.frame()) : r.contains(cur_.point());
  }

  const Cell* cell(const Renormalization& lv) const {
    return cur_.is_fast() ? lv.cell_of(cur_.fast_point(), cur_.frame()) : lv.cell_of(cur_.point());
  }

  OrbitCursor::Snapshot snapshot() const { return cur_.snapshot(); }
  bool equals(const OrbitCursor::Snapshot& s) const { return cur_.equals(s); }

 private:
  bool in_D() const {
    return cur_.is_fast() ? cd_->in_domain(cur_.fast_point(), cur_.frame()).has_value()
                          : cd_->in_union(cur_.point());
  }

  long walk(bool fwd) {
    for (long k = 1; k <= budget_; ++k) {
      fwd ? cur_.forward() : cur_.backward();
      if (in_D()) return k;
    }
    throw BudgetError("first return exceeded " + std::to_string(budget_) + " steps");
  }

  const CaseData* cd_;
  OrbitCursor cur_;
  long budget_;
};

const Renormalization& level_of(const Domain& dom, Level level) {
  if (level == Level::refined) {
    if (!dom.refined) throw std::domain_error("domain '" + dom.name + "' has no refined scaling");
    return *dom.refined;
  }
  return dom.main;
}

int require_domain(const CaseData& cd, const Point& z) {
  auto id = cd.in_domain(z);
  if (!id) throw std::domain_error("point is not in the inducing domain: " + z.str());
  return *id;
}

Letter main_cell(const CaseData& cd, const Point& z) {
  const int id = require_domain(cd, z);
  const Cell* c = cd.domain(id).main.cell_of(z);
  if (!c) throw std::domain_error("point lies in no cell: " + z.str());
  return c->label;
}

long mod(long a, long m) { return ((a % m) + m) % m; }

}  // namespace

ReturnStep first_return(const CaseData& cd, const Point& z) {
  const Letter cell = main_cell(cd, z);
  ReturnWalker w(cd, z);
  const long steps = w.forward();
  return {w.point(), steps, cell};
}

ReturnStep first_return_inv(const CaseData& cd, const Point& z) {
  const Letter cell = main_cell(cd, z);
  ReturnWalker w(cd, z);
  const long steps = w.backward();
  return {w.point(), steps, cell};
}

PMembership p_membership(const CaseData& cd, int domain, const Point& z, Level level) {
  const Domain& dom = cd.domain(domain);
  const Renormalization& lv = level_of(dom, level);
  if (!dom.contains(z)) throw std::domain_error("point is not in domain '" + dom.name + "'");
  const long bound = static_cast<long>(lv.search_bound());
  PMembership pm;

  // Nearest forward hit (m >= 0) and nearest backward hit (m < 0).
  Point fwd_point, bwd_point;
  long fwd_steps = 0, bwd_steps = 0;
  {
    ReturnWalker w(cd, z);
    long steps = 0;
    for (long m = 0; m < bound; ++m) {
      if (m > 0) steps += w.forward();
      if (w.in(lv.scaled_domain)) {
        pm.forward = m;
        fwd_point = w.point();
        fwd_steps = steps;
        break;
      }
    }
  }
  if (!pm.forward || *pm.forward > 0) {
    ReturnWalker w(cd, z);
    long steps = 0;
    for (long m = 1; m < bound; ++m) {
      steps += w.backward();
      if (w.in(lv.scaled_domain)) {
        pm.backward = -m;
        bwd_point = w.point();
        bwd_steps = steps;
        break;
      }
    }
  }

  if (!pm.forward && !pm.backward) {
    pm.in_P = true;
    ReturnWalker w(cd, z);
    const auto start = w.snapshot();
    pm.cycle_steps = 0;
    const long max_cycle = 10'000'000 / (cd.max_return() + 1) + 1000;
    for (long k = 0;; ++k) {
      if (k > max_cycle) throw BudgetError("T-hat cycle of a P-point is too long: " + z.str());
      const Cell* c = w.cell(dom.main);
      if (!c) throw std::domain_error("orbit point lies in no cell");
      pm.cycle_word.push_back(c->label);
      pm.cycle_steps += w.forward();
      if (w.equals(start)) break;
    }
    return pm;
  }

  bool use_forward;
  if (!pm.backward) {
    use_forward = true;
  } else if (!pm.forward) {
    use_forward = false;
  } else if (*pm.forward == 0) {
    use_forward = true;
  } else {
    use_forward = lv.policy == ShatPolicy::forward || *pm.forward <= -*pm.backward;
    // Position of z on the scaled path it belongs to.
    const bool eps_pos = dom.epsilon == 1;
    const Point& origin = eps_pos ? bwd_point : fwd_point;
    const long position = eps_pos ? -*pm.backward : *pm.forward;
    const Point pre = lv.scaling.U_inv(origin);
    if (const Cell* c = lv.cell_of(pre)) {
      for (const auto& r : lv.rules)
        if (r.letter == c->label && r.position == position) use_forward = r.direction == ShatDirection::forward;
    }
  }
  if (use_forward) {
    pm.s_hat = *pm.forward;
    pm.s_T = fwd_steps;
    pm.hit = fwd_point;
  } else {
    pm.s_hat = *pm.backward;
    pm.s_T = bwd_steps;
    pm.hit = bwd_point;
  }
  return pm;
}

namespace {

SRecord make_record(const CaseData& cd, const Renormalization& lv, const Point& z, const PMembership& pm) {
  SRecord r;
  r.z = z;
  r.s_hat = pm.s_hat;
  r.s_T = pm.s_T;
  r.next = lv.scaling.U_inv(pm.hit);
  const Mat2 a = matrix_pow(cd.lambda_case(), pm.s_T);
  r.t = lv.scaling.V(pm.hit) - lv.scaling.V(z) * a;
  return r;
}

}  // namespace

SRecord s_map(const CaseData& cd, int domain, const Point& z, Level level) {
  const PMembership pm = p_membership(cd, domain, z, level);
  if (pm.in_P) throw std::domain_error("S is undefined on P: " + z.str());
  return make_record(cd, level_of(cd.domain(domain), level), z, pm);
}

std::vector<SRecord> Verdict::cycle() const {
  if (periodic()) return {};
  return {s_trajectory.begin() + s_cycle_start, s_trajectory.begin() + s_cycle_start + s_cycle_len};
}

Verdict decide(const CaseData& cd, const Point& z, const DecideOptions& opts) {
  if (!z.in_unit_square()) throw std::domain_error("point is not in the unit square: " + z.str());
  Verdict v;
  const RMembership r = r_membership(cd, z);
  v.r_steps = r.steps;
  if (r.in_R) {
    v.in_R = true;
    v.kind = VerdictKind::periodic;
    v.period = r.steps;
    return v;
  }
  const int domain = require_domain(cd, r.landing);
  v.domain = domain;
  const Domain& dom = cd.domain(domain);
  const Renormalization& lv = level_of(dom, opts.level);

  std::map<Point, long> seen;
  Point cur = r.landing;
  for (std::size_t n = 0; n <= opts.max_s_steps; ++n) {
    if (auto it = seen.find(cur); it != seen.end()) {
      v.kind = VerdictKind::aperiodic;
      v.s_cycle_start = it->second;
      v.s_cycle_len = static_cast<long>(n) - it->second;
      return v;
    }
    seen.emplace(cur, static_cast<long>(n));
    const PMembership pm = p_membership(cd, domain, cur, opts.level);
    if (pm.in_P) {
      v.kind = VerdictKind::periodic;
      v.p_hit = PHit{static_cast<long>(n), cur, domain, pm.cycle_word, pm.cycle_steps};
      try {
        v.period = exact_period(cd, v);
      } catch (const std::domain_error&) {
        v.period.reset();
      }
      return v;
    }
    SRecord rec = make_record(cd, lv, cur, pm);
    cur = rec.next;
    v.s_trajectory.push_back(std::move(rec));
  }
  throw BudgetError("S-orbit did not recur within " + std::to_string(opts.max_s_steps) + " steps");
}

BigInt exact_period(const CaseData& cd, const Verdict& v) {
  if (v.in_R) return v.r_steps;
  if (!v.p_hit) throw std::domain_error("verdict is not periodic through P");
  const PHit& h = *v.p_hit;
  if (h.level == 0) return h.cycle_steps;
  const Domain& dom = cd.domain(h.domain);
  if (!dom.main.sigma || !dom.main.sigma->is_endomorphism())
    throw std::domain_error("no substitution on the domain alphabet");
  // Reversal (sigma sigma-bar alternation) does not change letter counts.
  return dom.main.sigma->tau_length(h.word, static_cast<unsigned long>(h.level), dom.tau_weights());
}

KappaDigits kappa_digits(const CaseData& cd, const Point& z, std::size_t n, Level level) {
  DecideOptions opts;
  opts.level = level;
  const Verdict v = decide(cd, z, opts);
  if (v.periodic()) throw std::domain_error("kappa digits need an aperiodic point");
  const Renormalization& lv = level_of(cd.domain(v.domain), level);
  const LambdaCase& lc = cd.lambda_case();
  const unsigned d = lc.d();
  const Point z0 = v.s_trajectory.front().z;

  auto record = [&](std::size_t k) -> const SRecord& {
    if (k < v.s_trajectory.size()) return v.s_trajectory[k];
    const auto start = static_cast<std::size_t>(v.s_cycle_start);
    return v.s_trajectory[start + (k - start) % static_cast<std::size_t>(v.s_cycle_len)];
  };

  KappaDigits out;
  long s_sum = 0;
  QuadElem kp(1, d);
  Point acc{QuadElem(0, d), QuadElem(0, d)};
  for (std::size_t k = 0; k < n; ++k) {
    const SRecord& r = record(k);
    s_sum = mod(s_sum + r.s_T, lc.a_order);
    const Point digit = -(r.t * matrix_pow(lc, -s_sum));
    out.digits.push_back(digit);
    acc = acc + kp * digit;
    kp *= lv.scaling.kappa;
  }
  const Point vz = lv.scaling.V(z0);
  out.residual = vz - acc;

  // |V(w) A^h|_inf <= |V(w)|_inf * max_h (max column sum of |A^h|).
  QuadElem col(0, d);
  for (int h = 0; h < lc.a_order; ++h) {
    const Mat2 m = matrix_pow(lc, h);
    col = max(col, max(m.m11.abs() + m.m21.abs(), m.m12.abs() + m.m22.abs()));
  }
  QuadElem vmax(0, d);
  for (const auto& r : v.s_trajectory) vmax = max(vmax, lv.scaling.V(r.z).sup_norm());
  out.residual_bound = kp * vmax * col;
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

QuadElem rational(long num, long den, unsigned d) { return QuadElem::rational(Rational(num, den), d); }

long pick(std::mt19937_64& rng, double lo, double hi, long den) {
  long a = static_cast<long>(std::ceil(lo * static_cast<double>(den)));
  long b = static_cast<long>(std::floor(hi * static_cast<double>(den)));
  if (b < a) b = a;
  return a + static_cast<long>(rng() % static_cast<std::uint64_t>(b - a + 1));
}

long denominator_for(double width) {
  long den = 997;
  while (static_cast<double>(den) * width < 500 && den < (1L << 34)) den *= 4;
  return den;
}

void sample_polytope(const Polytope& poly, const std::function<bool(const Point&)>& accept, unsigned d,
                     std::size_t count, std::mt19937_64& rng, std::vector<Point>& out) {
  auto box = bounding_box(poly);
  if (!box) return;
  std::vector<const HalfPlane*> eqs;
  for (const auto& h : poly.constraints)
    if (h.rel == Rel::eq) eqs.push_back(&h);

  if (eqs.size() >= 2) {
    const HalfPlane& a = *eqs[0];
    const HalfPlane& b = *eqs[1];
    const QuadElem det = a.p * b.q - a.q * b.p;
    if (det.is_zero()) return;
    Point z{(a.r * b.q - a.q * b.r) / det, (a.p * b.r - a.r * b.p) / det};
    if (accept(z)) out.push_back(z);
    return;
  }
  const std::size_t start = out.size();
  for (std::size_t tries = 0; tries < 200 * count + 1000 && out.size() - start < count; ++tries) {
    Point z;
    if (eqs.size() == 1) {
      const HalfPlane& h = *eqs[0];
      if (std::abs(h.q.to_double()) >= std::abs(h.p.to_double())) {
        const long den = denominator_for(box->x1 - box->x0);
        z.x = rational(pick(rng, box->x0, box->x1, den), den, d);
        z.y = (h.r - h.p * z.x) / h.q;
      } else {
        const long den = denominator_for(box->y1 - box->y0);
        z.y = rational(pick(rng, box->y0, box->y1, den), den, d);
        z.x = (h.r - h.q * z.y) / h.p;
      }
    } else {
      const long den = denominator_for(std::min(box->x1 - box->x0, box->y1 - box->y0));
      z.x = rational(pick(rng, box->x0, box->x1, den), den, d);
      z.y = rational(pick(rng, box->y0, box->y1, den), den, d);
    }
    if (accept(z)) out.push_back(z);
  }
}

}  // namespace

std::vector<Point> sample_region(const Region& r, unsigned d, std::size_t count, std::uint64_t seed,
                                 long /*den*/) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  auto accept = [&](const Point& z) { return z.in_unit_square() && r.contains(z); };
  for (const auto& p : r.included()) {
    sample_polytope(p, accept, d, count, rng, out);
    if (out.size() >= count) break;
  }
  if (out.size() > count) out.resize(count);
  return out;
}

std::vector<Point> sample_cell(const Cell& c, const Domain& dom, unsigned d, std::size_t count,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  auto accept = [&](const Point& z) { return z.in_unit_square() && c.region.contains(z) && dom.region.contains(z); };
  std::vector<Polytope> pieces;
  for (const auto& p : c.region.included()) {
    if (dom.region.included().empty()) pieces.push_back(p);
    for (const auto& q : dom.region.included()) pieces.push_back(intersect(p, q));
  }
  if (pieces.empty()) return out;
  const std::size_t per = (count + pieces.size() - 1) / pieces.size();
  for (const auto& p : pieces) sample_polytope(p, accept, d, per, rng, out);
  // Top up from the larger pieces when small ones fall short.
  auto dedupe = [&] {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  };
  dedupe();
  for (int round = 0; round < 4 && out.size() < count; ++round) {
    for (const auto& p : pieces) {
      if (out.size() >= count) break;
      sample_polytope(p, accept, d, count - out.size(), rng, out);
    }
    dedupe();
  }
  std::shuffle(out.begin(), out.end(), rng);
  if (out.size() > count) out.resize(count);
  return out;
}

// ---------------------------------------------------------------------------

SubstitutionReport verify_substitution_conditions(const CaseData& cd, int domain, std::size_t samples,
                                                  Level level, std::uint64_t seed) {
  const Domain& dom = cd.domain(domain);
  const Renormalization& lv = level_of(dom, level);
  SubstitutionReport rep;
  if (!lv.sigma) {
    rep.violations.push_back("no substitution");
    return rep;
  }
  const unsigned d = cd.lambda_case().d();
  const Alphabet& coding = lv.sigma->target();
  for (std::size_t ci = 0; ci < lv.cells.size(); ++ci) {
    const Cell& cell = lv.cells[ci];
    const std::string name = lv.alphabet->name(cell.label);
    const Word& image = lv.sigma->image(cell.label);
    const auto pts = sample_cell(cell, dom, d, samples, seed + ci);
    if (pts.empty()) {
      rep.violations.push_back("cell " + name + ": no sample points");
      continue;
    }
    for (const Point& z : pts) {
      ++rep.samples;
      auto fail = [&](const std::string& what) {
        rep.violations.push_back("cell " + name + " at " + z.str() + ": " + what);
      };
      try {
        const Point target = lv.scaling.U(first_return(cd, z).point);
        const Point uz = lv.scaling.U(z);
        ReturnWalker w(cd, uz);
        Word seen;
        const long len = static_cast<long>(image.size());
        bool ok = true;
        for (long k = 0; k < len && ok; ++k) {
          if (dom.epsilon == 1) {
            if (k > 0 && w.in(lv.scaled_domain)) {
              fail("path re-enters U(D) after " + std::to_string(k) + " returns");
              ok = false;
            }
            const Cell* c = w.cell(dom.main);
            seen.push_back(c ? c->label : -1);
            w.forward();
          } else {
            w.backward();
            if (k + 1 < len && w.in(lv.scaled_domain)) {
              fail("path re-enters U(D) after " + std::to_string(k + 1) + " returns");
              ok = false;
            }
            const Cell* c = w.cell(dom.main);
            seen.push_back(c ? c->label : -1);
          }
        }
        if (!ok) continue;
        if (dom.epsilon == -1) std::reverse(seen.begin(), seen.end());
        if (seen != image) {
          std::string got;
          for (Letter l : seen) got += l < 0 ? "?" : coding.name(l);
          fail("coding " + got + " != " + coding.format(image));
          continue;
        }
        if (lv.commutes(cell.label) && !(w.point() == target)) fail("U T-hat(z) is not T-hat^{eps|sigma|} U(z)");
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
  }
  return rep;
}

}  // namespace qrot

#include "qrot/cases.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qrot {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_case_files();
}

Point ScalingMap::V(const Point& z) const { return factor * (z - v); }

Point ScalingMap::V_inv(const Point& w) const {
  const QuadElem inv = QuadElem(1, factor.d()) / factor;
  return v + inv * w;
}

Point ScalingMap::U(const Point& z) const { return v + kappa * (z - v); }

Point ScalingMap::U_inv(const Point& z) const {
  return v + (QuadElem(1, kappa.d()) / kappa) * (z - v);
}

Polytope ScalingMap::from_frame(const Polytope& p) const { return p.pulled_back(factor, v); }

Polytope ScalingMap::scaled(const Polytope& p) const {
  const QuadElem one(1, kappa.d());
  return p.pulled_back(one / kappa, (one - kappa) * v);
}

const Cell* Renormalization::cell_of(const Point& z) const {
  for (const auto& c : cells)
    if (c.region.contains(z)) return &c;
  return nullptr;
}

const Cell* Renormalization::cell_of(const FastPoint& z, const FastFrame& f) const {
  for (const auto& c : cells)
    if (c.region.contains(z, f)) return &c;
  return nullptr;
}

bool Renormalization::commutes(Letter l) const {
  return commuting.empty() || std::find(commuting.begin(), commuting.end(), l) != commuting.end();
}

std::size_t Renormalization::search_bound() const { return sigma ? sigma->max_image_length() : 1; }

bool Domain::contains(const Point& z) const { return z.in_unit_square() && region.contains(z); }

std::vector<BigInt> Domain::tau_weights() const {
  std::vector<BigInt> w(main.alphabet->size(), 0);
  std::vector<bool> seen(w.size(), false);
  for (const auto& c : main.cells) {
    if (c.taus.size() != 1) throw std::domain_error("return time of cell '" + main.alphabet->name(c.label) + "' is not constant");
    auto i = static_cast<std::size_t>(c.label);
    if (seen[i] && w[i] != c.taus[0]) throw std::domain_error("inconsistent return times");
    w[i] = c.taus[0];
    seen[i] = true;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Period formulas

namespace {

class FormulaEval {
 public:
  FormulaEval(std::string_view s, long n, bool* uses_n) : s_(s), n_(n), uses_n_(uses_n) {}

  Rational run() {
    Rational v = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("period formula '" + std::string(s_) + "': " + what);
  }
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
  Rational expr() {
    Rational v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  Rational term() {
    Rational v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        Rational w = unary();
        if (w == 0) fail("division by zero");
        v /= w;
      } else {
        return v;
      }
    }
  }
  Rational unary() {
    if (eat('-')) return -unary();
    return power();
  }
  Rational power() {
    Rational base = primary();
    if (!eat('^')) return base;
    Rational e = unary();
    if (e.get_den() != 1 || !e.get_num().fits_slong_p()) fail("exponent must be a small integer");
    long k = e.get_num().get_si();
    if (k < 0) {
      if (base == 0) fail("division by zero");
      base = 1 / base;
      k = -k;
    }
    Rational out = 1;
    for (long j = 0; j < k; ++j) out *= base;
    return out;
  }
  Rational primary() {
    skip();
    if (eat('(')) {
      Rational v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (i_ < s_.size() && s_[i_] == 'n') {
      ++i_;
      *uses_n_ = true;
      return Rational(n_);
    }
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected a number, n or '('");
    return Rational(BigInt(std::string(s_.substr(start, i_ - start))));
  }

  std::string_view s_;
  long n_;
  bool* uses_n_;
  std::size_t i_ = 0;
};

}  // namespace

PeriodFormula::PeriodFormula(std::string text) : text_(std::move(text)) {
  FormulaEval(text_, 0, &uses_n_).run();
}

BigInt PeriodFormula::operator()(long n) const {
  bool dummy = false;
  const Rational v = FormulaEval(text_, n, &dummy).run();
  if (v.get_den() != 1) throw std::domain_error("period formula '" + text_ + "' is not an integer at n=" + std::to_string(n));
  return v.get_num();
}

std::optional<long> Cell::generic_tau() const {
  std::vector<long> rest;
  for (long t : taus) {
    bool split = false;
    for (const auto& sp : splits) split = split || sp.tau == t;
    if (!split) rest.push_back(t);
  }
  if (rest.size() != 1) return std::nullopt;
  return rest.front();
}

Point CaseData::period_representative(const PeriodRow& row, long n) const {
  if (!row.formula.uses_n() || n == 0) return row.point;
  auto id = in_domain(row.point);
  if (!id) throw std::domain_error("scaled period row outside the inducing domain: " + row.point.str());
  Point z = row.point;
  for (long k = 0; k < n; ++k) z = scale(*id, z);
  return z;
}

// ---------------------------------------------------------------------------
// Case file parser

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

struct RawCell {
  std::string label;
  std::vector<long> taus;
  std::vector<Polytope> include, exclude;
  std::vector<std::pair<long, Polytope>> splits;
};

struct RawLevel {
  std::optional<QuadElem> kappa;
  std::vector<std::string> alphabet;
  std::vector<RawCell> cells;
  std::vector<std::pair<std::string, std::string>> subst;
  ShatPolicy policy = ShatPolicy::nearest;
  std::vector<std::tuple<std::string, long, ShatDirection>> rules;
  std::vector<std::string> commuting;

  RawCell& cell(const std::string& label) {
    for (auto& c : cells)
      if (c.label == label) return c;
    cells.push_back({label, {}, {}, {}, {}});
    return cells.back();
  }
};

struct RawWitness {
  Point z;
  std::vector<Point> v_cycle;
  bool refined = false;
};

struct RawDomain {
  std::string name;
  std::vector<Polytope> include, exclude;
  QuadElem factor;
  Point origin;
  bool v_frame = false;
  RawLevel main, refined;
  bool has_refined = false;
  std::vector<std::pair<std::string, std::string>> inner_subst;
  int epsilon = 1;
  std::optional<QuadElem> delta;
  std::vector<RawWitness> witnesses;
  std::vector<IsolatedPoint> isolated;

  ScalingMap frame(const std::optional<QuadElem>& kappa) const {
    return {kappa.value_or(QuadElem(1, factor.d())), factor, origin};
  }
};

class CaseParser {
 public:
  explicit CaseParser(unsigned d) : d_(d) {}

  void line(RawDomain& rd, const std::string& key, std::string_view rest) {
    if (key == "refine") {
      rd.has_refined = true;
      auto ws = words(rest);
      if (ws.empty()) throw ParseError("empty refine line");
      std::string sub = ws[0];
      std::string_view tail = trim(rest.substr(rest.find(sub) + sub.size()));
      level_line(rd, rd.refined, sub, tail);
      return;
    }
    if (key == "region") {
      rd.include.push_back(constraints(rd, rest));
    } else if (key == "region-exclude") {
      rd.exclude.push_back(constraints(rd, rest));
    } else if (key == "frame") {
      auto w = std::string(trim(rest));
      if (w != "V" && w != "torus") throw ParseError("frame must be V or torus");
      rd.v_frame = w == "V";
    } else if (key == "frame-factor") {
      rd.factor = parse_constant(rest, d_);
    } else if (key == "frame-origin") {
      rd.origin = parse_point_expr(rest, d_);
    } else if (key == "epsilon") {
      rd.epsilon = std::stoi(std::string(trim(rest)));
      if (rd.epsilon != 1 && rd.epsilon != -1) throw ParseError("epsilon must be 1 or -1");
    } else if (key == "delta") {
      rd.delta = parse_constant(rest, d_);
    } else if (key == "inner-subst") {
      rd.inner_subst.push_back(subst_pair(rest));
    } else if (key == "witness" || key == "witness-v" || key == "refined-witness-v") {
      RawWitness w;
      const bool v = key != "witness";
      w.z = v ? rd.frame(std::nullopt).V_inv(parse_point_expr(rest, d_)) : parse_point_expr(rest, d_);
      w.refined = key == "refined-witness-v";
      rd.witnesses.push_back(w);
    } else if (key == "isolated-v") {
      // isolated-v <point> tau <n> hat-period <k>
      auto t = rest.find(" tau ");
      auto h = rest.find(" hat-period ");
      if (t == std::string_view::npos || h == std::string_view::npos || h < t)
        throw ParseError("expected 'isolated-v <point> tau <n> hat-period <k>'");
      IsolatedPoint ip;
      ip.z = rd.frame(std::nullopt).V_inv(parse_point_expr(rest.substr(0, t), d_));
      ip.tau = std::stol(std::string(trim(rest.substr(t + 5, h - t - 5))));
      ip.hat_period = std::stol(std::string(trim(rest.substr(h + 12))));
      rd.isolated.push_back(ip);
    } else if (key == "cycle-v") {
      if (rd.witnesses.empty()) throw ParseError("cycle-v before witness");
      for (auto part : split(rest, ';')) rd.witnesses.back().v_cycle.push_back(parse_point_expr(part, d_));
    } else {
      level_line(rd, rd.main, key, rest);
    }
  }

 private:
  Polytope constraints(const RawDomain& rd, std::string_view text) const {
    text = trim(text);
    Polytope p = text == "all" ? Polytope{} : parse_constraints(text, d_);
    return rd.v_frame ? rd.frame(std::nullopt).from_frame(p) : p;
  }

  static std::pair<std::string, std::string> subst_pair(std::string_view rest) {
    auto arrow = rest.find("->");
    if (arrow == std::string_view::npos) throw ParseError("expected 'letter -> word'");
    return {std::string(trim(rest.substr(0, arrow))), std::string(trim(rest.substr(arrow + 2)))};
  }

  void level_line(RawDomain& rd, RawLevel& lv, const std::string& key, std::string_view rest) {
    if (key == "kappa") {
      lv.kappa = parse_constant(rest, d_);
    } else if (key == "alphabet") {
      lv.alphabet = words(rest);
    } else if (key == "commute") {
      lv.commuting = words(rest);
    } else if (key == "cell" || key == "cell-exclude") {
      auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw ParseError("expected ':' in cell line");
      auto head = words(rest.substr(0, colon));
      if (head.empty()) throw ParseError("cell without label");
      RawCell& c = lv.cell(head[0]);
      for (std::size_t i = 1; i + 1 < head.size(); i += 2) {
        if (head[i] != "tau") throw ParseError("unknown cell attribute '" + head[i] + "'");
        for (auto t : split(head[i + 1], ',')) c.taus.push_back(std::stol(std::string(t)));
      }
      Polytope p = constraints(rd, rest.substr(colon + 1));
      (key == "cell" ? c.include : c.exclude).push_back(std::move(p));
    } else if (key == "tau-split") {
      // tau-split <letter> <tau> : <constraints>
      auto colon = rest.find(':');
      auto head = words(rest.substr(0, colon == std::string_view::npos ? 0 : colon));
      if (head.size() != 2) throw ParseError("expected 'tau-split letter tau : constraints'");
      lv.cell(head[0]).splits.emplace_back(std::stol(head[1]), constraints(rd, rest.substr(colon + 1)));
    } else if (key == "subst") {
      lv.subst.push_back(subst_pair(rest));
    } else if (key == "shat") {
      auto w = std::string(trim(rest));
      if (w == "nearest") lv.policy = ShatPolicy::nearest;
      else if (w == "forward") lv.policy = ShatPolicy::forward;
      else throw ParseError("unknown shat policy '" + w + "'");
    } else if (key == "shat-rule") {
      auto ws = words(rest);
      if (ws.size() != 3 || (ws[2] != "forward" && ws[2] != "backward"))
        throw ParseError("expected 'shat-rule letter position forward|backward'");
      lv.rules.emplace_back(ws[0], std::stol(ws[1]),
                            ws[2] == "forward" ? ShatDirection::forward : ShatDirection::backward);
    } else {
      throw ParseError("unknown keyword '" + key + "'");
    }
  }

  unsigned d_;
};

std::shared_ptr<const Alphabet> make_alphabet(const RawLevel& lv) {
  std::vector<std::string> names = lv.alphabet;
  for (const auto& c : lv.cells)
    if (std::find(names.begin(), names.end(), c.label) == names.end()) names.push_back(c.label);
  return std::make_shared<const Alphabet>(names);
}

Region make_region(const std::vector<Polytope>& inc, const std::vector<Polytope>& exc) {
  Region r;
  for (const auto& p : inc) r.include(p);
  for (const auto& p : exc) r.exclude(p);
  return r;
}

Renormalization build_level(const RawLevel& lv, const ScalingMap& s,
                            std::shared_ptr<const Alphabet> alphabet, const RawDomain& rd,
                            unsigned d) {
  Renormalization r;
  r.scaling = s;
  r.alphabet = std::move(alphabet);
  for (const auto& rc : lv.cells) {
    Cell c;
    c.label = r.alphabet->index(rc.label);
    c.region = make_region(rc.include, rc.exclude);
    c.taus = rc.taus;
    for (const auto& [tau, poly] : rc.splits) {
      std::vector<Polytope> inc;
      for (const auto& p : rc.include) inc.push_back(intersect(p, poly));
      c.splits.push_back({tau, make_region(inc, rc.exclude)});
    }
    r.cells.push_back(std::move(c));
  }
  r.policy = lv.policy;
  for (const auto& [l, k, dir] : lv.rules) r.rules.push_back({r.alphabet->index(l), k, dir});
  for (const auto& l : lv.commuting) r.commuting.push_back(r.alphabet->index(l));
  // U(D_i): U^{-1}(z) in D_i, including the unit-square bounds.
  const Polytope square = parse_constraints("0 <= x < 1, 0 <= y < 1", d);
  for (const auto& p : rd.include) {
    Polytope q = p;
    q.constraints.insert(q.constraints.end(), square.constraints.begin(), square.constraints.end());
    r.scaled_domain.include(s.scaled(q));
  }
  for (const auto& p : rd.exclude) r.scaled_domain.exclude(s.scaled(p));
  return r;
}

std::optional<Substitution> make_subst(const std::vector<std::pair<std::string, std::string>>& raw,
                                       std::shared_ptr<const Alphabet> src,
                                       std::shared_ptr<const Alphabet> dst) {
  if (raw.empty()) return std::nullopt;
  std::vector<Word> imgs(src->size());
  std::vector<bool> seen(src->size(), false);
  for (const auto& [l, w] : raw) {
    auto i = static_cast<std::size_t>(src->index(l));
    if (seen[i]) throw ParseError("duplicate image for letter '" + l + "'");
    seen[i] = true;
    imgs[i] = dst->parse_word(w);
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ParseError("no image for letter '" + src->name(static_cast<Letter>(i)) + "'");
  return Substitution(std::move(src), std::move(dst), std::move(imgs));
}

Domain build_domain(const RawDomain& rd, unsigned d) {
  Domain dom;
  dom.name = rd.name;
  dom.region = make_region(rd.include, rd.exclude);
  dom.epsilon = rd.epsilon;
  if (!rd.delta) throw ParseError("domain '" + rd.name + "' has no delta");
  dom.delta = *rd.delta;
  if (!rd.main.kappa) throw ParseError("domain '" + rd.name + "' has no kappa");

  auto main_alpha = make_alphabet(rd.main);
  dom.main = build_level(rd.main, rd.frame(rd.main.kappa), main_alpha, rd, d);
  if (rd.has_refined) {
    if (!rd.refined.kappa) throw ParseError("refinement without kappa");
    auto ref_alpha = make_alphabet(rd.refined);
    dom.refined = build_level(rd.refined, rd.frame(rd.refined.kappa), ref_alpha, rd, d);
    dom.refined->sigma = make_subst(rd.refined.subst, ref_alpha, main_alpha);
  }
  if (!rd.inner_subst.empty()) {
    if (!dom.refined || !dom.refined->sigma) throw ParseError("inner-subst needs a refined substitution");
    auto inner = make_subst(rd.inner_subst, main_alpha, dom.refined->alphabet);
    dom.main.sigma = dom.refined->sigma->after(*inner);
  } else {
    dom.main.sigma = make_subst(rd.main.subst, main_alpha, main_alpha);
  }
  for (const auto& w : rd.witnesses) dom.witnesses.push_back({w.z, w.v_cycle, w.refined});
  dom.isolated = rd.isolated;
  return dom;
}

}  // namespace

CaseData CaseData::parse(std::string_view text) {
  CaseData cd;
  std::optional<RawDomain> cur;
  std::optional<CaseParser> parser;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      std::size_t sp = 0;
      while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp]))) ++sp;
      const std::string key(line.substr(0, sp));
      const std::string_view rest = trim(line.substr(sp));
      if (key == "case") {
        cd.lc_ = &LambdaCase::get(parse_case_tag(rest));
        parser.emplace(cd.lc_->d());
      } else if (key == "period") {
        if (!cd.lc_) throw ParseError("period before case");
        if (cur) throw ParseError("period inside a domain");
        auto colon = rest.find(':');
        auto at = rest.find('@');
        if (colon == std::string_view::npos || at == std::string_view::npos || at < colon)
          throw ParseError("expected 'period <label> : <formula> @ <point>'");
        cd.period_rows_.push_back({std::string(trim(rest.substr(0, colon))),
                                   PeriodFormula(std::string(trim(rest.substr(colon + 1, at - colon - 1)))),
                                   parse_point_expr(rest.substr(at + 1), cd.lc_->d())});
      } else if (key == "max-return") {
        cd.max_return_ = std::stol(std::string(rest));
      } else if (key == "domain") {
        if (!cd.lc_) throw ParseError("domain before case");
        if (cur) throw ParseError("nested domain");
        cur.emplace();
        cur->name = std::string(rest);
        cur->factor = QuadElem(1, cd.lc_->d());
        cur->origin = Point{QuadElem(0, cd.lc_->d()), QuadElem(0, cd.lc_->d())};
      } else if (key == "end") {
        if (!cur) throw ParseError("'end' without domain");
        cd.domains_.push_back(build_domain(*cur, cd.lc_->d()));
        cur.reset();
      } else {
        if (!cur) throw ParseError("'" + key + "' outside a domain");
        parser->line(*cur, key, rest);
      }
    } catch (const ParseError& e) {
      throw ParseError("case file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (cur) throw ParseError("unterminated domain");
  if (!cd.lc_ || cd.domains_.empty()) throw ParseError("case file without case or domains");
  return cd;
}

const CaseData& CaseData::get(CaseTag tag) {
  static const std::array<CaseData, kAllCases.size()> table = [] {
    std::array<CaseData, kAllCases.size()> t;
    std::array<bool, kAllCases.size()> seen{};
    for (const auto& [name, text] : detail::embedded_case_files()) {
      CaseData cd;
      try {
        cd = parse(text);
      } catch (const ParseError& e) {
        throw ParseError(std::string(name) + ": " + e.what());
      }
      auto i = static_cast<std::size_t>(cd.tag());
      t[i] = std::move(cd);
      seen[i] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw ParseError("no case file for " + to_string(kAllCases[i]));
    return t;
  }();
  return table[static_cast<std::size_t>(tag)];
}

std::optional<int> CaseData::in_domain(const Point& z) const {
  if (!z.in_unit_square()) return std::nullopt;
  for (std::size_t i = 0; i < domains_.size(); ++i)
    if (domains_[i].region.contains(z)) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> CaseData::in_domain(const FastPoint& z, const FastFrame& f) const {
  for (std::size_t i = 0; i < domains_.size(); ++i)
    if (domains_[i].region.contains(z, f)) return static_cast<int>(i);
  return std::nullopt;
}

const Cell* CaseData::cell_of(const Point& z) const {
  auto id = in_domain(z);
  if (!id) return nullptr;
  return domain_at(*id).main.cell_of(z);
}

Point CaseData::scale(int domain, const Point& z) const { return domain_at(domain).main.scaling.U(z); }

Point CaseData::unscale(int domain, const Point& z) const {
  const Domain& d = domain_at(domain);
  if (!d.main.scaled_domain.contains(z)) throw std::domain_error("point is not in U(D): " + z.str());
  return d.main.scaling.U_inv(z);
}

RMembership r_membership(const CaseData& cd, const Point& z, std::uint64_t budget) {
  RMembership r;
  if (cd.in_union(z)) {
    r.steps = 0;
    r.landing = z;
    return r;
  }
  OrbitCursor cur(cd.lambda_case(), z);
  const auto start = cur.snapshot();
  for (std::uint64_t k = 1; k <= budget; ++k) {
    cur.forward();
    const bool hit = cur.is_fast() ? cd.in_domain(cur.fast_point(), cur.frame()).has_value()
                                   : cd.in_union(cur.point());
    if (hit) {
      r.steps = BigInt(std::to_string(k));
      r.landing = cur.point();
      return r;
    }
    if (cur.equals(start)) {
      r.in_R = true;
      r.steps = BigInt(std::to_string(k));
      r.landing = z;
      return r;
    }
  }
  throw std::runtime_error("R-membership budget exhausted for " + z.str());
}

}  // namespace qrot

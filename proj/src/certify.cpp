#include "qrot/certify.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace qrot {

QuadElem ring_generator(unsigned d) {
  if (d == 5) return (QuadElem(1, 5) + QuadElem::sqrt(5)) / QuadElem(2, 5);
  return QuadElem::sqrt(d);
}

std::vector<QuadElem> lattice_coordinates(unsigned d, long Q, const QuadElem& lo, const QuadElem& hi) {
  std::vector<QuadElem> out;
  if (Q < 1) throw std::invalid_argument("Q must be positive");
  if (hi < lo) return out;
  const QuadElem w = ring_generator(d);
  const QuadElem wc = w.conj();
  const QuadElem q(Q, d);
  // Q u - Q u' = b (w - w'), with u in [0, 1) and u' in [lo, hi].
  const QuadElem gap = w - wc;
  const BigInt b_lo = ((-q * hi) / gap).floor();
  const BigInt b_hi = ((q - q * lo) / gap).ceil();
  for (BigInt b = b_lo; b <= b_hi; ++b) {
    const QuadElem bw = QuadElem(b, 0, 1, d) * w;
    const QuadElem bwc = bw.conj();
    BigInt a_lo = max(-bw, q * lo - bwc).ceil();
    BigInt a_hi = (q - bw).ceil() - 1;
    a_hi = std::min<BigInt>(a_hi, (q * hi - bwc).floor());
    for (BigInt a = a_lo; a <= a_hi; ++a) {
      const QuadElem u = (QuadElem(a, 0, 1, d) + bw) / q;
      const QuadElem uc = u.conj();
      if (u.sign() >= 0 && u < QuadElem(1, d) && !(uc < lo) && !(hi < uc)) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Point> enumerate_candidates(const CaseData& cd, int domain, long Q) {
  const Domain& dom = cd.domain(domain);
  const ScalingMap& s = dom.main.scaling;
  const unsigned d = cd.lambda_case().d();
  const QuadElem& delta = dom.delta;
  // |factor' (u' - v')| <= delta per coordinate.
  const QuadElem r = delta / s.factor.conj().abs();
  const Point vc = s.v.conj();
  const auto xs = lattice_coordinates(d, Q, vc.x - r, vc.x + r);
  const auto ys = vc.y == vc.x ? xs : lattice_coordinates(d, Q, vc.y - r, vc.y + r);
  std::vector<Point> out;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      Point z{x, y};
      if (!dom.contains(z)) continue;
      if (cd.in_domain(z) != domain) continue;
      if (s.V(z).conj().sup_norm() <= delta) out.push_back(z);
    }
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

bool Certificate::all_periodic() const {
  return std::all_of(candidates.begin(), candidates.end(), [](const auto& c) { return c.verdict.periodic(); });
}

std::vector<const CandidateResult*> Certificate::aperiodic() const {
  std::vector<const CandidateResult*> out;
  for (const auto& c : candidates)
    if (!c.verdict.periodic()) out.push_back(&c);
  return out;
}

namespace {

// The delta bound refers to the finest scaling of the domain.
bool cycle_within_delta(const CaseData& cd, const CandidateResult& c, std::size_t max_s_steps) {
  const Domain& dom = cd.domain(c.verdict.domain);
  Verdict v = c.verdict;
  Level level = Level::main;
  if (dom.refined) {
    level = Level::refined;
    v = decide(cd, c.z, {max_s_steps, level});
  }
  const ScalingMap& s = level == Level::refined ? dom.refined->scaling : dom.main.scaling;
  for (const auto& r : v.cycle())
    if (dom.delta < s.V(r.z).conj().sup_norm()) return false;
  return true;
}

}  // namespace

Certificate certify_Q(const CaseData& cd, long Q, const CertifyOptions& opts) {
  Certificate cert;
  cert.tag = cd.tag();
  cert.Q = Q;
  cert.options = opts;
  for (int i = 0; i < static_cast<int>(cd.domains().size()); ++i) {
    cert.deltas.push_back(cd.domain(i).delta);
    for (auto& z : enumerate_candidates(cd, i, Q)) cert.candidates.push_back({std::move(z), i, {}, true});
  }
  std::sort(cert.candidates.begin(), cert.candidates.end(),
            [](const auto& a, const auto& b) { return a.z < b.z; });
  parallel_for(cert.candidates.size(), opts.threads, [&](std::size_t k) {
    CandidateResult& c = cert.candidates[k];
    c.verdict = decide(cd, c.z, {opts.max_s_steps, Level::main});
    if (!c.verdict.periodic()) c.within_delta = cycle_within_delta(cd, c, opts.max_s_steps);
  });
  return cert;
}

std::vector<ScanRow> scan_aperiodic(const CaseData& cd, long Q, const std::optional<Region>& region,
                                    unsigned threads) {
  if (Q < 1) throw std::invalid_argument("Q must be positive");
  const unsigned d = cd.lambda_case().d();
  std::vector<ScanRow> rows;
  for (long i = 0; i < Q; ++i)
    for (long j = 0; j < Q; ++j) {
      Point z{QuadElem::rational(Rational(i, Q), d), QuadElem::rational(Rational(j, Q), d)};
      if (region && !region->contains(z)) continue;
      rows.push_back({std::move(z), i, j, true, std::nullopt});
    }
  parallel_for(rows.size(), threads, [&](std::size_t k) {
    ScanRow& r = rows[k];
    const Verdict v = decide(cd, r.z);
    r.periodic = v.periodic();
    r.period = v.period;
  });
  return rows;
}

}  // namespace qrot

namespace qrot {

bool PeriodCheck::ok() const {
  if (!computed || *computed != expected) return false;
  return !brute_ran || (brute && *brute == expected);
}

std::vector<PeriodCheck> period_table(const CaseData& cd, long n_max, std::uint64_t brute_limit,
                                      unsigned threads) {
  std::vector<PeriodCheck> out;
  for (const auto& row : cd.period_rows()) {
    const long top = row.formula.uses_n() ? n_max : 0;
    for (long n = 0; n <= top; ++n) {
      PeriodCheck c;
      c.label = row.label;
      c.formula = row.formula.text();
      c.n = n;
      c.z = cd.period_representative(row, n);
      c.expected = row.formula(n);
      out.push_back(std::move(c));
    }
  }
  parallel_for(out.size(), threads, [&](std::size_t k) {
    PeriodCheck& c = out[k];
    const Verdict v = decide(cd, c.z);
    c.computed = v.period;
    if (c.expected <= brute_limit) {
      c.brute_ran = true;
      c.brute = brute_period(cd.lambda_case(), c.z, brute_limit).period;
    }
  });
  return out;
}

namespace {

std::string join_taus(const std::set<long>& s) {
  std::string out;
  for (long t : s) out += (out.empty() ? "" : ",") + std::to_string(t);
  return out;
}

void check_matrix_order(const CaseData& cd, std::vector<CheckResult>& out) {
  const LambdaCase& lc = cd.lambda_case();
  bool ok = matrix_pow(lc, lc.a_order).is_identity();
  for (int h = 1; h < lc.a_order && ok; ++h) ok = !matrix_pow(lc, h).is_identity();
  out.push_back({"matrix order", ok, "A^" + std::to_string(lc.a_order) + " = I"});
}

void check_scaling(const Domain& dom, std::vector<CheckResult>& out) {
  auto unit = [&](const Renormalization& lv, const std::string& what) {
    const QuadElem& k = lv.scaling.kappa;
    const QuadElem n = k * k.conj();
    const bool ok = k.sign() > 0 && k < QuadElem(1, k.d()) && n == QuadElem(dom.epsilon, k.d());
    out.push_back({dom.name + " " + what + " kappa", ok,
                   "kappa = " + k.str() + ", kappa kappa' = " + n.str() + ", epsilon = " + std::to_string(dom.epsilon)});
  };
  unit(dom.main, "main");
  if (dom.refined) {
    const QuadElem& k = dom.refined->scaling.kappa;
    const QuadElem n = k * k.conj();
    out.push_back({dom.name + " refined kappa", k.sign() > 0 && k < QuadElem(1, k.d()) && n.abs() == QuadElem(1, k.d()),
                   "kappa = " + k.str() + ", kappa kappa' = " + n.str()});
  }
}

void check_partition(const CaseData& cd, int id, std::size_t samples, std::vector<CheckResult>& out) {
  const Domain& dom = cd.domain(id);
  const unsigned d = cd.lambda_case().d();
  const auto pts = sample_region(dom.region, d, samples, 11 + static_cast<std::uint64_t>(id));
  std::size_t bad = 0, outside = 0;
  std::string first;
  for (const auto& z : pts) {
    int hits = 0;
    for (const auto& c : dom.main.cells) hits += c.region.contains(z) ? 1 : 0;
    if (hits != 1 && bad++ == 0) first = z.str();
    if (!dom.region.contains(dom.main.scaling.U(z))) ++outside;
  }
  out.push_back({dom.name + " partition", bad == 0 && !pts.empty(),
                 std::to_string(pts.size()) + " samples" + (bad ? ", first bad " + first : "")});
  out.push_back({dom.name + " U(D) in D", outside == 0 && !pts.empty(),
                 std::to_string(outside) + " of " + std::to_string(pts.size()) + " outside"});
}

void check_return_times(const CaseData& cd, int id, std::size_t samples, unsigned threads,
                        std::vector<CheckResult>& out) {
  const Domain& dom = cd.domain(id);
  const unsigned d = cd.lambda_case().d();
  const auto& cells = dom.main.cells;
  std::vector<CheckResult> rows(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    const Cell& c = cells[k];
    const std::set<long> allowed(c.taus.begin(), c.taus.end());
    const std::optional<long> generic = c.generic_tau();
    std::set<long> seen;
    std::size_t n = 0, wrong = 0;
    auto expect = [&](const Point& z, std::optional<long> want) {
      const long t = first_return(cd, z).steps_T;
      seen.insert(t);
      ++n;
      if (want ? t != *want : !allowed.empty() && !allowed.count(t)) ++wrong;
    };
    for (const auto& z : sample_cell(c, dom, d, samples, 101 + k)) {
      std::optional<long> want = generic;
      for (const auto& sp : c.splits)
        if (sp.region.contains(z)) want = sp.tau;
      expect(z, want);
    }
    for (std::size_t s = 0; s < c.splits.size(); ++s) {
      Cell part{c.label, c.splits[s].region, {c.splits[s].tau}, {}};
      for (const auto& z : sample_cell(part, dom, d, samples, 301 + 17 * k + s)) expect(z, c.splits[s].tau);
    }
    const bool ok = n > 0 && wrong == 0 && (allowed.empty() || seen == allowed);
    rows[k] = {dom.name + " tau(" + dom.main.alphabet->name(c.label) + ")", ok,
               std::to_string(n) + " samples, observed {" + join_taus(seen) + "}, table {" + join_taus(allowed) + "}" +
                   (wrong ? ", " + std::to_string(wrong) + " mismatches" : "")};
  });
  out.insert(out.end(), rows.begin(), rows.end());
}

void check_substitutions(const CaseData& cd, int id, std::size_t samples, std::vector<CheckResult>& out) {
  const Domain& dom = cd.domain(id);
  for (Level lv : {Level::main, Level::refined}) {
    if (lv == Level::refined && !dom.refined) continue;
    const auto rep = verify_substitution_conditions(cd, id, samples, lv);
    std::string detail = std::to_string(rep.samples) + " samples";
    if (!rep.ok()) detail += ", " + std::to_string(rep.violations.size()) + " violations; first: " + rep.violations.front();
    out.push_back({dom.name + (lv == Level::main ? " sigma" : " refined sigma"), rep.ok(), detail});
  }
}

void check_witnesses(const CaseData& cd, int id, std::vector<CheckResult>& out) {
  const Domain& dom = cd.domain(id);
  for (const auto& w : dom.witnesses) {
    const Level level = w.refined ? Level::refined : Level::main;
    const Renormalization& lv = w.refined ? *dom.refined : dom.main;
    const Verdict v = decide(cd, w.z, {100'000, level});
    bool ok = !v.periodic() && v.s_cycle_start == 0 &&
              static_cast<std::size_t>(v.s_cycle_len) == w.v_cycle.size();
    bool within = true;
    if (ok) {
      const auto cyc = v.cycle();
      for (std::size_t k = 0; k < cyc.size(); ++k) {
        const Point vz = lv.scaling.V(cyc[k].z);
        ok = ok && vz == w.v_cycle[k];
        within = within && !(dom.delta < vz.conj().sup_norm());
      }
    }
    out.push_back({dom.name + " witness " + w.z.str(), ok && within,
                   v.periodic() ? "decided periodic"
                                : "S-cycle length " + std::to_string(v.s_cycle_len) +
                                      (within ? "" : ", cycle leaves the delta bound")});
  }
}

void check_isolated(const CaseData& cd, int id, std::vector<CheckResult>& out) {
  const Domain& dom = cd.domain(id);
  for (const auto& ip : dom.isolated) {
    const ReturnStep first = first_return(cd, ip.z);
    Point z = first.point;
    long k = 1;
    while (!(z == ip.z) && k <= ip.hat_period) {
      z = first_return(cd, z).point;
      ++k;
    }
    const bool ok = first.steps_T == ip.tau && z == ip.z && k == ip.hat_period;
    out.push_back({dom.name + " isolated " + ip.z.str(), ok,
                   "return time " + std::to_string(first.steps_T) + ", T-hat period " +
                       (z == ip.z ? std::to_string(k) : "> " + std::to_string(ip.hat_period))});
  }
}

}  // namespace

std::vector<CheckResult> verify_case(const CaseData& cd, std::size_t samples, unsigned threads) {
  std::vector<CheckResult> out;
  check_matrix_order(cd, out);
  for (int id = 0; id < static_cast<int>(cd.domains().size()); ++id) {
    check_scaling(cd.domain(id), out);
    check_partition(cd, id, samples, out);
    check_return_times(cd, id, samples, threads, out);
    check_substitutions(cd, id, samples, out);
    check_witnesses(cd, id, out);
    check_isolated(cd, id, out);
  }
  for (const auto& p : period_table(cd, 3, 1'000'000, threads)) {
    out.push_back({"period " + p.label + " n=" + std::to_string(p.n), p.ok(),
                   p.formula + " = " + p.expected.get_str() + ", decided " +
                       (p.computed ? p.computed->get_str() : "none") +
                       (p.brute_ran ? ", brute " + (p.brute ? p.brute->get_str() : "cap") : "")});
  }
  return out;
}

}  // namespace qrot

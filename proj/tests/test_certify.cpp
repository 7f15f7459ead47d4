#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>

#include "qrot/certify.hpp"

using namespace qrot;

namespace {

QuadElem c(const char* s, unsigned d) { return parse_constant(s, d); }
Point p(const char* x, const char* y, unsigned d) { return {c(x, d), c(y, d)}; }

// All u = (a + b w)/Q in [0,1) with u' in [lo, hi], found by scanning a box
// of (a, b) that is generously larger than necessary.
std::vector<QuadElem> box_coordinates(unsigned d, long Q, const QuadElem& lo, const QuadElem& hi) {
  const QuadElem w = d == 5 ? QuadElem(1, 1, 2, 5) : QuadElem::sqrt(d);
  const double wd = w.to_double(), wcd = w.conj().to_double();
  const double reach = std::max(std::abs(lo.to_double()), std::abs(hi.to_double())) + 1;
  const long bmax = static_cast<long>(Q * reach / std::abs(wd - wcd)) + 3;
  const long amax = static_cast<long>(Q + bmax * std::abs(wd)) + 3;
  std::vector<QuadElem> out;
  for (long b = -bmax; b <= bmax; ++b)
    for (long a = -amax; a <= amax; ++a) {
      const QuadElem u = (QuadElem(a, d) + QuadElem(b, d) * w) / QuadElem(Q, d);
      if (u.sign() < 0 || !(u < QuadElem(1, d))) continue;
      const QuadElem uc = u.conj();
      if (uc < lo || hi < uc) continue;
      out.push_back(u);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Point> box_candidates(const CaseData& cd, int id, long Q) {
  const Domain& dom = cd.domain(id);
  const ScalingMap& s = dom.main.scaling;
  const unsigned d = cd.lambda_case().d();
  const QuadElem r = dom.delta / s.factor.conj().abs();
  const auto xs = box_coordinates(d, Q, s.v.x.conj() - r, s.v.x.conj() + r);
  const auto ys = box_coordinates(d, Q, s.v.y.conj() - r, s.v.y.conj() + r);
  std::vector<Point> out;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      const Point z{x, y};
      if (cd.in_domain(z) == id && s.V(z).conj().sup_norm() <= dom.delta) out.push_back(z);
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("lattice coordinates match a box scan") {
  for (unsigned d : {2u, 3u, 5u})
    for (long Q : {1L, 2L, 5L}) {
      const QuadElem lo = c("-3/2", d), hi = QuadElem::sqrt(d) + QuadElem(2, d);
      CHECK(lattice_coordinates(d, Q, lo, hi) == box_coordinates(d, Q, lo, hi));
    }
  CHECK(lattice_coordinates(2, 1, QuadElem(1, 2), QuadElem(0, 2)).empty());
  CHECK_THROWS(lattice_coordinates(2, 0, QuadElem(0, 2), QuadElem(1, 2)));
}

TEST_CASE("candidate enumeration is exhaustive") {
  for (CaseTag t : kAllCases) {
    const CaseData& cd = CaseData::get(t);
    for (int id = 0; id < static_cast<int>(cd.domains().size()); ++id) {
      const long qmax = t == CaseTag::sqrt3 ? 1 : 3;
      for (long Q = 1; Q <= qmax; ++Q) {
        auto got = enumerate_candidates(cd, id, Q);
        std::sort(got.begin(), got.end());
        CHECK(got == box_candidates(cd, id, Q));
      }
    }
  }
}

TEST_CASE("candidate examples") {
  const CaseData& g = CaseData::get(CaseTag::gamma);
  const std::set<QuadElem> allowed{QuadElem(0, 5), c("1/gamma", 5)};
  const auto gc = enumerate_candidates(g, 0, 1);
  CHECK(!gc.empty());
  for (const auto& z : gc) {
    CHECK(allowed.count(z.x));
    CHECK(allowed.count(z.y));
  }
  CHECK(enumerate_candidates(CaseData::get(CaseTag::sqrt2), 0, 1) ==
        std::vector<Point>{p("sqrt2 - 1", "sqrt2 - 1", 2)});
  CHECK(enumerate_candidates(CaseData::get(CaseTag::neg_sqrt2), 0, 1).empty());
}

TEST_CASE("candidates grow with the denominator") {
  for (CaseTag t : {CaseTag::gamma, CaseTag::neg_inv_gamma, CaseTag::sqrt2, CaseTag::neg_gamma}) {
    const CaseData& cd = CaseData::get(t);
    for (long Q : {1L, 2L}) {
      const auto small = enumerate_candidates(cd, 0, Q);
      const auto big = enumerate_candidates(cd, 0, 2 * Q);
      for (const auto& z : small) CHECK(std::binary_search(big.begin(), big.end(), z));
    }
  }
}

TEST_CASE("certification") {
  const CaseData& g = CaseData::get(CaseTag::gamma);
  CHECK(certify_Q(g, 1).all_periodic());
  CHECK(certify_Q(g, 2).all_periodic());
  const Certificate c3 = certify_Q(g, 3);
  CHECK_FALSE(c3.all_periodic());
  // The certificate contains the S-orbit class of (0, 1/3).
  bool found = false;
  for (const auto* r : c3.aperiodic()) {
    CHECK(r->within_delta);
    for (const auto& s : r->verdict.cycle()) found = found || s.z == p("0", "1/3", 5);
  }
  CHECK(found);
  for (long Q : {2L, 3L}) CHECK(certify_Q(CaseData::get(CaseTag::sqrt2), Q).all_periodic());
  CHECK(std::is_sorted(c3.candidates.begin(), c3.candidates.end(),
                       [](const auto& a, const auto& b) { return a.z < b.z; }));
}

TEST_CASE("grid scans") {
  for (CaseTag t : kAllCases) {
    for (const auto& row : scan_aperiodic(CaseData::get(t), 1)) CHECK(row.periodic);
  }
  const auto rows = scan_aperiodic(CaseData::get(CaseTag::gamma), 3);
  CHECK(rows.size() == 9);
  bool third = false;
  for (const auto& r : rows)
    if (r.z == p("0", "1/3", 5)) third = !r.periodic;
  CHECK(third);
  Region none;
  none.include(parse_constraints("x < 0", 5));
  CHECK(scan_aperiodic(CaseData::get(CaseTag::gamma), 5, none).empty());
}

TEST_CASE("parallel_for") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](const auto& h) { return h.load() == 1; }));
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("verification checks pass") {
  for (CaseTag t : {CaseTag::gamma, CaseTag::neg_inv_gamma, CaseTag::neg_sqrt3}) {
    for (const auto& r : verify_case(CaseData::get(t), 20)) {
      INFO(r.name << ": " << r.detail);
      CHECK(r.ok);
    }
  }
}

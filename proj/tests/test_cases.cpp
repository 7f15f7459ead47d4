#include <doctest.h>

#include "qrot/renorm.hpp"

using namespace qrot;

namespace {

QuadElem c(const char* s, unsigned d) { return parse_constant(s, d); }
Point p(const char* x, const char* y, unsigned d) { return {c(x, d), c(y, d)}; }

}  // namespace

TEST_CASE("every case loads") {
  for (CaseTag t : kAllCases) {
    const CaseData& cd = CaseData::get(t);
    CHECK(cd.tag() == t);
    CHECK(!cd.domains().empty());
    for (const auto& dom : cd.domains()) {
      CHECK(!dom.main.cells.empty());
      CHECK(dom.main.sigma.has_value());
      CHECK(!dom.witnesses.empty());
    }
  }
  CHECK(CaseData::get(CaseTag::sqrt3).domains().size() == 2);
}

TEST_CASE("scaling units and orientation") {
  for (CaseTag t : kAllCases) {
    const CaseData& cd = CaseData::get(t);
    for (const auto& dom : cd.domains()) {
      const QuadElem& k = dom.main.scaling.kappa;
      CHECK(k.sign() > 0);
      CHECK(k < QuadElem(1, k.d()));
      CHECK(k * k.conj() == QuadElem(dom.epsilon, k.d()));
    }
  }
  CHECK(CaseData::get(CaseTag::sqrt2).domain(0).epsilon == -1);
  CHECK(CaseData::get(CaseTag::neg_sqrt2).domain(0).epsilon == -1);
}

TEST_CASE("delta constants") {
  const QuadElem g(1, 1, 2, 5);
  for (CaseTag t : {CaseTag::gamma, CaseTag::neg_inv_gamma, CaseTag::inv_gamma, CaseTag::neg_gamma})
    CHECK(CaseData::get(t).delta_bound(0) == g);
  CHECK(CaseData::get(CaseTag::sqrt2).delta_bound(0) == c("sqrt2 + 1", 2));
  CHECK(CaseData::get(CaseTag::neg_sqrt2).delta_bound(0) == QuadElem(1, 2));
  CHECK(CaseData::get(CaseTag::sqrt3).delta_bound(0) == QuadElem(2, 3));
  CHECK(CaseData::get(CaseTag::sqrt3).delta_bound(1) == c("2*(sqrt3 - 1)", 3));
  CHECK(CaseData::get(CaseTag::neg_sqrt3).delta_bound(0) == c("(5 + sqrt3)/2", 3));
}

TEST_CASE("scaling maps") {
  const CaseData& s2 = CaseData::get(CaseTag::sqrt2);
  CHECK(s2.domain(0).main.scaling.U(p("0", "0", 2)) == p("0", "0", 2));
  const CaseData& n2 = CaseData::get(CaseTag::neg_sqrt2);
  const ScalingMap& sn = n2.domain(0).main.scaling;
  const Point z = p("2 - sqrt2", "2 - sqrt2", 2);
  const QuadElem f = c("sqrt2 + 1", 2);
  CHECK(sn.V(z) == Point{f * (QuadElem(1, 2) - z.x), f * (QuadElem(1, 2) - z.y)});
  CHECK(sn.V(z) == p("1", "1", 2));
  const Point q = p("1/3", "3/5", 2);
  CHECK(sn.U(q) == Point{c("sqrt2 - 1", 2) * q.x + c("2 - sqrt2", 2), c("sqrt2 - 1", 2) * q.y + c("2 - sqrt2", 2)});

  const Domain& d3 = CaseData::get(CaseTag::neg_sqrt3).domain(0);
  const Point w = p("1/5", "2/7", 3);
  const Point u1 = d3.refined->scaling.U(d3.refined->scaling.U(w));
  CHECK(d3.main.scaling.U(w) == u1);
  CHECK(d3.main.scaling.U(w) == Point{c("(2 - sqrt3)^2", 3) * w.x + c("4*sqrt3 - 6", 3),
                                      c("(2 - sqrt3)^2", 3) * w.y + c("4*sqrt3 - 6", 3)});

  const Domain& g2 = CaseData::get(CaseTag::sqrt3).domain(1);
  CHECK(g2.main.scaling.U(w) == Point{c("2 - sqrt3", 3) * w.x + c("113*sqrt3 - 195", 3),
                                      c("2 - sqrt3", 3) * w.y + c("113*sqrt3 - 195", 3)});
  const CaseData& g = CaseData::get(CaseTag::gamma);
  CHECK(g.scale(0, p("1/2", "1/3", 5)) == Point{c("1/(2*gamma^2)", 5), c("1/(3*gamma^2)", 5)});

  for (CaseTag t : kAllCases) {
    const CaseData& cd = CaseData::get(t);
    for (int id = 0; id < static_cast<int>(cd.domains().size()); ++id) {
      const unsigned d = cd.lambda_case().d();
      for (const auto& z : sample_region(cd.domain(id).region, d, 60, 3)) {
        const Point u = cd.scale(id, z);
        CHECK(cd.domain(id).contains(u));
        CHECK(cd.unscale(id, u) == z);
        CHECK(cd.domain(id).main.scaling.V_inv(cd.domain(id).main.scaling.V(z)) == z);
      }
      CHECK_THROWS_AS(cd.unscale(id, Point{QuadElem(0, d), QuadElem(0, d)}), std::domain_error);
    }
  }
}

TEST_CASE("membership") {
  const CaseData& g = CaseData::get(CaseTag::gamma);
  CHECK_FALSE(g.in_domain(p("0", "0", 5)));
  const CaseData& n = CaseData::get(CaseTag::neg_inv_gamma);
  // x + gamma y >= 3 - gamma defines D; the cells split at x + gamma y = 2.
  const QuadElem gam = c("gamma", 5);
  for (const char* e : {"1/1000", "1/50", "1/7"}) {
    const QuadElem eps = c(e, 5);
    const Point z{QuadElem(1, 5) - eps, QuadElem(1, 5) - eps};
    REQUIRE(n.in_domain(z));
    const Cell* cell = n.cell_of(z);
    REQUIRE(cell);
    const bool upper = (z.x + gam * z.y) > QuadElem(2, 5);
    CHECK(n.domain(0).main.alphabet->name(cell->label) == (upper ? "0" : "1"));
  }
  const CaseData& s3 = CaseData::get(CaseTag::sqrt3);
  const Point centre = s3.domain(1).main.scaling.V_inv(p("1 + sqrt3", "1 + sqrt3", 3));
  CHECK(s3.in_domain(centre) == std::optional<int>(1));
  CHECK(s3.domain(1).main.alphabet->name(s3.cell_of(centre)->label) == "4");
}

TEST_CASE("cells partition each domain") {
  for (CaseTag t : kAllCases) {
    const CaseData& cd = CaseData::get(t);
    const unsigned d = cd.lambda_case().d();
    for (const auto& dom : cd.domains()) {
      for (const auto& z : sample_region(dom.region, d, 300, 21)) {
        int hits = 0;
        for (const auto& cell : dom.main.cells) hits += cell.region.contains(z) ? 1 : 0;
        CHECK(hits == 1);
      }
      // Lower-dimensional cells are disjoint from the others too.
      for (const auto& cell : dom.main.cells) {
        for (const auto& z : sample_cell(cell, dom, d, 20, 5)) {
          int hits = 0;
          for (const auto& other : dom.main.cells) hits += other.region.contains(z) ? 1 : 0;
          CHECK(hits == 1);
        }
      }
    }
  }
}

TEST_CASE("points that never reach the domain") {
  const CaseData& g = CaseData::get(CaseTag::gamma);
  const RMembership r0 = r_membership(g, p("0", "0", 5));
  CHECK(r0.in_R);
  CHECK(r0.steps == 1);
  const RMembership r1 = r_membership(CaseData::get(CaseTag::sqrt2), p("0", "1/2", 2));
  CHECK(r1.in_R);
  CHECK(r1.steps == 4);
  const CaseData& n = CaseData::get(CaseTag::neg_inv_gamma);
  const RMembership r2 = r_membership(n, p("99/100", "99/100", 5));
  CHECK_FALSE(r2.in_R);
  CHECK(r2.steps == 0);
}

TEST_CASE("period formulas") {
  const PeriodFormula f("5*(10*4^n - 1)/3");
  CHECK(f.uses_n());
  CHECK(f(0) == 15);
  CHECK(f(3) == 1065);
  const PeriodFormula alt("2*3^(n + 1) - 5*(-1)^n");
  for (long n = 0; n <= 10; ++n) {
    BigInt p3 = 1, sgn = n % 2 ? -1 : 1;
    for (long k = 0; k <= n; ++k) p3 *= 3;
    CHECK(alt(n) == 2 * p3 - 5 * sgn);
  }
  CHECK_FALSE(PeriodFormula("42").uses_n());
  CHECK_THROWS_AS(PeriodFormula("n/2")(1), std::domain_error);
  CHECK_THROWS(PeriodFormula("2 *"));
}

TEST_CASE("case file errors") {
  CHECK_THROWS_AS(CaseData::parse("case gamma\ndomain D\nregion all\nbogus 1\nend\n"), ParseError);
  CHECK_THROWS_AS(CaseData::parse("case nowhere\n"), ParseError);
  CHECK_THROWS_AS(CaseData::parse("case gamma\ndomain D\nregion all\nkappa 1/gamma^2\ndelta gamma\n"
                                  "cell 0 : x < 1\nsubst 0 -> 1\nend\n"),
                  ParseError);
}

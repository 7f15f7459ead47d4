#include "qrot/report.hpp"

#include <sstream>

#include <json.hpp>

namespace qrot {

using nlohmann::ordered_json;

namespace {

ordered_json point_json(const Point& z) { return ordered_json::array({z.x.str(), z.y.str()}); }

const char* kind_name(const Verdict& v) { return v.periodic() ? "periodic" : "aperiodic"; }

std::string alphabet_word(const CaseData& cd, int domain, const Word& w) {
  return cd.domain(domain).main.alphabet->format(w);
}

ordered_json verdict_body(const CaseData& cd, const Verdict& v) {
  ordered_json j;
  j["verdict"] = kind_name(v);
  if (v.period) j["period"] = v.period->get_str();
  if (v.in_R) {
    j["in_R"] = true;
    return j;
  }
  j["domain"] = cd.domain(v.domain).name;
  j["r_steps"] = v.r_steps.get_str();
  if (v.p_hit) {
    const PHit& p = *v.p_hit;
    j["p_hit"] = {{"level", p.level},
                  {"point", point_json(p.point)},
                  {"domain", cd.domain(p.domain).name},
                  {"word", alphabet_word(cd, p.domain, p.word)},
                  {"cycle_steps", p.cycle_steps.get_str()}};
  } else {
    ordered_json cyc = ordered_json::array();
    for (const auto& r : v.cycle()) cyc.push_back({{"z", point_json(r.z)}, {"s_hat", r.s_hat}, {"t", point_json(r.t)}});
    j["s_cycle_start"] = v.s_cycle_start;
    j["s_cycle"] = std::move(cyc);
  }
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string certificate_json(const CaseData& cd, const Certificate& cert) {
  ordered_json j;
  j["format"] = kCertificateFormat;
  j["version"] = kVersion;
  j["case"] = to_string(cert.tag);
  j["lambda"] = cd.lambda_case().lambda.str();
  j["Q"] = cert.Q;
  ordered_json doms = ordered_json::array();
  for (std::size_t i = 0; i < cd.domains().size(); ++i)
    doms.push_back({{"name", cd.domains()[i].name}, {"delta", cert.deltas.at(i).str()}});
  j["domains"] = std::move(doms);
  j["budgets"] = {{"max_s_steps", cert.options.max_s_steps}, {"max_return", cd.max_return()}};
  j["conclusion"] = cert.all_periodic() ? "all-periodic" : "aperiodic-found";
  ordered_json cands = ordered_json::array();
  for (const auto& c : cert.candidates) {
    ordered_json e;
    e["point"] = point_json(c.z);
    e["domain"] = cd.domain(c.domain).name;
    const ordered_json body = verdict_body(cd, c.verdict);
    for (const auto& [k, v] : body.items())
      if (k != "domain") e[k] = v;
    if (!c.verdict.periodic()) e["within_delta"] = c.within_delta;
    cands.push_back(std::move(e));
  }
  j["candidates"] = std::move(cands);
  return dump(j);
}

std::string verdict_text(const CaseData& cd, const Point& z, const Verdict& v) {
  std::ostringstream os;
  os << "point   " << z.str() << "\n";
  os << "verdict " << kind_name(v) << "\n";
  if (v.period) os << "period  " << v.period->get_str() << "\n";
  else if (v.periodic()) os << "period  (not computable from the tables)\n";
  if (v.in_R) {
    os << "orbit avoids the inducing domain\n";
    return os.str();
  }
  os << "domain  " << cd.domain(v.domain).name << ", reached after " << v.r_steps.get_str() << " steps\n";
  if (v.p_hit) {
    const PHit& p = *v.p_hit;
    os << "P-hit   level " << p.level << " at " << p.point.str() << "\n";
    os << "        cycle word " << alphabet_word(cd, p.domain, p.word) << ", T-length " << p.cycle_steps.get_str()
       << "\n";
  } else {
    os << "S-cycle of length " << v.s_cycle_len << " after " << v.s_cycle_start << " steps:\n";
    for (const auto& r : v.cycle()) os << "  " << r.z.str() << "  s=" << r.s_hat << "\n";
  }
  return os.str();
}

std::string verdict_json(const CaseData& cd, const Point& z, const Verdict& v) {
  ordered_json j;
  j["case"] = to_string(cd.tag());
  j["point"] = point_json(z);
  const ordered_json body = verdict_body(cd, v);
  for (const auto& [k, val] : body.items()) j[k] = val;
  return dump(j);
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "x,y,verdict,period\n";
  for (const auto& r : rows) {
    out += r.z.x.str() + "," + r.z.y.str() + "," + (r.periodic ? "periodic" : "aperiodic") + "," +
           (r.period ? r.period->get_str() : "") + "\n";
  }
  return out;
}

std::string scan_svg(const std::vector<ScanRow>& rows, long Q) {
  const long cell = Q <= 64 ? 8 : Q <= 256 ? 2 : 1;
  const long size = cell * Q;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << " " << size << "\">\n";
  os << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  for (const auto& r : rows) {
    os << "<rect x=\"" << r.i * cell << "\" y=\"" << (Q - 1 - r.j) * cell << "\" width=\"" << cell << "\" height=\""
       << cell << "\" fill=\"" << (r.periodic ? "#dddddd" : "black") << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string scan_json(const CaseData& cd, long Q, const std::vector<ScanRow>& rows) {
  ordered_json j;
  j["case"] = to_string(cd.tag());
  j["Q"] = Q;
  ordered_json pts = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json e{{"point", point_json(r.z)}, {"verdict", r.periodic ? "periodic" : "aperiodic"}};
    if (r.period) e["period"] = r.period->get_str();
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return dump(j);
}

std::string period_table_text(const std::vector<PeriodCheck>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << (r.ok() ? "ok   " : "FAIL ") << r.label << " n=" << r.n << "  " << r.formula << " = " << r.expected.get_str()
       << "  decided " << (r.computed ? r.computed->get_str() : "-");
    if (r.brute_ran) os << "  brute " << (r.brute ? r.brute->get_str() : "cap");
    os << "  at " << r.z.str() << "\n";
  }
  return os.str();
}

std::string period_table_csv(const std::vector<PeriodCheck>& rows) {
  std::string out = "label,n,x,y,formula,expected,decided,brute\n";
  for (const auto& r : rows) {
    out += r.label + "," + std::to_string(r.n) + "," + r.z.x.str() + "," + r.z.y.str() + ",\"" + r.formula + "\"," +
           r.expected.get_str() + "," + (r.computed ? r.computed->get_str() : "") + "," +
           (r.brute ? r.brute->get_str() : "") + "\n";
  }
  return out;
}

std::string period_table_json(const CaseData& cd, const std::vector<PeriodCheck>& rows) {
  ordered_json j;
  j["case"] = to_string(cd.tag());
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json e{{"label", r.label}, {"n", r.n},           {"point", point_json(r.z)},
                   {"formula", r.formula}, {"expected", r.expected.get_str()}, {"ok", r.ok()}};
    if (r.computed) e["decided"] = r.computed->get_str();
    if (r.brute) e["brute"] = r.brute->get_str();
    arr.push_back(std::move(e));
  }
  j["rows"] = std::move(arr);
  return dump(j);
}

std::string checks_text(const std::vector<CheckResult>& rows) {
  std::string out;
  std::size_t failed = 0;
  for (const auto& r : rows) {
    out += std::string(r.ok ? "ok   " : "FAIL ") + r.name + ": " + r.detail + "\n";
    failed += r.ok ? 0 : 1;
  }
  out += std::to_string(rows.size() - failed) + " of " + std::to_string(rows.size()) + " checks passed\n";
  return out;
}

std::string checks_json(const CaseData& cd, const std::vector<CheckResult>& rows) {
  ordered_json j;
  j["case"] = to_string(cd.tag());
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) arr.push_back({{"name", r.name}, {"ok", r.ok}, {"detail", r.detail}});
  j["checks"] = std::move(arr);
  return dump(j);
}

}  // namespace qrot

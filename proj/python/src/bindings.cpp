#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrot/report.hpp"

namespace py = pybind11;
using namespace qrot;

namespace {

const CaseData& load(const std::string& name) { return CaseData::get(parse_case_tag(name)); }

Point point_of(const CaseData& cd, const std::string& text) {
  const unsigned d = cd.lambda_case().d();
  Point z;
  try {
    z = parse_point_expr(text, d);
  } catch (const ParseError&) {
    z = Point::parse(text, d);
  }
  if (!z.in_unit_square()) throw py::value_error("point must lie in [0,1)^2");
  return z;
}

py::object to_py(const BigInt& v) { return py::module_::import("builtins").attr("int")(v.get_str()); }

py::object to_py(const std::optional<BigInt>& v) { return v ? to_py(*v) : py::none(); }

py::tuple to_py(const Point& z) { return py::make_tuple(z.x.str(), z.y.str()); }

py::dict verdict_dict(const Verdict& v) {
  py::dict out;
  out["verdict"] = v.periodic() ? "periodic" : "aperiodic";
  out["period"] = to_py(v.period);
  out["in_R"] = v.in_R;
  out["r_steps"] = to_py(v.r_steps);
  out["domain"] = v.domain;
  py::list traj;
  for (const auto& r : v.s_trajectory) traj.append(to_py(r.z));
  out["s_trajectory"] = traj;
  if (!v.periodic()) {
    py::list cyc;
    for (const auto& r : v.cycle()) cyc.append(to_py(r.z));
    out["s_cycle"] = cyc;
  }
  if (v.p_hit) {
    out["p_level"] = v.p_hit->level;
    out["p_point"] = to_py(v.p_hit->point);
  }
  return out;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_qrot, m) {
  m.doc() = "Exact periodicity tools for quadratic torus rotations";
  m.attr("__version__") = kVersion;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ArithmeticError>(m, "ArithmeticError", PyExc_ArithmeticError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  m.def("cases", [] {
    std::vector<std::string> out;
    for (CaseTag t : kAllCases) out.push_back(to_string(t));
    return out;
  });

  m.def(
      "step",
      [](const std::string& c, const std::string& z, long k) {
        const CaseData& cd = load(c);
        return to_py(step_n(cd.lambda_case(), point_of(cd, z), k));
      },
      py::arg("case"), py::arg("point"), py::arg("k") = 1, "T^k(z) as a pair of exact strings.");

  m.def(
      "brute_period",
      [](const std::string& c, const std::string& z, std::uint64_t cap) {
        const CaseData& cd = load(c);
        BrutePeriod b;
        {
          py::gil_scoped_release release;
          b = brute_period(cd.lambda_case(), point_of(cd, z), cap);
        }
        return to_py(b.period);
      },
      py::arg("case"), py::arg("point"), py::arg("cap") = 1'000'000,
      "Minimal period by direct iteration, or None past the cap.");

  m.def(
      "decide",
      [](const std::string& c, const std::string& z, std::size_t max_s_steps) {
        const CaseData& cd = load(c);
        const Point p = point_of(cd, z);
        Verdict v;
        {
          py::gil_scoped_release release;
          v = decide(cd, p, {max_s_steps, Level::main});
        }
        return verdict_dict(v);
      },
      py::arg("case"), py::arg("point"), py::arg("max_s_steps") = 100'000);

  m.def(
      "certify",
      [](const std::string& c, long q, unsigned threads) {
        const CaseData& cd = load(c);
        std::string text;
        {
          py::gil_scoped_release release;
          text = certificate_json(cd, certify_Q(cd, q, {threads, 100'000}));
        }
        return parse_json(text);
      },
      py::arg("case"), py::arg("q"), py::arg("threads") = 1, "Certificate for denominator q as a dict.");

  m.def(
      "scan",
      [](const std::string& c, long q, unsigned threads) {
        const CaseData& cd = load(c);
        std::vector<ScanRow> rows;
        {
          py::gil_scoped_release release;
          rows = scan_aperiodic(cd, q, std::nullopt, threads);
        }
        py::list out;
        for (const auto& r : rows) out.append(py::make_tuple(r.i, r.j, r.periodic, to_py(r.period)));
        return out;
      },
      py::arg("case"), py::arg("q"), py::arg("threads") = 1, "Rows (i, j, periodic, period) of the 1/q grid.");

  m.def(
      "scan_svg",
      [](const std::string& c, long q, unsigned threads) {
        py::gil_scoped_release release;
        return scan_svg(scan_aperiodic(load(c), q, std::nullopt, threads), q);
      },
      py::arg("case"), py::arg("q"), py::arg("threads") = 1);

  m.def(
      "period_table",
      [](const std::string& c, long n, std::uint64_t brute_limit, unsigned threads) {
        const CaseData& cd = load(c);
        std::string text;
        {
          py::gil_scoped_release release;
          text = period_table_json(cd, period_table(cd, n, brute_limit, threads));
        }
        return parse_json(text);
      },
      py::arg("case"), py::arg("n") = 3, py::arg("brute_limit") = 1'000'000, py::arg("threads") = 1);

  m.def(
      "verify",
      [](const std::string& c, std::size_t samples, unsigned threads) {
        const CaseData& cd = load(c);
        std::string text;
        {
          py::gil_scoped_release release;
          text = checks_json(cd, verify_case(cd, samples, threads));
        }
        return parse_json(text);
      },
      py::arg("case"), py::arg("samples") = 200, py::arg("threads") = 1);

  m.def("thue_morse_check", &thue_morse_check, py::arg("n"));
}

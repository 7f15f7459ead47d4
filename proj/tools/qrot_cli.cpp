#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qrot/report.hpp"
#include "qrot/subst.hpp"

namespace {

using namespace qrot;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string case_name = "gamma";
  long q = 1;
  std::string point;
  long n = 3;
  std::uint64_t budget = 0;  // 0 = command default
  std::string format;  // empty = first format the command accepts
  std::string out;
  unsigned threads = 1;
};

const CaseData& load_case(const RunConfig& cfg) {
  try {
    return CaseData::get(parse_case_tag(cfg.case_name));
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

Point load_point(const CaseData& cd, const std::string& text) {
  if (text.empty()) throw UsageError("--point is required");
  const unsigned d = cd.lambda_case().d();
  Point z;
  try {
    z = parse_point_expr(text, d);
  } catch (const ParseError&) {
    try {
      z = Point::parse(text, d);
    } catch (const ParseError& e) {
      throw UsageError(std::string("cannot parse point: ") + e.what());
    }
  }
  if (z.x.d() != d || z.y.d() != d) throw UsageError("point is not in the field of " + to_string(cd.tag()));
  if (!z.in_unit_square()) throw UsageError("point must lie in [0,1)^2");
  return z;
}

// Resolves the output format; the first entry is the default.
std::string pick_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  if (cfg.format.empty()) return *allowed.begin();
  for (const char* f : allowed)
    if (cfg.format == f) return f;
  throw UsageError("format '" + cfg.format + "' is not available for this command");
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + cfg.out);
  f << text;
}

int cmd_decide(const RunConfig& cfg) {
  const std::string format = pick_format(cfg, {"text", "json"});
  const CaseData& cd = load_case(cfg);
  const Point z = load_point(cd, cfg.point);
  DecideOptions opts;
  if (cfg.budget) opts.max_s_steps = cfg.budget;
  const Verdict v = decide(cd, z, opts);
  emit(cfg, format == "json" ? verdict_json(cd, z, v) : verdict_text(cd, z, v));
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  const std::string format = pick_format(cfg, {"text", "json"});
  const CaseData& cd = load_case(cfg);
  const auto rows = verify_case(cd, cfg.budget ? cfg.budget : 200, cfg.threads);
  emit(cfg, format == "json" ? checks_json(cd, rows) : checks_text(rows));
  for (const auto& r : rows)
    if (!r.ok) return kFailed;
  return kOk;
}

int cmd_certify(const RunConfig& cfg) {
  const std::string format = pick_format(cfg, {"json", "text"});
  if (cfg.q < 1) throw UsageError("--q must be positive");
  const CaseData& cd = load_case(cfg);
  CertifyOptions opts;
  opts.threads = cfg.threads;
  if (cfg.budget) opts.max_s_steps = cfg.budget;
  const Certificate cert = certify_Q(cd, cfg.q, opts);
  bool ok = true;
  for (const auto* c : cert.aperiodic()) ok = ok && c->within_delta;
  if (format == "json") {
    emit(cfg, certificate_json(cd, cert));
  } else {
    std::string s = to_string(cd.tag()) + " Q=" + std::to_string(cfg.q) + ": " +
                    std::to_string(cert.candidates.size()) + " candidates, " +
                    (cert.all_periodic() ? "all-periodic" : "aperiodic-found") + "\n";
    for (const auto* c : cert.aperiodic())
      s += "  aperiodic " + c->z.str() + (c->within_delta ? "" : " (S-cycle exceeds delta)") + "\n";
    emit(cfg, s);
  }
  return ok ? kOk : kFailed;
}

int cmd_scan(const RunConfig& cfg) {
  const std::string format = pick_format(cfg, {"csv", "svg", "json"});
  if (cfg.q < 1) throw UsageError("--q must be positive");
  const CaseData& cd = load_case(cfg);
  const auto rows = scan_aperiodic(cd, cfg.q, std::nullopt, cfg.threads);
  if (format == "svg") emit(cfg, scan_svg(rows, cfg.q));
  else if (format == "json") emit(cfg, scan_json(cd, cfg.q, rows));
  else emit(cfg, scan_csv(rows));
  return kOk;
}

int cmd_period_table(const RunConfig& cfg) {
  const std::string format = pick_format(cfg, {"text", "csv", "json"});
  if (cfg.n < 0) throw UsageError("--n must be non-negative");
  const CaseData& cd = load_case(cfg);
  const auto rows = period_table(cd, cfg.n, cfg.budget ? cfg.budget : 1'000'000, cfg.threads);
  if (format == "csv") emit(cfg, period_table_csv(rows));
  else if (format == "json") emit(cfg, period_table_json(cd, rows));
  else emit(cfg, period_table_text(rows));
  for (const auto& r : rows)
    if (!r.ok()) return kFailed;
  return kOk;
}

int cmd_thue_morse(const RunConfig& cfg) {
  pick_format(cfg, {"text"});
  if (cfg.n < 1) throw UsageError("--n must be positive");
  const bool ok = thue_morse_check(static_cast<std::size_t>(cfg.n));
  emit(cfg, std::string(ok ? "pass" : "fail") + " (" + std::to_string(cfg.n) + " run lengths)\n");
  return ok ? kOk : kFailed;
}

int cmd_orbit(const RunConfig& cfg) {
  const std::string format = pick_format(cfg, {"text", "csv"});
  if (cfg.n < 0) throw UsageError("--n must be non-negative");
  const CaseData& cd = load_case(cfg);
  const Point z0 = load_point(cd, cfg.point);
  const bool csv = format == "csv";
  std::string out = csv ? "k,x,y\n" : "";
  Point z = z0;
  for (long k = 0; k <= cfg.n; ++k) {
    if (k > 0 && z == z0) {
      if (!csv) out += "period " + std::to_string(k) + "\n";
      break;
    }
    out += csv ? std::to_string(k) + "," + z.x.str() + "," + z.y.str() + "\n"
               : std::to_string(k) + "  " + z.str() + "\n";
    z = step(cd.lambda_case(), z);
  }
  emit(cfg, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact periodicity tools for quadratic torus rotations"};
  app.set_version_flag("--version", std::string(qrot::kVersion));
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool point, bool q, bool n) {
    sub->add_option("--case", cfg.case_name, "gamma, neg-inv-gamma, inv-gamma, neg-gamma, sqrt2, neg-sqrt2, sqrt3, neg-sqrt3");
    if (point) sub->add_option("--point", cfg.point, "exact point, e.g. \"(0, 1/3)\" or \"(3/4, (5-sqrt2)/4)\"");
    if (q) sub->add_option("--q", cfg.q, "denominator Q")->check(CLI::PositiveNumber);
    if (n) sub->add_option("--n", cfg.n, "level count, iteration count or sequence length");
    sub->add_option("--budget", cfg.budget, "iteration cap (S-steps, samples or brute-force steps)");
    sub->add_option("--format", cfg.format, "text, csv, json or svg");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  };

  std::function<int(const RunConfig&)> run;
  auto add = [&](const char* name, const char* help, auto fn, bool point, bool q, bool n) {
    auto* sub = app.add_subcommand(name, help);
    common(sub, point, q, n);
    sub->callback([&run, fn] { run = fn; });
  };
  add("decide", "decide periodicity of one point", cmd_decide, true, false, false);
  add("verify", "check the case tables (budget = samples per cell)", cmd_verify, false, false, false);
  add("certify", "certify all points with denominator Q", cmd_certify, false, true, false);
  add("scan", "classify the grid (i/Q, j/Q)", cmd_scan, false, true, false);
  add("period-table", "minimal period rows for n = 0..N", cmd_period_table, false, false, true);
  add("thue-morse", "Thue-Morse run-length identity", cmd_thue_morse, false, false, true);
  add("orbit", "print T^k(z) for k = 0..N", cmd_orbit, true, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  try {
    return run(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}

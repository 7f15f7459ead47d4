#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qrot/renorm.hpp"

namespace qrot {

/// Generator w of Z[lambda]: gamma for d = 5, sqrt(d) otherwise.
QuadElem ring_generator(unsigned d);

/// All u = (a + b w)/Q with 0 <= u < 1 and lo <= u' <= hi, in increasing order.
std::vector<QuadElem> lattice_coordinates(unsigned d, long Q, const QuadElem& lo, const QuadElem& hi);

/// Every z in (1/Q Z[lambda])^2 in the domain with |V(z)'|_inf <= delta,
/// sorted by value.
std::vector<Point> enumerate_candidates(const CaseData& cd, int domain, long Q);

/// Budgets recorded in certificates.
struct CertifyOptions {
  unsigned threads = 1;
  std::size_t max_s_steps = 100'000;
};

struct CandidateResult {
  Point z;
  int domain = 0;
  Verdict verdict;
  /// For aperiodic verdicts: every point of the S-cycle satisfies
  /// |V(.)'|_inf <= delta.
  bool within_delta = true;
};

struct Certificate {
  CaseTag tag = CaseTag::gamma;
  long Q = 1;
  std::vector<QuadElem> deltas;  // per domain
  std::vector<CandidateResult> candidates;
  CertifyOptions options;

  bool all_periodic() const;
  std::vector<const CandidateResult*> aperiodic() const;
};

Certificate certify_Q(const CaseData& cd, long Q, const CertifyOptions& opts = {});

struct ScanRow {
  Point z;
  long i = 0, j = 0;  // z = (i/Q, j/Q)
  bool periodic = true;
  std::optional<BigInt> period;
};

/// Classifies the grid points (i/Q, j/Q) lying in `region` (all of
/// [0,1)^2 when empty). Rows are ordered by (i, j).
std::vector<ScanRow> scan_aperiodic(const CaseData& cd, long Q, const std::optional<Region>& region = {},
                                    unsigned threads = 1);

/// One evaluated row of a minimal-period table.
struct PeriodCheck {
  std::string label;
  std::string formula;
  long n = 0;
  Point z;
  BigInt expected;
  std::optional<BigInt> computed;  // exact_period via decide
  std::optional<BigInt> brute;     // set when brute force ran and halted
  bool brute_ran = false;

  bool ok() const;
};

/// Evaluates every period row of the case for n = 0..n_max (constant rows
/// once). Brute force runs for expected periods up to brute_limit.
std::vector<PeriodCheck> period_table(const CaseData& cd, long n_max, std::uint64_t brute_limit = 1'000'000,
                                      unsigned threads = 1);

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

/// Table checks for one case: matrix order, scaling units, partitions,
/// return times, substitution conditions, witnesses, isolated points and
/// period rows.
std::vector<CheckResult> verify_case(const CaseData& cd, std::size_t samples, unsigned threads = 1);

/// Runs f(0..n-1) on `threads` workers; each index is handled exactly once.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

}  // namespace qrot

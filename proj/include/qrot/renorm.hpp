#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrot/cases.hpp"

namespace qrot {

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One application of the first return map.
struct ReturnStep {
  Point point;
  long steps_T = 0;  // signed: negative for the inverse map
  Letter cell = -1;  // cell of the starting point
};

/// T-hat(z); z must lie in D.
ReturnStep first_return(const CaseData& cd, const Point& z);
/// T-hat^{-1}(z).
ReturnStep first_return_inv(const CaseData& cd, const Point& z);

/// Which renormalization level a computation refers to.
enum class Level { main, refined };

struct PMembership {
  bool in_P = false;
  long s_hat = 0;                 // chosen hit when not in P
  long s_T = 0;                   // T-steps of T-hat^{s_hat}
  Point hit;                      // T-hat^{s_hat}(z)
  std::optional<long> forward;    // nearest hit m >= 0
  std::optional<long> backward;   // nearest hit m < 0
  // T-hat cycle when in P
  std::vector<Letter> cycle_word;
  BigInt cycle_steps;
};

PMembership p_membership(const CaseData& cd, int domain, const Point& z, Level level = Level::main);

/// One step of the renormalization map S(z) = U^{-1} T-hat^{s_hat}(z).
struct SRecord {
  Point z;
  long s_hat = 0;
  long s_T = 0;
  Point t;     // V(T^s z) - V(z) A^s
  Point next;
};

/// Throws std::domain_error on P-points.
SRecord s_map(const CaseData& cd, int domain, const Point& z, Level level = Level::main);

enum class VerdictKind { periodic, aperiodic };

struct PHit {
  long level = 0;          // n with S^n R(z) in P
  Point point;
  int domain = 0;
  std::vector<Letter> word;  // T-hat cycle coding of the P-point
  BigInt cycle_steps;        // its T-period
};

struct Verdict {
  VerdictKind kind = VerdictKind::periodic;
  std::optional<BigInt> period;       // empty when periodic but not computable
  bool in_R = false;
  BigInt r_steps;                     // r(z), or the period when in R
  int domain = -1;
  std::vector<SRecord> s_trajectory;  // S-orbit of R(z)
  long s_cycle_start = 0;
  long s_cycle_len = 0;
  std::optional<PHit> p_hit;

  bool periodic() const { return kind == VerdictKind::periodic; }
  /// The aperiodic S-cycle.
  std::vector<SRecord> cycle() const;
};

struct DecideOptions {
  std::size_t max_s_steps = 100'000;
  Level level = Level::main;
};

Verdict decide(const CaseData& cd, const Point& z, const DecideOptions& opts = {});

/// Period from the P-hit: tau(sigma^n(word)).
BigInt exact_period(const CaseData& cd, const Verdict& v);

struct KappaDigits {
  std::vector<Point> digits;   // -t_k A^{-(s_0 + ... + s_k)}
  Point residual;              // V(z) - sum kappa^k digits_k
  QuadElem residual_bound;     // kappa^n * bound on the S-orbit
};

KappaDigits kappa_digits(const CaseData& cd, const Point& z, std::size_t n, Level level = Level::main);

struct SubstitutionReport {
  std::size_t samples = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Samples rational points of every cell and checks
/// U(T-hat z) = T-hat^{eps |sigma(l)|}(U z) for commuting letters, that the
/// path avoids U(D) and that the visited cells spell sigma(l) (reversed when
/// eps = -1).
SubstitutionReport verify_substitution_conditions(const CaseData& cd, int domain, std::size_t samples,
                                                  Level level = Level::main, std::uint64_t seed = 1);

/// Random rational points of a region, from a grid of denominator `den`.
std::vector<Point> sample_region(const Region& r, unsigned d, std::size_t count, std::uint64_t seed,
                                 long den = 997);

/// Same, but restricted to a line given by one equality constraint when the
/// region is lower-dimensional.
std::vector<Point> sample_cell(const Cell& c, const Domain& dom, unsigned d, std::size_t count,
                               std::uint64_t seed);

}  // namespace qrot

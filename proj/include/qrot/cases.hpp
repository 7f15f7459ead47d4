#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrot/dynamics.hpp"
#include "qrot/region.hpp"
#include "qrot/subst.hpp"

namespace qrot {

/// U(z) = V^{-1}(kappa V(z)) with V(z) = factor * (z - v).
struct ScalingMap {
  QuadElem kappa;
  QuadElem factor;
  Point v;

  Point V(const Point& z) const;
  Point V_inv(const Point& w) const;
  Point U(const Point& z) const;
  Point U_inv(const Point& z) const;
  /// A constraint set on V(z) rewritten as a constraint set on z.
  Polytope from_frame(const Polytope& p) const;
  /// A constraint set on z rewritten as a constraint set on U^{-1}(z).
  Polytope scaled(const Polytope& p) const;
};

/// Part of a cell (usually a segment) whose return time differs from the
/// rest of the cell.
struct TauSplit {
  long tau = 0;
  Region region;  // already intersected with the cell
};

struct Cell {
  Letter label = 0;
  Region region;
  std::vector<long> taus;  // known return times; empty when not tabulated
  std::vector<TauSplit> splits;

  /// Tabulated return time off every split part, when it is unique.
  std::optional<long> generic_tau() const;
};

enum class ShatDirection { forward, backward };

/// Overrides the nearest-hit choice for points at position k of the
/// scaled path of cell `letter`.
struct ShatRule {
  Letter letter;
  long position;
  ShatDirection direction;
};

enum class ShatPolicy { nearest, forward };

/// Scaling, partition and substitution used for one renormalization level.
struct Renormalization {
  ScalingMap scaling;
  std::shared_ptr<const Alphabet> alphabet;  // letters of the cells
  std::vector<Cell> cells;
  std::optional<Substitution> sigma;         // alphabet -> (coding alphabet)*
  ShatPolicy policy = ShatPolicy::nearest;
  std::vector<ShatRule> rules;
  Region scaled_domain;                      // U(D_i) in torus coordinates
  // Letters l with U T-hat = T-hat^{eps |sigma(l)|} U on the cell; empty
  // means all. The other images only code the scaled path.
  std::vector<Letter> commuting;

  bool commutes(Letter l) const;

  const Cell* cell_of(const Point& z) const;
  const Cell* cell_of(const FastPoint& z, const FastFrame& f) const;
  std::size_t search_bound() const;          // max |sigma(l)|
};

struct Witness {
  Point z;
  std::vector<Point> v_cycle;  // expected S-cycle in V coordinates, from V(z)
  bool refined = false;        // cycle of the refined scaling
};

/// A point of the domain with a tabulated return time and T-hat period.
struct IsolatedPoint {
  Point z;
  long tau = 0;
  long hat_period = 0;
};

/// One scaling domain with its own renormalization data.
struct Domain {
  std::string name;
  Region region;  // torus coordinates, without the unit-square bounds
  Renormalization main;
  std::optional<Renormalization> refined;
  int epsilon = 1;
  QuadElem delta;
  std::vector<Witness> witnesses;
  std::vector<IsolatedPoint> isolated;

  bool contains(const Point& z) const;
  std::vector<BigInt> tau_weights() const;  // throws if some tau is not constant
};

/// Integer-valued closed form in n: integers, n, + - * / ^ and parentheses.
class PeriodFormula {
 public:
  PeriodFormula() = default;
  explicit PeriodFormula(std::string text);

  const std::string& text() const { return text_; }
  bool uses_n() const { return uses_n_; }
  /// Throws std::domain_error when the value is not an integer.
  BigInt operator()(long n) const;

 private:
  std::string text_;
  bool uses_n_ = false;
};

/// One row of a minimal-period table. When the formula uses n, the
/// representative at level n is U^n(point).
struct PeriodRow {
  std::string label;
  PeriodFormula formula;
  Point point;
};

class CaseData {
 public:
  static const CaseData& get(CaseTag tag);
  static CaseData parse(std::string_view text);

  const LambdaCase& lambda_case() const { return *lc_; }
  CaseTag tag() const { return lc_->tag; }
  const std::vector<Domain>& domains() const { return domains_; }
  const Domain& domain(int id) const { return domains_.at(static_cast<std::size_t>(id)); }
  long max_return() const { return max_return_; }
  const std::vector<PeriodRow>& period_rows() const { return period_rows_; }
  /// Representative of a row at level n.
  Point period_representative(const PeriodRow& row, long n) const;

  /// Index of the domain containing z, if any.
  std::optional<int> in_domain(const Point& z) const;
  std::optional<int> in_domain(const FastPoint& z, const FastFrame& f) const;
  bool in_union(const Point& z) const { return in_domain(z).has_value(); }
  const Cell* cell_of(const Point& z) const;

  Point scale(int domain, const Point& z) const;
  /// Throws std::domain_error when z is not in U(D).
  Point unscale(int domain, const Point& z) const;
  const QuadElem& delta_bound(int domain) const { return domain_at(domain).delta; }

 private:
  const Domain& domain_at(int id) const { return domains_.at(static_cast<std::size_t>(id)); }

  const LambdaCase* lc_ = nullptr;
  std::vector<Domain> domains_;
  std::vector<PeriodRow> period_rows_;
  long max_return_ = 1000;
};

struct RMembership {
  bool in_R = false;
  BigInt steps;  // period when in_R, else r(z)
  Point landing; // T^r(z) when not in R
};

/// Iterates T until D is reached or z recurs.
RMembership r_membership(const CaseData& cd, const Point& z, std::uint64_t budget = 50'000'000);

}  // namespace qrot

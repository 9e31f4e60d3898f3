#pragma once

// Classification of a loop under a rewrite strategy. For each step of the
// loop a finite set of (extended) matching problems is built such that the
// step respects the strategy at every unrolling level iff none of them is
// solvable; the problem-solver then decides them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loopcert/loop.hpp"
#include "loopcert/rewrite.hpp"
#include "loopcert/solver.hpp"
#include "loopcert/term.hpp"

namespace loopcert {

enum class StrategyKind {
  Full,
  Leftmost,
  Innermost,
  Outermost,
  LeftmostInnermost,
  LeftmostOutermost,
  Parallel,
  ParallelInnermost,
  ParallelOutermost,
  MaxParallel,
  MaxParallelInnermost,
  MaxParallelOutermost,
  Forbidden,
};

/// "full", "leftmost-innermost", "max-parallel-outermost", "forbidden", ...
std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view name);

struct StrategySpec {
  StrategyKind kind = StrategyKind::Full;
  /// Only used by Forbidden.
  std::vector<ForbiddenPattern> patterns;
  /// Display name; defaults to the kind's name.
  std::string name;

  static StrategySpec of(StrategyKind kind);
  static StrategySpec forbidden(std::vector<ForbiddenPattern> patterns, std::string name = "forbidden");

  /// Whether certificates with multi-position steps are meaningful.
  bool accepts_parallel_steps() const noexcept;
};

enum class ProblemFamily {
  LeftTerm,
  LeftTermVariable,
  LeftContext,
  LeftContextVariable,
  ParallelTerm,
  ParallelTermVariable,
  ParallelContext,
  ParallelContextVariable,
  Here,
  AboveInside,    // M1
  AboveVariable,  // M2
  BelowTerm,      // M3
  BelowContext,   // M4
};

std::string_view to_string(ProblemFamily family);

using Problem = std::variant<MatchingProblem, ExtendedMatchingProblem>;

std::string to_string(const Problem& problem);

/// A problem together with where it came from. `level_offset` bounds how many
/// unrollings beyond the solver's witness exponents a concrete violation can
/// need; it only sizes the concrete confirmation search.
struct Obligation {
  Problem problem;
  ProblemFamily family;
  std::size_t level_offset = 0;
};

/// Leftmost problems: the four families for a step at q. Throws
/// PositionOutOfTerm.
std::vector<Obligation> leftmost_problems(const Term& t, const Position& q, const Context& c,
                                          const Substitution& mu, const Trs& trs);

/// The same families with "left of" replaced by "parallel to every qᵢ" and
/// "parallel to the hole". Throws NotParallel or PositionOutOfTerm.
std::vector<Obligation> max_parallel_problems(const Term& t, std::span<const Position> qs, const Context& c,
                                              const Substitution& mu, const Trs& trs);

struct PositionSolution {
  std::size_t n0;
  /// o₀′ with p^{n₀}q = o₀′o
  Position prefix;

  friend bool operator==(const PositionSolution&, const PositionSolution&) = default;
};

/// Least n with p^n q = o′o for some o′, if any.
std::optional<PositionSolution> solve_position_equation(const Position& p, const Position& q, const Position& o);

/// Throws InvalidArgument unless pattern.kind is Here; PositionOutOfTerm if
/// q ∉ Pos(t).
std::vector<Obligation> h_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                                   const ForbiddenPattern& pattern);

struct AboveProblems {
  std::vector<Obligation> inside;     // M1
  std::vector<Obligation> variables;  // M2
};

/// Throws InvalidArgument unless pattern.kind is Above, VariableRedex if t|_q
/// is a variable.
AboveProblems a_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                         const ForbiddenPattern& pattern);

struct BelowProblems {
  std::vector<Obligation> term;     // M3
  std::vector<Obligation> context;  // M4
};

/// Throws InvalidArgument unless pattern.kind is Below.
BelowProblems b_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                         const ForbiddenPattern& pattern);

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

struct ConcreteViolation {
  std::size_t level;
  std::size_t step;
  /// Name of the failing check, e.g. "leftmost" or a rendered pattern.
  std::string check;
  Term term;
  std::vector<Position> positions;
};

struct Evidence {
  std::size_t step;
  /// Index of the redex within a parallel step, when the problem is per position.
  std::optional<std::size_t> position;
  Obligation obligation;
  std::optional<ForbiddenPattern> pattern;
  Witness witness;
  std::optional<ConcreteViolation> concrete;
};

struct OpenProblem {
  std::size_t step;
  Obligation obligation;
  std::optional<ForbiddenPattern> pattern;
};

struct DecisionStats {
  std::size_t problems = 0;
  std::size_t solvable = 0;
  std::size_t unsolvable = 0;
  std::size_t unknown = 0;
};

struct Verdict {
  enum class Kind { IsStrategyLoop, NotStrategyLoop, Unknown };

  Kind kind = Kind::Unknown;
  std::string strategy;
  std::optional<Evidence> evidence;
  std::vector<OpenProblem> open_problems;
  DecisionStats stats;
  SolverConfig config;
  std::vector<std::string> notes;
};

std::string_view to_string(Verdict::Kind kind);

/// Throws ShapeMismatch when a sequential-only strategy (leftmost, innermost,
/// outermost, their combinations, forbidden patterns) meets a certificate
/// with a multi-position step.
Verdict decide_loop(const Trs& trs, const ValidatedLoop& loop, const StrategySpec& spec,
                    const SolverConfig& config = {});

/// Name of the first check the step at `positions` of t fails under `spec`,
/// evaluated directly on the concrete term.
std::optional<std::string> concrete_check(const Term& t, std::span<const Position> positions, const Trs& trs,
                                          const StrategySpec& spec);

/// Scans levels 0..max_level of the unrolled loop, step by step.
std::optional<ConcreteViolation> find_concrete_violation(const Trs& trs, const ValidatedLoop& loop,
                                                         const StrategySpec& spec, std::size_t max_level);

}  // namespace loopcert

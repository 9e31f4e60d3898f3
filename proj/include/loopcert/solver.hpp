#pragma once

// Matching problems u ⋗ ℓ ("is uμ^n an instance of ℓ for some n?"), identity
// problems ("uμ^n = vμ^n for some n?") and extended matching problems
// ("D[t(C,μ)^m]μ^k = ℓσ for some m, k, σ?").
//
// The solvers are three-valued. Solvable answers carry a witness that is
// re-verified by direct computation before it is returned; Unsolvable answers
// carry the certificate that justified them; Unknown means the configured
// bound was exhausted without reaching either.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loopcert/term.hpp"

namespace loopcert {

struct SolverConfig {
  /// Maximal exponent explored by stepping and enumeration (m + k for
  /// extended problems).
  std::size_t bound = 64;
  /// Terms growing beyond this many nodes stop the search (answer Unknown).
  std::uint64_t max_term_size = std::uint64_t{1} << 20;
};

/// u ⋗ ℓ. Variables of `pattern` are matched; variables of `subject` are
/// instantiated by μ.
struct MatchPair {
  Term subject;
  Term pattern;
};

/// lhs μ^n = rhs μ^n, sharing the exponent of the enclosing problem.
struct TermIdentity {
  Term lhs;
  Term rhs;
};

/// All pairs and identities share one exponent n and one matcher σ.
struct MatchingProblem {
  std::vector<MatchPair> pairs;
  std::vector<TermIdentity> identities;
  Substitution mu;

  static MatchingProblem single(Term subject, Term pattern, Substitution mu);
  std::string to_string() const;
};

struct IdentityProblem {
  Term lhs;
  Term rhs;
  Substitution mu;

  std::string to_string() const;
};

/// (D, ℓ, C, t) over μ.
struct ExtendedMatchingProblem {
  Context outer;
  Term pattern;
  Context context;
  Term term;
  Substitution mu;

  std::string to_string() const;
};

enum class Certificate {
  /// Distinct function symbols meet; roots are stable under μ.
  RootClash,
  /// A variable whose μ-orbit only contains variables must match a non-variable.
  VariableOrbit,
  /// x = t with x strictly inside t can never hold after applying μ^n.
  OccursCheck,
  /// The simplified constraint state repeated; stepping μ further cannot help.
  Cycle,
  /// Every matching problem an extended problem reduces to is unsolvable.
  Decomposition,
};

std::string_view to_string(Certificate c);

struct Witness {
  /// Power of μ; for extended problems this is k.
  std::size_t n = 0;
  /// Unrollings of the context; set for extended problems only.
  std::optional<std::size_t> m;
  Substitution sigma;

  std::size_t total() const noexcept { return n + m.value_or(0); }
};

class SolverResult {
 public:
  enum class Status { Solvable, Unsolvable, Unknown };

  static SolverResult solvable(Witness w);
  static SolverResult unsolvable(Certificate c, std::string detail);
  static SolverResult unknown(std::size_t bound);

  Status status() const noexcept { return status_; }
  bool is_solvable() const noexcept { return status_ == Status::Solvable; }
  bool is_unsolvable() const noexcept { return status_ == Status::Unsolvable; }
  bool is_unknown() const noexcept { return status_ == Status::Unknown; }

  const Witness& witness() const;
  Certificate certificate() const;
  const std::string& detail() const noexcept { return detail_; }
  std::size_t bound() const noexcept { return bound_; }

  std::string to_string() const;

 private:
  explicit SolverResult(Status s) : status_(s) {}

  Status status_;
  std::optional<Witness> witness_;
  std::optional<Certificate> certificate_;
  std::string detail_;
  std::size_t bound_ = 0;
};

SolverResult solve_matching(const MatchingProblem& problem, const SolverConfig& config = {});
SolverResult solve_identity(const IdentityProblem& problem, const SolverConfig& config = {});
SolverResult solve_extended(const ExtendedMatchingProblem& problem, const SolverConfig& config = {});

/// Exhaustive search over exponents 0..bound (m + k <= bound for extended
/// problems, ordered by m + k then m) using only term primitives. Returns the
/// least witness found. Stops early, returning nothing, once a candidate term
/// exceeds 2^22 nodes.
std::optional<Witness> brute_force_check(const MatchingProblem& problem, std::size_t bound);
std::optional<Witness> brute_force_check(const IdentityProblem& problem, std::size_t bound);
std::optional<Witness> brute_force_check(const ExtendedMatchingProblem& problem, std::size_t bound);

/// Direct recomputation of a witness.
bool verify_witness(const MatchingProblem& problem, const Witness& w);
bool verify_witness(const IdentityProblem& problem, const Witness& w);
bool verify_witness(const ExtendedMatchingProblem& problem, const Witness& w);

}  // namespace loopcert

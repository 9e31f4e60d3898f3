#pragma once

// Rules, rewrite systems, single and parallel rewrite steps, and the concrete
// per-term strategy checks. The checks here are deliberately direct: they
// enumerate every position of the term and serve as the reference against
// which the symbolic deciders are tested.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loopcert/term.hpp"

namespace loopcert {

struct Rule {
  Term lhs;
  Term rhs;

  friend bool operator==(const Rule&, const Rule&) = default;
  std::string to_string() const { return lhs.to_string() + " -> " + rhs.to_string(); }
};

using Signature = std::map<std::string, std::size_t>;

/// A well-formed TRS: no variable left-hand sides, V(rhs) ⊆ V(lhs), every
/// symbol used with a single arity, and variables disjoint from symbols.
/// Rule indices are 0-based and stable.
class Trs {
 public:
  Trs(std::vector<Rule> rules, std::vector<std::string> variables);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const Rule& rule(std::size_t index) const;
  std::size_t size() const noexcept { return rules_.size(); }

  const Signature& signature() const noexcept { return signature_; }
  std::optional<std::size_t> arity(const std::string& symbol) const;
  /// Declared variables in declaration order.
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  bool is_variable(const std::string& name) const;

  friend bool operator==(const Trs& a, const Trs& b) {
    return a.rules_ == b.rules_ && a.variables_ == b.variables_;
  }

 private:
  std::vector<Rule> rules_;
  std::vector<std::string> variables_;
  VariableSet variable_set_;
  Signature signature_;
};

/// Records symbol arities of `t` into `signature`; throws ArityMismatch on conflict.
void extend_signature(const Term& t, Signature& signature);

enum class PatternKind { Here, Above, Below };

std::string_view to_string(PatternKind kind);  // "h", "a", "b"

/// (ℓ, o, λ): forbids a step at o (h), strictly above o (a), or strictly
/// below o (b) inside any instance of ℓ.
struct ForbiddenPattern {
  ForbiddenPattern(Term lhs, Position pos, PatternKind kind);

  Term lhs;
  Position pos;
  PatternKind kind;

  friend bool operator==(const ForbiddenPattern&, const ForbiddenPattern&) = default;
  std::string to_string() const;
};

// ---------------------------------------------------------------------------
// Matching and rewriting
// ---------------------------------------------------------------------------

/// Extends `binding` so that pattern·binding = subject. Leaves `binding`
/// partially updated on failure.
bool match_into(const Term& pattern, const Term& subject, std::map<std::string, Term>& binding);

/// σ with pattern·σ = subject, if any.
std::optional<Substitution> match_pattern(const Term& pattern, const Term& subject);

struct Redex {
  Position pos;
  std::size_t rule;

  friend bool operator==(const Redex&, const Redex&) = default;
  friend auto operator<=>(const Redex&, const Redex&) = default;
};

/// All (p, i) such that rule i matches t|_p, in pre-order then rule order.
std::vector<Redex> redex_positions(const Term& t, const Trs& trs);
bool is_redex(const Term& t, const Trs& trs);

/// Throws NotARedex or PositionOutOfTerm.
Term rewrite_at(const Term& t, const Position& q, const Rule& rule);

using RewriteStep = Redex;

/// Simultaneous reduction at pairwise parallel positions.
/// Throws NotParallel, NotARedex, PositionOutOfTerm, RuleIndexOutOfRange.
Term parallel_rewrite(const Term& t, std::span<const RewriteStep> steps, const Trs& trs);

bool pairwise_parallel(std::span<const Position> positions);

// ---------------------------------------------------------------------------
// Concrete strategy checks
// ---------------------------------------------------------------------------

class ConcreteStrategy {
 public:
  enum class Kind { Full, Leftmost, Innermost, Outermost, MaxParallel, Forbidden };

  static ConcreteStrategy full() { return ConcreteStrategy(Kind::Full); }
  static ConcreteStrategy leftmost() { return ConcreteStrategy(Kind::Leftmost); }
  static ConcreteStrategy innermost() { return ConcreteStrategy(Kind::Innermost); }
  static ConcreteStrategy outermost() { return ConcreteStrategy(Kind::Outermost); }
  static ConcreteStrategy max_parallel() { return ConcreteStrategy(Kind::MaxParallel); }
  static ConcreteStrategy forbidden(std::vector<ForbiddenPattern> patterns);

  Kind kind() const noexcept { return kind_; }
  const std::vector<ForbiddenPattern>& patterns() const noexcept { return patterns_; }

 private:
  explicit ConcreteStrategy(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::vector<ForbiddenPattern> patterns_;
};

/// Whether reducing t simultaneously at `positions` is allowed by `s`.
/// Leftmost and Forbidden only admit a single position. Throws NotARedex if
/// some position is not a redex of t.
bool strategy_allows(const Term& t, std::span<const Position> positions, const Trs& trs,
                     const ConcreteStrategy& s);

/// Whether a step at q is blocked by a single forbidden pattern somewhere in t.
bool pattern_forbids(const Term& t, const Position& q, const ForbiddenPattern& pattern);

// ---------------------------------------------------------------------------
// Strategy encodings as forbidden patterns
// ---------------------------------------------------------------------------

struct InnermostEncoding {};
struct OutermostEncoding {};
/// Innermost-style restriction w.r.t. the left-hand sides of Q.
struct QRestrictedEncoding {
  std::vector<Term> lhs;
};
/// Replacement map: symbol -> 1-based argument indices where rewriting is allowed.
/// Symbols missing from the map keep every argument replaceable.
struct ContextSensitiveEncoding {
  std::map<std::string, std::vector<int>> replacement;
};

using PatternEncoding =
    std::variant<InnermostEncoding, OutermostEncoding, QRestrictedEncoding, ContextSensitiveEncoding>;

/// Throws ArityMismatch if a replacement map entry does not fit the signature.
std::vector<ForbiddenPattern> builtin_patterns(const PatternEncoding& encoding, const Trs& trs);

}  // namespace loopcert

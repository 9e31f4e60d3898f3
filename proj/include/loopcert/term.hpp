#pragma once

// First-order terms, positions, substitutions and contexts.
//
// Terms are immutable values backed by shared nodes; copying a Term is a
// reference-count bump and equality is structural. Positions are 1-based
// paths into a term (the empty path is the root). A Context is a term with
// exactly one occurrence of the reserved nullary hole symbol `[]`.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace loopcert {

inline constexpr std::string_view kHoleSymbol = "[]";

// ---------------------------------------------------------------------------
// Positions
// ---------------------------------------------------------------------------

class Position {
 public:
  Position() = default;
  Position(std::initializer_list<int> indices);
  explicit Position(std::vector<int> indices);

  static Position root() { return {}; }

  bool is_root() const noexcept { return indices_.empty(); }
  std::size_t size() const noexcept { return indices_.size(); }
  const std::vector<int>& indices() const noexcept { return indices_; }
  int operator[](std::size_t i) const { return indices_[i]; }

  Position child(int index) const;
  Position prefix(std::size_t length) const;
  /// p^n; p^0 is the root.
  Position power(std::size_t n) const;

  /// p <= q
  bool is_prefix_of(const Position& q) const noexcept;
  /// p < q
  bool is_strict_prefix_of(const Position& q) const noexcept;
  bool is_parallel_to(const Position& q) const noexcept;
  bool has_suffix(const Position& suffix) const noexcept;

  /// If this = prefix.rest, returns rest.
  std::optional<Position> strip_prefix(const Position& prefix) const;

  friend Position operator+(const Position& a, const Position& b);
  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;

  /// "1.2.3", or "eps" for the root.
  std::string to_string() const;

 private:
  std::vector<int> indices_;
};

std::ostream& operator<<(std::ostream& os, const Position& p);

enum class PositionRelation { Equal, StrictlyAbove, StrictlyBelow, LeftOf, RightOf };

std::string_view to_string(PositionRelation relation);

PositionRelation position_relation(const Position& p, const Position& q);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Application };

  static Term variable(std::string name);
  static Term apply(std::string symbol, std::vector<Term> args = {});
  static Term hole();

  Kind kind() const noexcept;
  bool is_variable() const noexcept { return kind() == Kind::Variable; }
  bool is_application() const noexcept { return kind() == Kind::Application; }
  bool is_hole() const noexcept;

  /// Variable name or function symbol.
  const std::string& name() const noexcept;
  std::span<const Term> args() const noexcept;
  std::size_t arity() const noexcept;
  /// 0-based argument access; positions use 1-based indices.
  const Term& arg(std::size_t i) const;

  /// Number of nodes, saturating at UINT64_MAX.
  std::uint64_t size() const noexcept;
  std::size_t depth() const noexcept;
  std::size_t hash() const noexcept;
  bool is_ground() const noexcept;
  std::size_t hole_count() const noexcept;
  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

std::ostream& operator<<(std::ostream& os, const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

using VariableSet = std::set<std::string>;

/// Pos(t) in pre-order (parents before children, left to right).
std::vector<Position> positions(const Term& t);
bool is_position_of(const Term& t, const Position& p);

/// t|_p. Throws PositionOutOfTerm.
Term subterm_at(const Term& t, const Position& p);
/// t[s]_p. Throws PositionOutOfTerm.
Term replace_at(const Term& t, const Position& p, const Term& s);

/// V(t)
VariableSet variables(const Term& t);
void collect_variables(const Term& t, VariableSet& out);
bool occurs_in(const std::string& variable, const Term& t);

/// Every u with u ⊴ t, deduplicated, in pre-order of first occurrence.
std::vector<Term> subterms(const Term& t);

// ---------------------------------------------------------------------------
// Substitutions
// ---------------------------------------------------------------------------

/// Finite-domain substitution. Identity bindings x/x are dropped on insertion
/// and the hole symbol may not occur in the range.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<std::string, Term>> bindings);

  void bind(const std::string& variable, Term value);
  const Term* find(const std::string& variable) const;
  bool contains(const std::string& variable) const { return find(variable) != nullptr; }

  bool empty() const noexcept { return map_.empty(); }
  std::size_t size() const noexcept { return map_.size(); }
  const std::map<std::string, Term>& bindings() const noexcept { return map_; }
  VariableSet domain() const;

  /// tμ (one simultaneous application).
  Term operator()(const Term& t) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

  /// "{x/s(x), y/z}"
  std::string to_string() const;

 private:
  std::map<std::string, Term> map_;
};

std::ostream& operator<<(std::ostream& os, const Substitution& mu);

/// tμ^n
Term apply_substitution(const Term& t, const Substitution& mu, std::size_t n = 1);

/// Least set W ⊇ V(t) closed under x ∈ W ⇒ V(xμ) ⊆ W, i.e. ⋃_k V(tμ^k).
VariableSet variable_closure(const Term& t, const Substitution& mu);

// ---------------------------------------------------------------------------
// Contexts
// ---------------------------------------------------------------------------

/// Position of the unique hole in `body`. Throws MalformedContext.
Position hole_position(const Term& body);

class Context {
 public:
  /// The empty context □.
  Context();
  /// Throws MalformedContext unless `body` has exactly one hole.
  explicit Context(Term body);

  const Term& body() const noexcept { return body_; }
  const Position& hole() const noexcept { return hole_; }
  bool is_empty() const noexcept { return hole_.is_root(); }

  /// C[t]
  Term fill(const Term& t) const;
  /// Cμ
  Context instantiate(const Substitution& mu) const;
  /// C[D]
  Context compose(const Context& inner) const;
  /// C|_p as a plain term (contains the hole iff p <= hole()).
  Term at(const Position& p) const { return subterm_at(body_, p); }
  /// C|_p for p <= hole(), as a context.
  Context subcontext(const Position& p) const;

  friend bool operator==(const Context& a, const Context& b) { return a.body_ == b.body_; }

  std::string to_string() const { return body_.to_string(); }

 private:
  Term body_;
  Position hole_;
};

Position hole_position(const Context& c);

std::ostream& operator<<(std::ostream& os, const Context& c);

struct ContextSubstitution {
  ContextSubstitution(Context c, Substitution mu);

  Context context;
  Substitution subst;
};

/// t(C,μ)^0 = t, t(C,μ)^{n+1} = C[t(C,μ)^n μ].
Term apply_context_substitution(const Term& t, const ContextSubstitution& cs, std::size_t n);

}  // namespace loopcert

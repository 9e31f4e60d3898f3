#include "loopcert/term.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "loopcert/error.hpp"

namespace loopcert {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PositionOutOfTerm: return "PositionOutOfTerm";
    case ErrorKind::MalformedContext: return "MalformedContext";
    case ErrorKind::NotARedex: return "NotARedex";
    case ErrorKind::NotParallel: return "NotParallel";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::ClosingMismatch: return "ClosingMismatch";
    case ErrorKind::VariableRedex: return "VariableRedex";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::VariableLhs: return "VariableLhs";
    case ErrorKind::ExtraRhsVariable: return "ExtraRhsVariable";
    case ErrorKind::RuleIndexOutOfRange: return "RuleIndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::SyntaxError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Positions
// ---------------------------------------------------------------------------

Position::Position(std::initializer_list<int> indices) : Position(std::vector<int>(indices)) {}

Position::Position(std::vector<int> indices) : indices_(std::move(indices)) {
  for (int i : indices_) {
    if (i < 1) throw Error(ErrorKind::InvalidArgument, "position indices are 1-based");
  }
}

Position Position::child(int index) const {
  std::vector<int> out = indices_;
  out.push_back(index);
  return Position(std::move(out));
}

Position Position::prefix(std::size_t length) const {
  Position out;
  out.indices_.assign(indices_.begin(),
                      indices_.begin() + static_cast<std::ptrdiff_t>(std::min(length, size())));
  return out;
}

Position Position::power(std::size_t n) const {
  Position out;
  out.indices_.reserve(size() * n);
  for (std::size_t i = 0; i < n; ++i) {
    out.indices_.insert(out.indices_.end(), indices_.begin(), indices_.end());
  }
  return out;
}

bool Position::is_prefix_of(const Position& q) const noexcept {
  return size() <= q.size() && std::equal(indices_.begin(), indices_.end(), q.indices_.begin());
}

bool Position::is_strict_prefix_of(const Position& q) const noexcept {
  return size() < q.size() && is_prefix_of(q);
}

bool Position::is_parallel_to(const Position& q) const noexcept {
  return !is_prefix_of(q) && !q.is_prefix_of(*this);
}

bool Position::has_suffix(const Position& suffix) const noexcept {
  return suffix.size() <= size() &&
         std::equal(suffix.indices_.rbegin(), suffix.indices_.rend(), indices_.rbegin());
}

std::optional<Position> Position::strip_prefix(const Position& prefix) const {
  if (!prefix.is_prefix_of(*this)) return std::nullopt;
  Position out;
  out.indices_.assign(indices_.begin() + static_cast<std::ptrdiff_t>(prefix.size()),
                      indices_.end());
  return out;
}

Position operator+(const Position& a, const Position& b) {
  Position out = a;
  out.indices_.insert(out.indices_.end(), b.indices_.begin(), b.indices_.end());
  return out;
}

std::string Position::to_string() const {
  if (is_root()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(indices_[i]);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Position& p) { return os << p.to_string(); }

std::string_view to_string(PositionRelation relation) {
  switch (relation) {
    case PositionRelation::Equal: return "Equal";
    case PositionRelation::StrictlyAbove: return "StrictlyAbove";
    case PositionRelation::StrictlyBelow: return "StrictlyBelow";
    case PositionRelation::LeftOf: return "LeftOf";
    case PositionRelation::RightOf: return "RightOf";
  }
  return "?";
}

PositionRelation position_relation(const Position& p, const Position& q) {
  const std::size_t common = std::min(p.size(), q.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (p[i] != q[i]) return p[i] < q[i] ? PositionRelation::LeftOf : PositionRelation::RightOf;
  }
  if (p.size() == q.size()) return PositionRelation::Equal;
  return p.size() < q.size() ? PositionRelation::StrictlyAbove : PositionRelation::StrictlyBelow;
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Term::Node {
  Kind kind;
  std::string name;
  std::vector<Term> args;
  std::uint64_t size = 1;
  std::size_t depth = 0;
  std::size_t hash = 0;
  std::size_t holes = 0;
  bool ground = true;
};

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term Term::variable(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Variable;
  node->hash = mix(0x51ed27, std::hash<std::string>{}(name));
  node->name = std::move(name);
  node->ground = false;
  return Term(std::move(node));
}

Term Term::apply(std::string symbol, std::vector<Term> args) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Application;
  std::size_t h = mix(0xa99, std::hash<std::string>{}(symbol));
  for (const Term& a : args) {
    node->size = saturating_add(node->size, a.size());
    node->depth = std::max(node->depth, a.depth() + 1);
    node->holes = saturating_add(node->holes, a.hole_count());
    node->ground = node->ground && a.is_ground();
    h = mix(h, a.hash());
  }
  if (symbol == kHoleSymbol) {
    if (!args.empty()) throw Error(ErrorKind::MalformedContext, "the hole symbol is nullary");
    node->holes = 1;
  }
  node->hash = mix(h, args.size());
  node->name = std::move(symbol);
  node->args = std::move(args);
  return Term(std::move(node));
}

Term Term::hole() {
  static const Term h = apply(std::string(kHoleSymbol));
  return h;
}

Term::Kind Term::kind() const noexcept { return node_->kind; }
bool Term::is_hole() const noexcept {
  return node_->kind == Kind::Application && node_->name == kHoleSymbol;
}
const std::string& Term::name() const noexcept { return node_->name; }
std::span<const Term> Term::args() const noexcept { return node_->args; }
std::size_t Term::arity() const noexcept { return node_->args.size(); }
const Term& Term::arg(std::size_t i) const {
  if (i >= node_->args.size()) throw Error(ErrorKind::PositionOutOfTerm, "argument index out of range");
  return node_->args[i];
}
std::uint64_t Term::size() const noexcept { return node_->size; }
std::size_t Term::depth() const noexcept { return node_->depth; }
std::size_t Term::hash() const noexcept { return node_->hash; }
bool Term::is_ground() const noexcept { return node_->ground; }
std::size_t Term::hole_count() const noexcept { return node_->holes; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind ||
      a.node_->size != b.node_->size || a.node_->name != b.node_->name ||
      a.node_->args.size() != b.node_->args.size()) {
    return false;
  }
  return std::equal(a.node_->args.begin(), a.node_->args.end(), b.node_->args.begin());
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  if (auto c = a.node_->args.size() <=> b.node_->args.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.node_->args.size(); ++i) {
    if (auto c = a.node_->args[i] <=> b.node_->args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

namespace {

void render(const Term& t, std::string& out) {
  out += t.name();
  if (t.arity() == 0) return;
  out += '(';
  bool first = true;
  for (const Term& a : t.args()) {
    if (!first) out += ',';
    first = false;
    render(a, out);
  }
  out += ')';
}

}  // namespace

std::string Term::to_string() const {
  std::string out;
  render(*this, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << t.to_string(); }

namespace {

void collect_positions(const Term& t, Position& current, std::vector<Position>& out) {
  out.push_back(current);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    current = current.child(static_cast<int>(i + 1));
    collect_positions(t.arg(i), current, out);
    current = current.prefix(current.size() - 1);
  }
}

[[noreturn]] void out_of_term(const Term& t, const Position& p) {
  throw Error(ErrorKind::PositionOutOfTerm, p.to_string() + " is not a position of " + t.to_string());
}

}  // namespace

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position current;
  collect_positions(t, current, out);
  return out;
}

bool is_position_of(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p.indices()) {
    if (static_cast<std::size_t>(i) > cur->arity()) return false;
    cur = &cur->arg(static_cast<std::size_t>(i - 1));
  }
  return true;
}

Term subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p.indices()) {
    if (static_cast<std::size_t>(i) > cur->arity()) out_of_term(t, p);
    cur = &cur->arg(static_cast<std::size_t>(i - 1));
  }
  return *cur;
}

namespace {

Term replace_from(const Term& t, const Position& p, std::size_t depth, const Term& s,
                  const Term& whole) {
  if (depth == p.size()) return s;
  const auto i = static_cast<std::size_t>(p[depth]);
  if (i > t.arity()) out_of_term(whole, p);
  std::vector<Term> args(t.args().begin(), t.args().end());
  args[i - 1] = replace_from(args[i - 1], p, depth + 1, s, whole);
  return Term::apply(t.name(), std::move(args));
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& s) { return replace_from(t, p, 0, s, t); }

void collect_variables(const Term& t, VariableSet& out) {
  if (t.is_ground()) return;
  if (t.is_variable()) {
    out.insert(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_variables(a, out);
}

VariableSet variables(const Term& t) {
  VariableSet out;
  collect_variables(t, out);
  return out;
}

bool occurs_in(const std::string& variable, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_variable()) return t.name() == variable;
  return std::any_of(t.args().begin(), t.args().end(),
                     [&](const Term& a) { return occurs_in(variable, a); });
}

std::vector<Term> subterms(const Term& t) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    out.push_back(cur);
    for (auto it = cur.args().rbegin(); it != cur.args().rend(); ++it) stack.push_back(*it);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitutions
// ---------------------------------------------------------------------------

Substitution::Substitution(std::initializer_list<std::pair<std::string, Term>> bindings) {
  for (const auto& [x, t] : bindings) bind(x, t);
}

void Substitution::bind(const std::string& variable, Term value) {
  if (value.hole_count() != 0) {
    throw Error(ErrorKind::MalformedContext, "the hole may not occur in the range of a substitution");
  }
  if (value.is_variable() && value.name() == variable) {
    map_.erase(variable);
    return;
  }
  map_.insert_or_assign(variable, std::move(value));
}

const Term* Substitution::find(const std::string& variable) const {
  auto it = map_.find(variable);
  return it == map_.end() ? nullptr : &it->second;
}

VariableSet Substitution::domain() const {
  VariableSet out;
  for (const auto& [x, _] : map_) out.insert(x);
  return out;
}

Term Substitution::operator()(const Term& t) const {
  if (t.is_ground() || map_.empty()) return t;
  if (t.is_variable()) {
    const Term* v = find(t.name());
    return v ? *v : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back((*this)(a));
    changed = changed || !args.back().same_node(a);
  }
  return changed ? Term::apply(t.name(), std::move(args)) : t;
}

std::string Substitution::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : map_) {
    if (!first) out += ", ";
    first = false;
    out += x + "/" + t.to_string();
  }
  return out + "}";
}

std::ostream& operator<<(std::ostream& os, const Substitution& mu) { return os << mu.to_string(); }

Term apply_substitution(const Term& t, const Substitution& mu, std::size_t n) {
  Term out = t;
  for (std::size_t i = 0; i < n && !out.is_ground(); ++i) out = mu(out);
  return out;
}

VariableSet variable_closure(const Term& t, const Substitution& mu) {
  VariableSet closure = variables(t);
  std::vector<std::string> work(closure.begin(), closure.end());
  while (!work.empty()) {
    const std::string x = work.back();
    work.pop_back();
    const Term* image = mu.find(x);
    if (!image) continue;
    for (const std::string& y : variables(*image)) {
      if (closure.insert(y).second) work.push_back(y);
    }
  }
  return closure;
}

// ---------------------------------------------------------------------------
// Contexts
// ---------------------------------------------------------------------------

namespace {

bool find_hole(const Term& t, Position& current) {
  if (t.is_hole()) return true;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (t.arg(i).hole_count() == 0) continue;
    current = current.child(static_cast<int>(i + 1));
    return find_hole(t.arg(i), current);
  }
  return false;
}

}  // namespace

Position hole_position(const Term& body) {
  if (body.hole_count() != 1) {
    throw Error(ErrorKind::MalformedContext,
                body.to_string() + " contains " + std::to_string(body.hole_count()) +
                    " holes, expected exactly one");
  }
  Position p;
  find_hole(body, p);
  return p;
}

Context::Context() : body_(Term::hole()) {}

Context::Context(Term body) : body_(std::move(body)), hole_(hole_position(body_)) {}

Term Context::fill(const Term& t) const { return replace_at(body_, hole_, t); }

Context Context::instantiate(const Substitution& mu) const { return Context(mu(body_)); }

Context Context::compose(const Context& inner) const { return Context(fill(inner.body())); }

Context Context::subcontext(const Position& p) const {
  if (!p.is_prefix_of(hole_)) {
    throw Error(ErrorKind::MalformedContext, p.to_string() + " is not above the hole of " + to_string());
  }
  return Context(subterm_at(body_, p));
}

Position hole_position(const Context& c) { return c.hole(); }

std::ostream& operator<<(std::ostream& os, const Context& c) { return os << c.body(); }

ContextSubstitution::ContextSubstitution(Context c, Substitution mu)
    : context(std::move(c)), subst(std::move(mu)) {}

Term apply_context_substitution(const Term& t, const ContextSubstitution& cs, std::size_t n) {
  Term out = t;
  for (std::size_t i = 0; i < n; ++i) out = cs.context.fill(cs.subst(out));
  return out;
}

}  // namespace loopcert

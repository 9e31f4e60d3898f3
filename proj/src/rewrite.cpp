#include "loopcert/rewrite.hpp"

#include <algorithm>
#include <set>

#include "loopcert/error.hpp"

namespace loopcert {

// ---------------------------------------------------------------------------
// Trs
// ---------------------------------------------------------------------------

void extend_signature(const Term& t, Signature& signature) {
  if (t.is_variable()) return;
  auto [it, inserted] = signature.emplace(t.name(), t.arity());
  if (!inserted && it->second != t.arity()) {
    throw Error(ErrorKind::ArityMismatch, "symbol " + t.name() + " used with arities " +
                                              std::to_string(it->second) + " and " +
                                              std::to_string(t.arity()));
  }
  for (const Term& a : t.args()) extend_signature(a, signature);
}

Trs::Trs(std::vector<Rule> rules, std::vector<std::string> variables)
    : rules_(std::move(rules)), variables_(std::move(variables)) {
  variable_set_.insert(variables_.begin(), variables_.end());
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    const std::string where = "rule " + std::to_string(i) + " (" + r.to_string() + ")";
    if (r.lhs.is_variable()) throw Error(ErrorKind::VariableLhs, where);
    if (r.lhs.hole_count() != 0 || r.rhs.hole_count() != 0) {
      throw Error(ErrorKind::InvalidArgument, where + " uses the reserved hole symbol");
    }
    const VariableSet lhs_vars = loopcert::variables(r.lhs);
    for (const std::string& x : loopcert::variables(r.rhs)) {
      if (!lhs_vars.contains(x)) throw Error(ErrorKind::ExtraRhsVariable, where + ": " + x);
    }
    extend_signature(r.lhs, signature_);
    extend_signature(r.rhs, signature_);
  }
  for (const auto& [symbol, _] : signature_) {
    if (variable_set_.contains(symbol)) {
      throw Error(ErrorKind::ArityMismatch, symbol + " is declared as a variable but used as a symbol");
    }
  }
}

const Rule& Trs::rule(std::size_t index) const {
  if (index >= rules_.size()) {
    throw Error(ErrorKind::RuleIndexOutOfRange,
                "rule " + std::to_string(index) + " of " + std::to_string(rules_.size()));
  }
  return rules_[index];
}

std::optional<std::size_t> Trs::arity(const std::string& symbol) const {
  auto it = signature_.find(symbol);
  if (it == signature_.end()) return std::nullopt;
  return it->second;
}

bool Trs::is_variable(const std::string& name) const { return variable_set_.contains(name); }

// ---------------------------------------------------------------------------
// Forbidden patterns
// ---------------------------------------------------------------------------

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::Here: return "h";
    case PatternKind::Above: return "a";
    case PatternKind::Below: return "b";
  }
  return "?";
}

ForbiddenPattern::ForbiddenPattern(Term l, Position o, PatternKind k)
    : lhs(std::move(l)), pos(std::move(o)), kind(k) {
  if (!is_position_of(lhs, pos)) {
    throw Error(ErrorKind::PositionOutOfTerm, pos.to_string() + " is not a position of " + lhs.to_string());
  }
}

std::string ForbiddenPattern::to_string() const {
  return "(" + lhs.to_string() + ", " + pos.to_string() + ", " + std::string(loopcert::to_string(kind)) + ")";
}

// ---------------------------------------------------------------------------
// Matching and rewriting
// ---------------------------------------------------------------------------

bool match_into(const Term& pattern, const Term& subject, std::map<std::string, Term>& binding) {
  if (pattern.is_variable()) {
    auto [it, inserted] = binding.emplace(pattern.name(), subject);
    return inserted || it->second == subject;
  }
  if (subject.is_variable() || pattern.name() != subject.name() || pattern.arity() != subject.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    if (!match_into(pattern.arg(i), subject.arg(i), binding)) return false;
  }
  return true;
}

std::optional<Substitution> match_pattern(const Term& pattern, const Term& subject) {
  std::map<std::string, Term> binding;
  if (!match_into(pattern, subject, binding)) return std::nullopt;
  Substitution sigma;
  for (auto& [x, t] : binding) sigma.bind(x, t);
  return sigma;
}

namespace {

bool matches(const Term& pattern, const Term& subject) {
  std::map<std::string, Term> binding;
  return match_into(pattern, subject, binding);
}

bool any_rule_matches(const Term& subject, const Trs& trs) {
  if (subject.is_variable()) return false;
  return std::any_of(trs.rules().begin(), trs.rules().end(),
                     [&](const Rule& r) { return matches(r.lhs, subject); });
}

void collect_redexes(const Term& t, const Trs& trs, Position& current, std::vector<Redex>& out) {
  if (t.is_application()) {
    for (std::size_t i = 0; i < trs.size(); ++i) {
      if (matches(trs.rule(i).lhs, t)) out.push_back({current, i});
    }
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    current = current.child(static_cast<int>(i + 1));
    collect_redexes(t.arg(i), trs, current, out);
    current = current.prefix(current.size() - 1);
  }
}

void collect_redex_positions(const Term& t, const Trs& trs, Position& current,
                             std::vector<Position>& out) {
  if (any_rule_matches(t, trs)) out.push_back(current);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    current = current.child(static_cast<int>(i + 1));
    collect_redex_positions(t.arg(i), trs, current, out);
    current = current.prefix(current.size() - 1);
  }
}

std::vector<Position> redex_position_list(const Term& t, const Trs& trs) {
  std::vector<Position> out;
  Position current;
  collect_redex_positions(t, trs, current, out);
  return out;
}

}  // namespace

std::vector<Redex> redex_positions(const Term& t, const Trs& trs) {
  std::vector<Redex> out;
  Position current;
  collect_redexes(t, trs, current, out);
  return out;
}

bool is_redex(const Term& t, const Trs& trs) { return any_rule_matches(t, trs); }

Term rewrite_at(const Term& t, const Position& q, const Rule& rule) {
  const Term redex = subterm_at(t, q);
  auto sigma = match_pattern(rule.lhs, redex);
  if (!sigma) {
    throw Error(ErrorKind::NotARedex, redex.to_string() + " at " + q.to_string() +
                                          " is not an instance of " + rule.lhs.to_string());
  }
  return replace_at(t, q, (*sigma)(rule.rhs));
}

bool pairwise_parallel(std::span<const Position> positions) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if (!positions[i].is_parallel_to(positions[j])) return false;
    }
  }
  return true;
}

Term parallel_rewrite(const Term& t, std::span<const RewriteStep> steps, const Trs& trs) {
  if (steps.empty()) throw Error(ErrorKind::NotParallel, "a parallel step needs at least one position");
  std::vector<Position> ps;
  for (const RewriteStep& s : steps) ps.push_back(s.pos);
  if (!pairwise_parallel(ps)) throw Error(ErrorKind::NotParallel, "positions are not pairwise parallel");
  Term out = t;
  for (const RewriteStep& s : steps) out = rewrite_at(out, s.pos, trs.rule(s.rule));
  return out;
}

// ---------------------------------------------------------------------------
// Concrete strategy checks
// ---------------------------------------------------------------------------

ConcreteStrategy ConcreteStrategy::forbidden(std::vector<ForbiddenPattern> patterns) {
  ConcreteStrategy s(Kind::Forbidden);
  s.patterns_ = std::move(patterns);
  return s;
}

bool pattern_forbids(const Term& t, const Position& q, const ForbiddenPattern& pattern) {
  for (const Position& o1 : positions(t)) {
    const Position target = o1 + pattern.pos;
    bool related = false;
    switch (pattern.kind) {
      case PatternKind::Here: related = q == target; break;
      case PatternKind::Above: related = q.is_strict_prefix_of(target); break;
      case PatternKind::Below: related = target.is_strict_prefix_of(q); break;
    }
    if (related && matches(pattern.lhs, subterm_at(t, o1))) return true;
  }
  return false;
}

bool strategy_allows(const Term& t, std::span<const Position> positions, const Trs& trs,
                     const ConcreteStrategy& s) {
  if (positions.empty()) throw Error(ErrorKind::InvalidArgument, "no positions given");
  const std::vector<Position> redexes = redex_position_list(t, trs);
  const std::set<Position> redex_set(redexes.begin(), redexes.end());
  for (const Position& q : positions) {
    if (!redex_set.contains(q)) {
      throw Error(ErrorKind::NotARedex, q.to_string() + " is not a redex position of " + t.to_string());
    }
  }
  switch (s.kind()) {
    case ConcreteStrategy::Kind::Full:
      return true;
    case ConcreteStrategy::Kind::Leftmost: {
      if (positions.size() != 1) return false;
      return std::none_of(redexes.begin(), redexes.end(), [&](const Position& r) {
        return position_relation(r, positions[0]) == PositionRelation::LeftOf;
      });
    }
    case ConcreteStrategy::Kind::Innermost:
      return std::all_of(positions.begin(), positions.end(), [&](const Position& q) {
        return std::none_of(redexes.begin(), redexes.end(),
                            [&](const Position& r) { return q.is_strict_prefix_of(r); });
      });
    case ConcreteStrategy::Kind::Outermost:
      return std::all_of(positions.begin(), positions.end(), [&](const Position& q) {
        return std::none_of(redexes.begin(), redexes.end(),
                            [&](const Position& r) { return r.is_strict_prefix_of(q); });
      });
    case ConcreteStrategy::Kind::MaxParallel: {
      if (!pairwise_parallel(positions)) return false;
      return std::none_of(redexes.begin(), redexes.end(), [&](const Position& r) {
        return std::all_of(positions.begin(), positions.end(),
                           [&](const Position& q) { return r.is_parallel_to(q); });
      });
    }
    case ConcreteStrategy::Kind::Forbidden: {
      if (positions.size() != 1) return false;
      return std::none_of(s.patterns().begin(), s.patterns().end(), [&](const ForbiddenPattern& pat) {
        return pattern_forbids(t, positions[0], pat);
      });
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Encodings
// ---------------------------------------------------------------------------

namespace {

struct EncodingVisitor {
  const Trs& trs;

  std::vector<ForbiddenPattern> operator()(const InnermostEncoding&) const {
    std::vector<ForbiddenPattern> out;
    for (const Rule& r : trs.rules()) out.emplace_back(r.lhs, Position::root(), PatternKind::Above);
    return out;
  }

  std::vector<ForbiddenPattern> operator()(const OutermostEncoding&) const {
    std::vector<ForbiddenPattern> out;
    for (const Rule& r : trs.rules()) out.emplace_back(r.lhs, Position::root(), PatternKind::Below);
    return out;
  }

  std::vector<ForbiddenPattern> operator()(const QRestrictedEncoding& q) const {
    std::vector<ForbiddenPattern> out;
    for (const Term& l : q.lhs) out.emplace_back(l, Position::root(), PatternKind::Above);
    return out;
  }

  std::vector<ForbiddenPattern> operator()(const ContextSensitiveEncoding& cs) const {
    for (const auto& [symbol, indices] : cs.replacement) {
      auto arity = trs.arity(symbol);
      if (!arity) throw Error(ErrorKind::ArityMismatch, "replacement map names unknown symbol " + symbol);
      for (int i : indices) {
        if (i < 1 || static_cast<std::size_t>(i) > *arity) {
          throw Error(ErrorKind::ArityMismatch, "argument " + std::to_string(i) + " of " + symbol + "/" +
                                                    std::to_string(*arity));
        }
      }
    }
    std::vector<ForbiddenPattern> out;
    for (const auto& [symbol, arity] : trs.signature()) {
      if (arity == 0) continue;
      auto entry = cs.replacement.find(symbol);
      if (entry == cs.replacement.end()) continue;
      std::vector<Term> args;
      for (std::size_t i = 1; i <= arity; ++i) args.push_back(Term::variable("x" + std::to_string(i)));
      const Term lhs = Term::apply(symbol, std::move(args));
      for (std::size_t i = 1; i <= arity; ++i) {
        const int index = static_cast<int>(i);
        if (std::find(entry->second.begin(), entry->second.end(), index) != entry->second.end()) continue;
        out.emplace_back(lhs, Position{index}, PatternKind::Here);
        out.emplace_back(lhs, Position{index}, PatternKind::Below);
      }
    }
    return out;
  }
};

}  // namespace

std::vector<ForbiddenPattern> builtin_patterns(const PatternEncoding& encoding, const Trs& trs) {
  return std::visit(EncodingVisitor{trs}, encoding);
}

}  // namespace loopcert

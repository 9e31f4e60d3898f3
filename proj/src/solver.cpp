#include "loopcert/solver.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "loopcert/error.hpp"
#include "loopcert/rewrite.hpp"

namespace loopcert {

// ---------------------------------------------------------------------------
// Problem and result plumbing
// ---------------------------------------------------------------------------

MatchingProblem MatchingProblem::single(Term subject, Term pattern, Substitution mu) {
  MatchingProblem p;
  p.pairs.push_back({std::move(subject), std::move(pattern)});
  p.mu = std::move(mu);
  return p;
}

std::string MatchingProblem::to_string() const {
  std::string out;
  for (const auto& pr : pairs) {
    if (!out.empty()) out += ", ";
    out += pr.subject.to_string() + " >> " + pr.pattern.to_string();
  }
  for (const auto& id : identities) {
    if (!out.empty()) out += ", ";
    out += id.lhs.to_string() + " == " + id.rhs.to_string();
  }
  return out + " over " + mu.to_string();
}

std::string IdentityProblem::to_string() const {
  return lhs.to_string() + " == " + rhs.to_string() + " over " + mu.to_string();
}

std::string ExtendedMatchingProblem::to_string() const {
  return "(" + outer.to_string() + ", " + pattern.to_string() + ", " + context.to_string() + ", " +
         term.to_string() + ") over " + mu.to_string();
}

std::string_view to_string(Certificate c) {
  switch (c) {
    case Certificate::RootClash: return "root-clash";
    case Certificate::VariableOrbit: return "variable-orbit";
    case Certificate::OccursCheck: return "occurs-check";
    case Certificate::Cycle: return "cycle";
    case Certificate::Decomposition: return "decomposition";
  }
  return "?";
}

SolverResult SolverResult::solvable(Witness w) {
  SolverResult r(Status::Solvable);
  r.witness_ = std::move(w);
  return r;
}

SolverResult SolverResult::unsolvable(Certificate c, std::string detail) {
  SolverResult r(Status::Unsolvable);
  r.certificate_ = c;
  r.detail_ = std::move(detail);
  return r;
}

SolverResult SolverResult::unknown(std::size_t bound) {
  SolverResult r(Status::Unknown);
  r.bound_ = bound;
  return r;
}

const Witness& SolverResult::witness() const {
  if (!witness_) throw std::logic_error("solver result has no witness");
  return *witness_;
}

Certificate SolverResult::certificate() const {
  if (!certificate_) throw std::logic_error("solver result has no certificate");
  return *certificate_;
}

std::string SolverResult::to_string() const {
  switch (status_) {
    case Status::Solvable: {
      std::string s = "solvable (";
      if (witness_->m) s += "m=" + std::to_string(*witness_->m) + ", k=" + std::to_string(witness_->n);
      else s += "n=" + std::to_string(witness_->n);
      return s + ", sigma=" + witness_->sigma.to_string() + ")";
    }
    case Status::Unsolvable:
      return "unsolvable (" + std::string(loopcert::to_string(*certificate_)) + ": " + detail_ + ")";
    case Status::Unknown:
      return "unknown (bound " + std::to_string(bound_) + " exhausted)";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kBruteForceCap = std::uint64_t{1} << 22;

Substitution to_substitution(const std::map<std::string, Term>& binding) {
  Substitution s;
  for (const auto& [x, t] : binding) s.bind(x, t);
  return s;
}

// Whether every pair and identity holds at exactly this exponent.
std::optional<Substitution> check_at(const MatchingProblem& p, std::size_t n) {
  std::map<std::string, Term> binding;
  for (const auto& pr : p.pairs) {
    if (!match_into(pr.pattern, apply_substitution(pr.subject, p.mu, n), binding)) return std::nullopt;
  }
  for (const auto& id : p.identities) {
    if (apply_substitution(id.lhs, p.mu, n) != apply_substitution(id.rhs, p.mu, n)) return std::nullopt;
  }
  return to_substitution(binding);
}

// The μ-orbit x, xμ, xμ², ... never leaves the variables.
bool variable_only_orbit(const std::string& x, const Substitution& mu) {
  std::set<std::string> seen;
  std::string cur = x;
  while (seen.insert(cur).second) {
    const Term* img = mu.find(cur);
    if (!img) return true;
    if (!img->is_variable()) return false;
    cur = img->name();
  }
  return true;
}

struct Failure {
  Certificate certificate;
  std::string detail;
};

// Constraint store for one exponent offset. Stuck pairs have a variable
// subject and a non-variable pattern; identities are normalised so that at
// least one side is a variable.
struct State {
  std::vector<MatchPair> stuck;
  std::vector<TermIdentity> identities;
  std::map<std::string, Term> bindings;

  bool solved() const { return stuck.empty() && identities.empty(); }
};

class Simplifier {
 public:
  explicit Simplifier(const Substitution& mu) : mu_(mu) {}

  std::optional<Failure> run(State& state, std::vector<MatchPair> pairs, std::vector<TermIdentity> ids) {
    std::vector<MatchPair> stuck;
    while (!pairs.empty()) {
      MatchPair pr = std::move(pairs.back());
      pairs.pop_back();
      const Term& u = pr.subject;
      const Term& l = pr.pattern;
      if (l.is_variable()) {
        auto it = state.bindings.find(l.name());
        if (it == state.bindings.end()) state.bindings.emplace(l.name(), u);
        else ids.push_back({it->second, u});
      } else if (u.is_variable()) {
        if (variable_only_orbit(u.name(), mu_)) {
          return Failure{Certificate::VariableOrbit,
                         u.to_string() + " never becomes an instance of " + l.to_string()};
        }
        stuck.push_back(std::move(pr));
      } else if (u.name() != l.name() || u.arity() != l.arity()) {
        return Failure{Certificate::RootClash, u.to_string() + " vs " + l.to_string()};
      } else {
        for (std::size_t i = 0; i < u.arity(); ++i) pairs.push_back({u.arg(i), l.arg(i)});
      }
    }

    std::vector<TermIdentity> open;
    while (!ids.empty()) {
      TermIdentity id = std::move(ids.back());
      ids.pop_back();
      const Term& a = id.lhs;
      const Term& b = id.rhs;
      if (a == b) continue;
      if (a.is_application() && b.is_application()) {
        if (a.name() != b.name() || a.arity() != b.arity()) {
          return Failure{Certificate::RootClash, a.to_string() + " = " + b.to_string()};
        }
        for (std::size_t i = 0; i < a.arity(); ++i) ids.push_back({a.arg(i), b.arg(i)});
        continue;
      }
      if (a.is_variable() != b.is_variable()) {
        const Term& v = a.is_variable() ? a : b;
        const Term& other = a.is_variable() ? b : a;
        if (occurs_in(v.name(), other)) {
          return Failure{Certificate::OccursCheck, v.to_string() + " = " + other.to_string()};
        }
        if (variable_only_orbit(v.name(), mu_)) {
          return Failure{Certificate::VariableOrbit, v.to_string() + " = " + other.to_string()};
        }
      }
      if (b < a) open.push_back({b, a});
      else open.push_back(std::move(id));
    }

    state.stuck = std::move(stuck);
    state.identities = std::move(open);
    prune_bindings(state);
    return std::nullopt;
  }

 private:
  // Only pattern variables that can still be bound later need remembering.
  static void prune_bindings(State& state) {
    VariableSet live;
    for (const auto& pr : state.stuck) collect_variables(pr.pattern, live);
    std::erase_if(state.bindings, [&](const auto& kv) { return !live.contains(kv.first); });
  }

  const Substitution& mu_;
};

// Renames pattern variables by first occurrence in `t`.
Term anonymize(const Term& t, std::map<std::string, std::string>& names) {
  if (t.is_variable()) {
    auto [it, inserted] = names.try_emplace(t.name(), "");
    if (inserted) it->second = "?" + std::to_string(names.size() - 1);
    return Term::variable(it->second);
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(anonymize(a, names));
  return Term::apply(t.name(), std::move(args));
}

// Identifies states up to renaming of pattern variables. Subject-side
// variables are kept: they are the ones μ acts on.
std::string canonical_key(const State& state) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& pr : state.stuck) {
    std::map<std::string, std::string> local;
    pairs.emplace_back(pr.subject.to_string(), anonymize(pr.pattern, local).to_string());
  }
  std::vector<std::size_t> order(state.stuck.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });

  std::map<std::string, std::string> names;
  std::ostringstream key;
  for (std::size_t i : order) {
    key << state.stuck[i].subject.to_string() << '>' << anonymize(state.stuck[i].pattern, names).to_string()
        << ';';
  }
  key << '|';
  std::vector<std::string> ids;
  for (const auto& id : state.identities) ids.push_back(id.lhs.to_string() + "=" + id.rhs.to_string());
  std::sort(ids.begin(), ids.end());
  for (const auto& s : ids) key << s << ';';
  key << '|';
  std::vector<std::string> bound;
  for (const auto& [x, t] : state.bindings) {
    auto it = names.find(x);
    if (it != names.end()) bound.push_back(it->second + "=" + t.to_string());
  }
  std::sort(bound.begin(), bound.end());
  for (const auto& s : bound) key << s << ';';
  return key.str();
}

std::uint64_t state_size(const State& state) {
  std::uint64_t total = 0;
  for (const auto& pr : state.stuck) total += pr.subject.size();
  for (const auto& id : state.identities) total += id.lhs.size() + id.rhs.size();
  for (const auto& kv : state.bindings) total += kv.second.size();
  return total;
}

std::uint64_t problem_size(const MatchingProblem& p) {
  std::uint64_t total = 0;
  for (const auto& pr : p.pairs) total += pr.subject.size();
  for (const auto& id : p.identities) total += id.lhs.size() + id.rhs.size();
  return total;
}

// Least n <= bound at which the problem holds, stepping μ incrementally.
std::optional<Witness> enumerate_matching(const MatchingProblem& p, std::size_t bound, std::uint64_t cap) {
  MatchingProblem cur = p;
  for (std::size_t n = 0;; ++n) {
    if (auto sigma = check_at(cur, 0)) return Witness{n, std::nullopt, std::move(*sigma)};
    if (n == bound || problem_size(cur) > cap) return std::nullopt;
    for (auto& pr : cur.pairs) pr.subject = p.mu(pr.subject);
    for (auto& id : cur.identities) {
      id.lhs = p.mu(id.lhs);
      id.rhs = p.mu(id.rhs);
    }
  }
}

SolverResult solve_layered(const MatchingProblem& p, const SolverConfig& config) {
  Simplifier simplifier(p.mu);
  State state;
  std::set<std::string> seen;
  std::optional<Failure> failure = simplifier.run(state, p.pairs, p.identities);

  for (std::size_t offset = 0;; ++offset) {
    if (failure) {
      return SolverResult::unsolvable(failure->certificate,
                                      failure->detail + " (after " + std::to_string(offset) + " steps)");
    }
    if (state.solved()) {
      auto sigma = check_at(p, offset);
      if (!sigma) throw std::logic_error("solver: simplified state solved but direct check failed");
      return SolverResult::solvable(Witness{offset, std::nullopt, std::move(*sigma)});
    }
    if (offset == config.bound || state_size(state) > config.max_term_size) break;
    if (!seen.insert(canonical_key(state)).second) {
      return SolverResult::unsolvable(Certificate::Cycle,
                                      "constraint state repeats after " + std::to_string(offset) + " steps");
    }

    std::vector<MatchPair> pairs;
    pairs.reserve(state.stuck.size());
    for (const auto& pr : state.stuck) pairs.push_back({p.mu(pr.subject), pr.pattern});
    std::vector<TermIdentity> ids;
    ids.reserve(state.identities.size());
    for (const auto& id : state.identities) ids.push_back({p.mu(id.lhs), p.mu(id.rhs)});
    for (auto& kv : state.bindings) kv.second = p.mu(kv.second);
    failure = simplifier.run(state, std::move(pairs), std::move(ids));
  }

  if (auto w = enumerate_matching(p, config.bound, config.max_term_size)) return SolverResult::solvable(*w);
  return SolverResult::unknown(config.bound);
}

// ---------------------------------------------------------------------------
// Extended problems
// ---------------------------------------------------------------------------

// Walks ℓ along the hole path of D. Either ℓ runs into a variable at some
// position v <= hole, the hole is reached first, or a symbol clash occurs.
struct PathWalk {
  enum class Kind { VariableAt, Shallow, Clash } kind;
  Position pos;
};

PathWalk walk_pattern(const Term& pattern, const Context& outer) {
  const Position& hole = outer.hole();
  Term l = pattern;
  Term d = outer.body();
  Position pos;
  for (;;) {
    if (l.is_variable()) return {PathWalk::Kind::VariableAt, pos};
    if (pos == hole) return {PathWalk::Kind::Shallow, pos};
    if (d.name() != l.name() || d.arity() != l.arity()) return {PathWalk::Kind::Clash, pos};
    int i = hole[pos.size()];
    l = l.arg(static_cast<std::size_t>(i - 1));
    d = d.arg(static_cast<std::size_t>(i - 1));
    pos = pos.child(i);
  }
}

std::size_t count_occurrences(const Term& t, const std::string& x) {
  if (t.is_variable()) return t.name() == x ? 1 : 0;
  std::size_t n = 0;
  for (const auto& a : t.args()) n += count_occurrences(a, x);
  return n;
}

struct Reduction {
  enum class Kind { Solvable, Unsolvable, Inconclusive } kind;
  std::optional<Witness> witness;
  std::string detail;
};

// D[t(C,μ)^m]μ^k = ℓσ is split on m: each m below the unfolding depth J
// becomes the matching problem D_m[t_m] ⋗ ℓ, and all m >= J are covered by
// one matching problem in which the part of D_J below ℓ's variable is
// abstracted into a fresh variable outside dom(μ).
Reduction reduce_extended(const ExtendedMatchingProblem& p, const SolverConfig& config) {
  const Substitution& mu = p.mu;
  if (p.context.is_empty()) {
    // t(□,μ)^m = tμ^m, so only m + k matters.
    SolverResult r = solve_layered(MatchingProblem::single(p.outer.fill(p.term), p.pattern, mu), config);
    if (r.is_solvable()) return {Reduction::Kind::Solvable, Witness{r.witness().n, 0, r.witness().sigma}, ""};
    if (r.is_unsolvable()) return {Reduction::Kind::Unsolvable, std::nullopt, r.detail()};
    return {Reduction::Kind::Inconclusive, std::nullopt, ""};
  }

  Context d = p.outer;
  Term t = p.term;
  Context c = p.context;
  bool conclusive = true;
  bool covered = false;
  std::string details;
  const std::size_t max_unfold = p.pattern.depth() + 2;
  for (std::size_t j = 0; j <= max_unfold; ++j) {
    if (d.body().size() + t.size() > config.max_term_size) return {Reduction::Kind::Inconclusive, std::nullopt, ""};
    SolverResult r = solve_layered(MatchingProblem::single(d.fill(t), p.pattern, mu), config);
    if (r.is_solvable()) return {Reduction::Kind::Solvable, Witness{r.witness().n, j, r.witness().sigma}, ""};
    if (r.is_unknown()) conclusive = false;
    else details += "m=" + std::to_string(j) + ": " + r.detail() + "; ";

    PathWalk walk = walk_pattern(p.pattern, d);
    if (walk.kind == PathWalk::Kind::Clash) {
      details += "m>=" + std::to_string(j) + ": symbol clash on the hole path";
      covered = true;
      break;
    }
    if (walk.kind == PathWalk::Kind::VariableAt) {
      Term var = subterm_at(p.pattern, walk.pos);
      Term rest_pattern = p.pattern;
      bool relaxed = count_occurrences(p.pattern, var.name()) > 1;
      if (relaxed) rest_pattern = replace_at(p.pattern, walk.pos, Term::variable("%w"));
      Term rest_subject = replace_at(d.body(), walk.pos, Term::variable("%z"));
      SolverResult rest = solve_layered(MatchingProblem::single(rest_subject, rest_pattern, mu), config);
      if (rest.is_unsolvable()) {
        details += "m>=" + std::to_string(j) + ": " + rest.detail();
        covered = true;
        break;
      }
      return {Reduction::Kind::Inconclusive, std::nullopt, ""};
    }
    d = d.compose(c);
    t = mu(t);
    c = c.instantiate(mu);
  }
  if (!conclusive || !covered) return {Reduction::Kind::Inconclusive, std::nullopt, ""};
  return {Reduction::Kind::Unsolvable, std::nullopt, details};
}

// Least (m, k) with m + k <= bound, ordered by m + k then m.
std::optional<Witness> enumerate_extended(const ExtendedMatchingProblem& p, std::size_t bound,
                                          std::uint64_t cap) {
  ContextSubstitution cs(p.context, p.mu);
  std::vector<std::optional<Term>> front;  // front[m] = D[t(C,μ)^m]μ^(s-m)
  std::optional<Term> unfolded = p.term;   // t(C,μ)^m for the next m
  for (std::size_t s = 0; s <= bound; ++s) {
    for (auto& f : front) {
      if (!f) continue;
      f = p.mu(*f);
      if (f->size() > cap) f.reset();
    }
    if (unfolded) {
      front.push_back(p.outer.fill(*unfolded));
      Term next = p.context.fill(p.mu(*unfolded));
      if (next.size() > cap) unfolded.reset();
      else unfolded = std::move(next);
    } else {
      front.push_back(std::nullopt);
    }
    for (std::size_t m = 0; m < front.size(); ++m) {
      if (!front[m]) continue;
      if (auto sigma = match_pattern(p.pattern, *front[m])) return Witness{s - m, m, std::move(*sigma)};
    }
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public solvers
// ---------------------------------------------------------------------------

SolverResult solve_matching(const MatchingProblem& problem, const SolverConfig& config) {
  return solve_layered(problem, config);
}

SolverResult solve_identity(const IdentityProblem& problem, const SolverConfig& config) {
  MatchingProblem p;
  p.identities.push_back({problem.lhs, problem.rhs});
  p.mu = problem.mu;
  return solve_layered(p, config);
}

SolverResult solve_extended(const ExtendedMatchingProblem& problem, const SolverConfig& config) {
  const Term& l = problem.pattern;
  const Term& d = problem.outer.body();
  if (!problem.outer.is_empty() && l.is_application() && (d.name() != l.name() || d.arity() != l.arity())) {
    return SolverResult::unsolvable(Certificate::RootClash, d.to_string() + " vs " + l.to_string());
  }
  Reduction red = reduce_extended(problem, config);
  if (red.kind == Reduction::Kind::Unsolvable) {
    return SolverResult::unsolvable(Certificate::Decomposition, red.detail);
  }
  if (auto w = enumerate_extended(problem, config.bound, config.max_term_size)) return SolverResult::solvable(*w);
  if (red.kind == Reduction::Kind::Solvable) {
    if (!verify_witness(problem, *red.witness)) {
      throw std::logic_error("solver: reduction witness failed verification");
    }
    return SolverResult::solvable(*red.witness);
  }
  return SolverResult::unknown(config.bound);
}

// ---------------------------------------------------------------------------
// Brute force and verification
// ---------------------------------------------------------------------------

std::optional<Witness> brute_force_check(const MatchingProblem& problem, std::size_t bound) {
  for (std::size_t n = 0; n <= bound; ++n) {
    std::map<std::string, Term> binding;
    bool ok = true;
    for (const auto& pr : problem.pairs) {
      Term s = apply_substitution(pr.subject, problem.mu, n);
      if (s.size() > kBruteForceCap) return std::nullopt;
      if (!match_into(pr.pattern, s, binding)) {
        ok = false;
        break;
      }
    }
    for (std::size_t i = 0; ok && i < problem.identities.size(); ++i) {
      Term a = apply_substitution(problem.identities[i].lhs, problem.mu, n);
      Term b = apply_substitution(problem.identities[i].rhs, problem.mu, n);
      if (a.size() > kBruteForceCap || b.size() > kBruteForceCap) return std::nullopt;
      ok = a == b;
    }
    if (ok) return Witness{n, std::nullopt, to_substitution(binding)};
  }
  return std::nullopt;
}

std::optional<Witness> brute_force_check(const IdentityProblem& problem, std::size_t bound) {
  for (std::size_t n = 0; n <= bound; ++n) {
    Term a = apply_substitution(problem.lhs, problem.mu, n);
    Term b = apply_substitution(problem.rhs, problem.mu, n);
    if (a.size() > kBruteForceCap || b.size() > kBruteForceCap) return std::nullopt;
    if (a == b) return Witness{n, std::nullopt, {}};
  }
  return std::nullopt;
}

std::optional<Witness> brute_force_check(const ExtendedMatchingProblem& problem, std::size_t bound) {
  ContextSubstitution cs(problem.context, problem.mu);
  for (std::size_t s = 0; s <= bound; ++s) {
    for (std::size_t m = 0; m <= s; ++m) {
      Term inner = apply_context_substitution(problem.term, cs, m);
      if (inner.size() > kBruteForceCap) return std::nullopt;
      Term candidate = apply_substitution(problem.outer.fill(inner), problem.mu, s - m);
      if (candidate.size() > kBruteForceCap) return std::nullopt;
      if (auto sigma = match_pattern(problem.pattern, candidate)) return Witness{s - m, m, std::move(*sigma)};
    }
  }
  return std::nullopt;
}

bool verify_witness(const MatchingProblem& problem, const Witness& w) {
  for (const auto& pr : problem.pairs) {
    if (w.sigma(pr.pattern) != apply_substitution(pr.subject, problem.mu, w.n)) return false;
  }
  for (const auto& id : problem.identities) {
    if (apply_substitution(id.lhs, problem.mu, w.n) != apply_substitution(id.rhs, problem.mu, w.n)) return false;
  }
  return true;
}

bool verify_witness(const IdentityProblem& problem, const Witness& w) {
  return apply_substitution(problem.lhs, problem.mu, w.n) == apply_substitution(problem.rhs, problem.mu, w.n);
}

bool verify_witness(const ExtendedMatchingProblem& problem, const Witness& w) {
  ContextSubstitution cs(problem.context, problem.mu);
  Term inner = apply_context_substitution(problem.term, cs, w.m.value_or(0));
  Term candidate = apply_substitution(problem.outer.fill(inner), problem.mu, w.n);
  return w.sigma(problem.pattern) == candidate;
}

}  // namespace loopcert

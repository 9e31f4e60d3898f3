#include "loopcert/deciders.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "loopcert/error.hpp"

namespace loopcert {

namespace {

struct KindName {
  StrategyKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {StrategyKind::Full, "full"},
    {StrategyKind::Leftmost, "leftmost"},
    {StrategyKind::Innermost, "innermost"},
    {StrategyKind::Outermost, "outermost"},
    {StrategyKind::LeftmostInnermost, "leftmost-innermost"},
    {StrategyKind::LeftmostOutermost, "leftmost-outermost"},
    {StrategyKind::Parallel, "parallel"},
    {StrategyKind::ParallelInnermost, "parallel-innermost"},
    {StrategyKind::ParallelOutermost, "parallel-outermost"},
    {StrategyKind::MaxParallel, "max-parallel"},
    {StrategyKind::MaxParallelInnermost, "max-parallel-innermost"},
    {StrategyKind::MaxParallelOutermost, "max-parallel-outermost"},
    {StrategyKind::Forbidden, "forbidden"},
};

}  // namespace

std::string_view to_string(StrategyKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  return std::nullopt;
}

StrategySpec StrategySpec::of(StrategyKind kind) {
  StrategySpec s;
  s.kind = kind;
  s.name = std::string(to_string(kind));
  return s;
}

StrategySpec StrategySpec::forbidden(std::vector<ForbiddenPattern> patterns, std::string name) {
  StrategySpec s;
  s.kind = StrategyKind::Forbidden;
  s.patterns = std::move(patterns);
  s.name = std::move(name);
  return s;
}

bool StrategySpec::accepts_parallel_steps() const noexcept {
  switch (kind) {
    case StrategyKind::Full:
    case StrategyKind::Parallel:
    case StrategyKind::ParallelInnermost:
    case StrategyKind::ParallelOutermost:
    case StrategyKind::MaxParallel:
    case StrategyKind::MaxParallelInnermost:
    case StrategyKind::MaxParallelOutermost:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(ProblemFamily family) {
  switch (family) {
    case ProblemFamily::LeftTerm: return "left-term";
    case ProblemFamily::LeftTermVariable: return "left-term-variable";
    case ProblemFamily::LeftContext: return "left-context";
    case ProblemFamily::LeftContextVariable: return "left-context-variable";
    case ProblemFamily::ParallelTerm: return "parallel-term";
    case ProblemFamily::ParallelTermVariable: return "parallel-term-variable";
    case ProblemFamily::ParallelContext: return "parallel-context";
    case ProblemFamily::ParallelContextVariable: return "parallel-context-variable";
    case ProblemFamily::Here: return "here";
    case ProblemFamily::AboveInside: return "above-M1";
    case ProblemFamily::AboveVariable: return "above-M2";
    case ProblemFamily::BelowTerm: return "below-M3";
    case ProblemFamily::BelowContext: return "below-M4";
  }
  return "?";
}

std::string to_string(const Problem& problem) {
  return std::visit([](const auto& p) { return p.to_string(); }, problem);
}

std::string_view to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::IsStrategyLoop: return "yes";
    case Verdict::Kind::NotStrategyLoop: return "no";
    case Verdict::Kind::Unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Problem construction
// ---------------------------------------------------------------------------

namespace {

class ObligationSet {
 public:
  void add(Obligation ob) {
    const std::string key = std::string(to_string(ob.family)) + " " + to_string(ob.problem);
    if (seen_.insert(key).second) items_.push_back(std::move(ob));
  }
  void add_matching(const Term& u, const Term& l, const Substitution& mu, ProblemFamily family,
                    std::size_t offset) {
    add(Obligation{MatchingProblem::single(u, l, mu), family, offset});
  }
  std::vector<Obligation> take() { return std::move(items_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<Obligation> items_;
};

// u ⋗ ℓ for every u ⊴ xμ with x in the μ-closure of V(base).
void add_variable_problems(ObligationSet& out, const Term& base, const Substitution& mu,
                           const std::vector<Term>& lhss, ProblemFamily family) {
  const VariableSet closure = variable_closure(base, mu);
  const std::size_t offset = closure.size() + 2;
  for (const auto& x : closure) {
    for (const Term& u : subterms(mu(Term::variable(x)))) {
      for (const Term& l : lhss) out.add_matching(u, l, mu, family, offset);
    }
  }
}

std::vector<Term> left_hand_sides(const Trs& trs) {
  std::vector<Term> out;
  for (const Rule& r : trs.rules()) out.push_back(r.lhs);
  return out;
}

template <typename TermPred, typename ContextPred>
std::vector<Obligation> four_families(const Term& t, const Context& c, const Substitution& mu, const Trs& trs,
                                      TermPred term_pred, ContextPred context_pred, ProblemFamily first) {
  const auto fam = [first](int i) { return static_cast<ProblemFamily>(static_cast<int>(first) + i); };
  const std::vector<Term> lhss = left_hand_sides(trs);
  std::vector<Term> term_sources;
  for (const Position& q1 : positions(t)) {
    if (term_pred(q1)) term_sources.push_back(subterm_at(t, q1));
  }
  std::vector<Term> context_sources;
  for (const Position& p1 : positions(c.body())) {
    if (context_pred(p1)) context_sources.push_back(c.at(p1));
  }

  ObligationSet out;
  for (const Term& u : term_sources) {
    for (const Term& l : lhss) out.add_matching(u, l, mu, fam(0), 0);
  }
  for (const Term& u : term_sources) add_variable_problems(out, u, mu, lhss, fam(1));
  for (const Term& u : context_sources) {
    for (const Term& l : lhss) out.add_matching(u, l, mu, fam(2), 1);
  }
  for (const Term& u : context_sources) add_variable_problems(out, u, mu, lhss, fam(3));
  return out.take();
}

void require_position(const Term& t, const Position& q) {
  if (!is_position_of(t, q)) {
    throw Error(ErrorKind::PositionOutOfTerm, q.to_string() + " is not a position of " + t.to_string());
  }
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t monus(std::size_t a, std::size_t b) { return a > b ? a - b : 0; }

// The single (ℓ,o,h) problem for a step at q, if the position equation has a solution.
std::optional<Obligation> here_problem(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                                       const Term& lhs, const Position& o, ProblemFamily family) {
  auto sol = solve_position_equation(c.hole(), q, o);
  if (!sol) return std::nullopt;
  const Term unrolled = apply_context_substitution(t, ContextSubstitution(c, mu), sol->n0);
  // p^{n₀}q is a position of the unrolled term, hence so is its prefix o₀′.
  return Obligation{MatchingProblem::single(subterm_at(unrolled, sol->prefix), lhs, mu), family, sol->n0};
}

void require_kind(const ForbiddenPattern& pattern, PatternKind kind) {
  if (pattern.kind != kind) {
    throw Error(ErrorKind::InvalidArgument, "pattern " + pattern.to_string() + " has kind " +
                                                std::string(to_string(pattern.kind)) + ", expected " +
                                                std::string(to_string(kind)));
  }
}

}  // namespace

std::vector<Obligation> leftmost_problems(const Term& t, const Position& q, const Context& c,
                                          const Substitution& mu, const Trs& trs) {
  require_position(t, q);
  const Position& p = c.hole();
  return four_families(
      t, c, mu, trs, [&](const Position& q1) { return position_relation(q1, q) == PositionRelation::LeftOf; },
      [&](const Position& p1) { return position_relation(p1, p) == PositionRelation::LeftOf; },
      ProblemFamily::LeftTerm);
}

std::vector<Obligation> max_parallel_problems(const Term& t, std::span<const Position> qs, const Context& c,
                                              const Substitution& mu, const Trs& trs) {
  if (qs.empty()) throw Error(ErrorKind::NotParallel, "a parallel step needs at least one position");
  if (!pairwise_parallel(qs)) throw Error(ErrorKind::NotParallel, "step positions are not pairwise parallel");
  for (const Position& q : qs) require_position(t, q);
  const Position& p = c.hole();
  return four_families(
      t, c, mu, trs,
      [&](const Position& q1) {
        return std::all_of(qs.begin(), qs.end(), [&](const Position& q) { return q1.is_parallel_to(q); });
      },
      [&](const Position& p1) { return p1.is_parallel_to(p); }, ProblemFamily::ParallelTerm);
}

std::optional<PositionSolution> solve_position_equation(const Position& p, const Position& q, const Position& o) {
  const std::size_t n0 = p.is_root() ? 0 : ceil_div(monus(o.size(), q.size()), p.size());
  const Position target = p.power(n0) + q;
  if (!target.has_suffix(o)) return std::nullopt;
  return PositionSolution{n0, target.prefix(target.size() - o.size())};
}

std::vector<Obligation> h_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                                   const ForbiddenPattern& pattern) {
  require_kind(pattern, PatternKind::Here);
  require_position(t, q);
  std::vector<Obligation> out;
  if (auto ob = here_problem(t, q, c, mu, pattern.lhs, pattern.pos, ProblemFamily::Here)) {
    out.push_back(std::move(*ob));
  }
  return out;
}

AboveProblems a_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                         const ForbiddenPattern& pattern) {
  require_kind(pattern, PatternKind::Above);
  require_position(t, q);
  const Term redex = subterm_at(t, q);
  if (redex.is_variable()) {
    throw Error(ErrorKind::VariableRedex, "the subterm at " + q.to_string() + " is the variable " + redex.name());
  }
  const Position& p = c.hole();
  const Position& o = pattern.pos;
  const std::size_t n0 = p.is_root() ? 0 : ceil_div(monus(o.size(), q.size()), p.size());
  const Term unrolled = apply_context_substitution(t, ContextSubstitution(c, mu), n0);
  const Position base = p.power(n0) + q;

  // Every o″ <= p^{n₀}qq′ is a prefix of p^{n₀}q or p^{n₀}q extended into t|_q.
  std::set<Position> candidates;
  for (std::size_t len = 0; len <= base.size(); ++len) candidates.insert(base.prefix(len));
  for (const Position& q1 : positions(redex)) candidates.insert(base + q1);

  ObligationSet inside;
  for (const Position& o2 : candidates) {
    if (base.is_strict_prefix_of(o2 + o)) {
      inside.add_matching(subterm_at(unrolled, o2), pattern.lhs, mu, ProblemFamily::AboveInside, n0);
    }
  }
  ObligationSet vars;
  add_variable_problems(vars, redex, mu, {pattern.lhs}, ProblemFamily::AboveVariable);
  return {inside.take(), vars.take()};
}

BelowProblems b_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                         const ForbiddenPattern& pattern) {
  require_kind(pattern, PatternKind::Below);
  require_position(t, q);
  const Position& p = c.hole();
  const Position& o = pattern.pos;

  ObligationSet term;
  for (std::size_t len = 0; len < q.size(); ++len) {
    if (auto ob = here_problem(t, q.prefix(len), c, mu, pattern.lhs, o, ProblemFamily::BelowTerm)) {
      term.add(std::move(*ob));
    }
  }

  ObligationSet context;
  if (!p.is_root()) {
    const ContextSubstitution cs(c, mu);
    const Context c_mu = c.instantiate(mu);
    for (std::size_t len = 0; len < p.size(); ++len) {
      const Position rest = *p.strip_prefix(p.prefix(len));
      const std::size_t n0 = rest.size() > o.size() ? 0 : (o.size() - rest.size()) / p.size() + 1;
      if (!o.is_strict_prefix_of(rest + p.power(n0))) continue;
      ExtendedMatchingProblem emp{c.subcontext(p.prefix(len)), pattern.lhs, c_mu,
                                  mu(apply_context_substitution(t, cs, n0)), mu};
      context.add(Obligation{std::move(emp), ProblemFamily::BelowContext, n0 + 1});
    }
  }
  return {term.take(), context.take()};
}

// ---------------------------------------------------------------------------
// Concrete checks
// ---------------------------------------------------------------------------

std::optional<std::string> concrete_check(const Term& t, std::span<const Position> positions, const Trs& trs,
                                          const StrategySpec& spec) {
  const auto fails = [&](const ConcreteStrategy& s) { return !strategy_allows(t, positions, trs, s); };
  const auto leftmost = [&]() -> std::optional<std::string> {
    if (fails(ConcreteStrategy::leftmost())) return "leftmost";
    return std::nullopt;
  };
  const auto innermost = [&]() -> std::optional<std::string> {
    if (fails(ConcreteStrategy::innermost())) return "innermost";
    return std::nullopt;
  };
  const auto outermost = [&]() -> std::optional<std::string> {
    if (fails(ConcreteStrategy::outermost())) return "outermost";
    return std::nullopt;
  };
  const auto max_parallel = [&]() -> std::optional<std::string> {
    if (fails(ConcreteStrategy::max_parallel())) return "max-parallel";
    return std::nullopt;
  };

  switch (spec.kind) {
    case StrategyKind::Full:
    case StrategyKind::Parallel:
      strategy_allows(t, positions, trs, ConcreteStrategy::full());
      return std::nullopt;
    case StrategyKind::Leftmost: return leftmost();
    case StrategyKind::Innermost:
    case StrategyKind::ParallelInnermost: return innermost();
    case StrategyKind::Outermost:
    case StrategyKind::ParallelOutermost: return outermost();
    case StrategyKind::LeftmostInnermost:
      if (auto r = leftmost()) return r;
      return innermost();
    case StrategyKind::LeftmostOutermost:
      if (auto r = leftmost()) return r;
      return outermost();
    case StrategyKind::MaxParallel: return max_parallel();
    case StrategyKind::MaxParallelInnermost:
      if (auto r = max_parallel()) return r;
      return innermost();
    case StrategyKind::MaxParallelOutermost:
      if (auto r = max_parallel()) return r;
      return outermost();
    case StrategyKind::Forbidden: {
      strategy_allows(t, positions, trs, ConcreteStrategy::full());
      if (positions.size() != 1) return "single position";
      for (const ForbiddenPattern& pat : spec.patterns) {
        if (pattern_forbids(t, positions[0], pat)) return pat.to_string();
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<ConcreteViolation> find_concrete_violation(const Trs& trs, const ValidatedLoop& loop,
                                                         const StrategySpec& spec, std::size_t max_level) {
  constexpr std::uint64_t kSizeLimit = std::uint64_t{1} << 20;
  for (std::size_t level = 0; level <= max_level; ++level) {
    const UnrolledDerivation d = unroll_loop(loop, level);
    if (d.terms.front().size() > kSizeLimit) return std::nullopt;
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
      const std::vector<Position> qs = step_positions(d.steps[i]);
      if (auto check = concrete_check(d.terms[i], qs, trs, spec)) {
        return ConcreteViolation{level, i, std::move(*check), d.terms[i], qs};
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// decide_loop
// ---------------------------------------------------------------------------

namespace {

struct Job {
  std::size_t step;
  std::optional<std::size_t> position;
  std::optional<ForbiddenPattern> pattern;
  Obligation obligation;
};

void pattern_jobs(std::vector<Job>& jobs, std::size_t step, std::optional<std::size_t> position, const Term& t,
                  const Position& q, const ValidatedLoop& loop, const std::vector<ForbiddenPattern>& patterns) {
  const auto push_all = [&](std::vector<Obligation> obs, const ForbiddenPattern& pat) {
    for (auto& ob : obs) jobs.push_back(Job{step, position, pat, std::move(ob)});
  };
  for (const ForbiddenPattern& pat : patterns) {
    switch (pat.kind) {
      case PatternKind::Here:
        push_all(h_problems(t, q, loop.context(), loop.subst(), pat), pat);
        break;
      case PatternKind::Above: {
        AboveProblems a = a_problems(t, q, loop.context(), loop.subst(), pat);
        push_all(std::move(a.inside), pat);
        push_all(std::move(a.variables), pat);
        break;
      }
      case PatternKind::Below: {
        BelowProblems b = b_problems(t, q, loop.context(), loop.subst(), pat);
        push_all(std::move(b.term), pat);
        push_all(std::move(b.context), pat);
        break;
      }
    }
  }
}

std::vector<Job> build_jobs(const Trs& trs, const ValidatedLoop& loop, const StrategySpec& spec) {
  const std::vector<ForbiddenPattern> inner = builtin_patterns(InnermostEncoding{}, trs);
  const std::vector<ForbiddenPattern> outer = builtin_patterns(OutermostEncoding{}, trs);
  const Context& c = loop.context();
  const Substitution& mu = loop.subst();

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < loop.length(); ++i) {
    const Term& t = loop.terms()[i];
    const std::vector<Position> qs = step_positions(loop.steps()[i]);
    const auto leftmost = [&] {
      for (auto& ob : leftmost_problems(t, qs.front(), c, mu, trs)) {
        jobs.push_back(Job{i, std::nullopt, std::nullopt, std::move(ob)});
      }
    };
    const auto max_parallel = [&] {
      for (auto& ob : max_parallel_problems(t, qs, c, mu, trs)) {
        jobs.push_back(Job{i, std::nullopt, std::nullopt, std::move(ob)});
      }
    };
    const auto per_position = [&](const std::vector<ForbiddenPattern>& patterns) {
      for (std::size_t j = 0; j < qs.size(); ++j) {
        std::optional<std::size_t> index;
        if (qs.size() > 1) index = j;
        pattern_jobs(jobs, i, index, t, qs[j], loop, patterns);
      }
    };

    switch (spec.kind) {
      case StrategyKind::Full:
      case StrategyKind::Parallel:
        break;
      case StrategyKind::Leftmost: leftmost(); break;
      case StrategyKind::Innermost:
      case StrategyKind::ParallelInnermost: per_position(inner); break;
      case StrategyKind::Outermost:
      case StrategyKind::ParallelOutermost: per_position(outer); break;
      case StrategyKind::LeftmostInnermost:
        leftmost();
        per_position(inner);
        break;
      case StrategyKind::LeftmostOutermost:
        leftmost();
        per_position(outer);
        break;
      case StrategyKind::MaxParallel: max_parallel(); break;
      case StrategyKind::MaxParallelInnermost:
        max_parallel();
        per_position(inner);
        break;
      case StrategyKind::MaxParallelOutermost:
        max_parallel();
        per_position(outer);
        break;
      case StrategyKind::Forbidden: per_position(spec.patterns); break;
    }
  }
  return jobs;
}

SolverResult solve(const Problem& problem, const SolverConfig& config) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MatchingProblem>) return solve_matching(p, config);
        else return solve_extended(p, config);
      },
      problem);
}

}  // namespace

Verdict decide_loop(const Trs& trs, const ValidatedLoop& loop, const StrategySpec& spec,
                    const SolverConfig& config) {
  if (loop.is_parallel() && !spec.accepts_parallel_steps()) {
    throw Error(ErrorKind::ShapeMismatch,
                "strategy " + spec.name + " needs a certificate with single-position steps");
  }
  Verdict v;
  v.strategy = spec.name.empty() ? std::string(to_string(spec.kind)) : spec.name;
  v.config = config;

  const std::vector<Job> jobs = build_jobs(trs, loop, spec);
  std::map<std::string, SolverResult> memo;
  for (const Job& job : jobs) {
    const std::string key = to_string(job.obligation.problem);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, solve(job.obligation.problem, config)).first;
    const SolverResult& r = it->second;
    ++v.stats.problems;
    switch (r.status()) {
      case SolverResult::Status::Solvable:
        ++v.stats.solvable;
        if (!v.evidence) {
          v.evidence = Evidence{job.step, job.position, job.obligation, job.pattern, r.witness(), std::nullopt};
        }
        break;
      case SolverResult::Status::Unsolvable:
        ++v.stats.unsolvable;
        break;
      case SolverResult::Status::Unknown:
        ++v.stats.unknown;
        v.open_problems.push_back(OpenProblem{job.step, job.obligation, job.pattern});
        break;
    }
  }

  if (v.evidence) {
    v.kind = Verdict::Kind::NotStrategyLoop;
    const std::size_t max_level =
        v.evidence->witness.total() + v.evidence->obligation.level_offset + loop.length() + 4;
    v.evidence->concrete = find_concrete_violation(trs, loop, spec, max_level);
    if (!v.evidence->concrete) {
      v.notes.push_back("no concrete violation found up to level " + std::to_string(max_level));
    }
  } else if (!v.open_problems.empty()) {
    v.kind = Verdict::Kind::Unknown;
  } else {
    v.kind = Verdict::Kind::IsStrategyLoop;
  }
  return v;
}

}  // namespace loopcert

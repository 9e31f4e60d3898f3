#include <gtest/gtest.h>

#include <set>

#include "loopcert/deciders.hpp"
#include "loopcert/error.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace loopcert;
using testing_support::C;
using testing_support::Random;
using testing_support::T;

namespace {

using Kind = Verdict::Kind;

template <typename F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorKind::InvalidArgument;
}

SolverResult solve(const Problem& p, std::size_t bound = 64) {
  if (const auto* mp = std::get_if<MatchingProblem>(&p)) return solve_matching(*mp, SolverConfig{bound});
  return solve_extended(std::get<ExtendedMatchingProblem>(p), SolverConfig{bound});
}

std::set<Term> subjects(const std::vector<Obligation>& obs) {
  std::set<Term> out;
  for (const auto& ob : obs) out.insert(std::get<MatchingProblem>(ob.problem).pairs.at(0).subject);
  return out;
}

std::set<Term> subjects(const std::vector<Obligation>& obs, ProblemFamily family) {
  std::vector<Obligation> picked;
  for (const auto& ob : obs) {
    if (ob.family == family) picked.push_back(ob);
  }
  return subjects(picked);
}

bool any_solvable(const std::vector<Obligation>& obs) {
  return std::any_of(obs.begin(), obs.end(), [](const Obligation& ob) { return solve(ob.problem).is_solvable(); });
}

bool all_unsolvable(const std::vector<Obligation>& obs) {
  return std::all_of(obs.begin(), obs.end(),
                     [](const Obligation& ob) { return solve(ob.problem).is_unsolvable(); });
}

Kind decide(const Trs& trs, const ValidatedLoop& loop, StrategyKind k) {
  return decide_loop(trs, loop, StrategySpec::of(k)).kind;
}

struct Corpus {
  Trs ex1 = testing_support::load_trs("ex1.trs");
  ValidatedLoop loop1 = testing_support::load_loop(ex1, "ex1-loop.json");
  ValidatedLoop loop6 = testing_support::load_loop(ex1, "ex6-loop.json");
  ValidatedLoop loop9_two = testing_support::load_loop(ex1, "ex9-maxpar-outermost.json");
  ValidatedLoop loop9_one = testing_support::load_loop(ex1, "ex9-maxpar-innermost.json");
  Trs ex7 = testing_support::load_trs("ex7.trs");
  ValidatedLoop loop7 = testing_support::load_loop(ex7, "ex7-loop.json");
  Trs ex8 = testing_support::load_trs("ex8.trs");
  ValidatedLoop loop8 = testing_support::load_loop(ex8, "ex8-loop.json");
  Trs inf = testing_support::load_trs("inf.trs");
  ValidatedLoop loop_inf = testing_support::load_loop(inf, "inf-loop.json");
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

// Condition (1) by enumeration: is the step at p^n q of t(C,μ)^n blocked by
// the pattern, for some n <= max_level?
bool pattern_blocks_somewhere(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                              const ForbiddenPattern& pat, std::size_t max_level) {
  const ContextSubstitution cs(c, mu);
  for (std::size_t n = 0; n <= max_level; ++n) {
    const Term s = apply_context_substitution(t, cs, n);
    const Position step = c.hole().power(n) + q;
    for (const Position& o1 : positions(s)) {
      if (!match_pattern(pat.lhs, subterm_at(s, o1))) continue;
      const Position target = o1 + pat.pos;
      const bool hit = pat.kind == PatternKind::Here    ? target == step
                       : pat.kind == PatternKind::Above ? step.is_strict_prefix_of(target)
                                                        : target.is_strict_prefix_of(step);
      if (hit) return true;
    }
  }
  return false;
}

std::vector<Obligation> pattern_problems(const Term& t, const Position& q, const Context& c, const Substitution& mu,
                                         const ForbiddenPattern& pat) {
  switch (pat.kind) {
    case PatternKind::Here: return h_problems(t, q, c, mu, pat);
    case PatternKind::Above: {
      auto ab = a_problems(t, q, c, mu, pat);
      ab.inside.insert(ab.inside.end(), ab.variables.begin(), ab.variables.end());
      return ab.inside;
    }
    case PatternKind::Below: {
      auto bp = b_problems(t, q, c, mu, pat);
      bp.term.insert(bp.term.end(), bp.context.begin(), bp.context.end());
      return bp.term;
    }
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem construction
// ---------------------------------------------------------------------------

TEST(LeftmostProblems, FactorialLoopHasNone) {
  const auto& k = corpus();
  for (std::size_t i = 0; i < k.loop1.length(); ++i) {
    EXPECT_TRUE(leftmost_problems(k.loop1.terms()[i], k.loop1.steps()[i][0].pos, k.loop1.context(), k.loop1.subst(),
                                  k.ex1)
                    .empty());
  }
}

TEST(LeftmostProblems, InnermostFactorialLoopFamilies) {
  const auto& k = corpus();
  const auto obs = leftmost_problems(k.loop6.terms()[3], Position{1, 2}, k.loop6.context(), k.loop6.subst(), k.ex1);
  EXPECT_EQ(subjects(obs, ProblemFamily::LeftTerm), (std::set<Term>{T("false")}));
  EXPECT_EQ(subjects(obs, ProblemFamily::LeftContext), (std::set<Term>{T("false"), T("0"), T("s(0)")}));
  // Each subject is paired with all 12 left-hand sides.
  std::size_t left_term = 0;
  for (const auto& ob : obs) left_term += ob.family == ProblemFamily::LeftTerm;
  EXPECT_EQ(left_term, 12u);
  EXPECT_TRUE(all_unsolvable(obs));
}

TEST(LeftmostProblems, NonLinearAndDelayedExamples) {
  const auto& k = corpus();
  const auto obs7 = leftmost_problems(k.loop7.terms()[0], Position{}, k.loop7.context(), k.loop7.subst(), k.ex7);
  EXPECT_EQ(subjects(obs7), (std::set<Term>{T("g(x,y)"), T("x"), T("y"), T("z")}));
  for (const auto& ob : obs7) {
    const auto& mp = std::get<MatchingProblem>(ob.problem);
    const bool is_g = mp.pairs[0].subject == T("g(x,y)") && mp.pairs[0].pattern == T("g(x,x)");
    EXPECT_EQ(solve(ob.problem).is_solvable(), is_g) << mp.to_string();
  }
  const auto obs8 = leftmost_problems(k.loop8.terms()[0], Position{}, k.loop8.context(), k.loop8.subst(), k.ex8);
  EXPECT_EQ(subjects(obs8), (std::set<Term>{T("g(x)"), T("x"), T("y"), T("z"), T("s(x)")}));
  EXPECT_EQ(error_kind([&] { leftmost_problems(T("f(x)"), Position{2}, C("g([])"), {}, k.ex7); }),
            ErrorKind::PositionOutOfTerm);
}

TEST(MaxParallelProblems, Examples) {
  const auto& k = corpus();
  const auto qs = step_positions(k.loop9_one.steps()[0]);
  EXPECT_TRUE(all_unsolvable(
      max_parallel_problems(k.loop9_one.terms()[0], qs, k.loop9_one.context(), k.loop9_one.subst(), k.ex1)));

  // A redex parallel to the chosen one is found at n = 0.
  const Term t = T("if(chk(x),chk(y),a)");
  const std::vector<Position> first{Position{1}};
  const auto obs = max_parallel_problems(t, first, C("s([])"), {}, k.ex1);
  bool found = false;
  for (const auto& ob : obs) {
    const auto res = solve(ob.problem);
    if (res.is_solvable() && std::get<MatchingProblem>(ob.problem).pairs[0].subject == T("chk(y)")) {
      found = true;
      EXPECT_EQ(res.witness().n, 0u);
    }
  }
  EXPECT_TRUE(found);

  const std::vector<Position> root{Position{}};
  for (const auto& ob : max_parallel_problems(t, root, C("s([])"), {}, k.ex1)) {
    EXPECT_NE(ob.family, ProblemFamily::ParallelTerm);
    EXPECT_NE(ob.family, ProblemFamily::ParallelTermVariable);
  }
  const std::vector<Position> nested{Position{}, Position{1}};
  EXPECT_EQ(error_kind([&] { max_parallel_problems(t, nested, C("s([])"), {}, k.ex1); }), ErrorKind::NotParallel);
}

TEST(PositionEquation, Examples) {
  EXPECT_EQ(solve_position_equation(Position{2}, Position{}, Position{2, 2}), (PositionSolution{2, Position{}}));
  EXPECT_EQ(solve_position_equation(Position{}, Position{1, 2}, Position{2}), (PositionSolution{0, Position{1}}));
  EXPECT_FALSE(solve_position_equation(Position{1}, Position{}, Position{2}).has_value());
}

// All solutions are (k + n₀, p^k o₀′): compare with a direct search.
TEST(PositionEquation, LeastSolutionMatchesSearch) {
  Random r(5);
  const auto random_position = [&](std::size_t max_len) {
    std::vector<int> v;
    for (std::size_t k = r.below(max_len + 1); k > 0; --k) v.push_back(1 + static_cast<int>(r.below(2)));
    return Position(v);
  };
  for (int i = 0; i < 2000; ++i) {
    const Position p = random_position(2), q = random_position(3), o = random_position(4);
    std::optional<PositionSolution> least;
    for (std::size_t n = 0; n <= 8 && !least; ++n) {
      const Position target = p.power(n) + q;
      if (target.has_suffix(o)) least = PositionSolution{n, target.prefix(target.size() - o.size())};
    }
    EXPECT_EQ(solve_position_equation(p, q, o), least) << p << " " << q << " " << o;
  }
}

TEST(HereProblems, InfiniteListExample) {
  const auto& k = corpus();
  const ForbiddenPattern pi(T("cons(x,cons(y,inf(z)))"), Position{2, 2}, PatternKind::Here);
  const auto obs = h_problems(T("inf(x)"), Position{}, k.loop_inf.context(), k.loop_inf.subst(), pi);
  ASSERT_EQ(obs.size(), 1u);
  const auto& mp = std::get<MatchingProblem>(obs[0].problem);
  EXPECT_EQ(mp.pairs[0].subject, T("cons(x,cons(s(x),inf(s(s(x)))))"));
  const auto res = solve(obs[0].problem);
  ASSERT_TRUE(res.is_solvable());
  EXPECT_EQ(res.witness().n, 0u);

  const ForbiddenPattern unreachable(T("cons(x,y)"), Position{1}, PatternKind::Here);
  EXPECT_TRUE(h_problems(T("inf(x)"), Position{}, k.loop_inf.context(), k.loop_inf.subst(), unreachable).empty());
  EXPECT_EQ(error_kind([&] { h_problems(T("inf(x)"), Position{}, k.loop_inf.context(), {}, ForbiddenPattern(T("a"), Position{}, PatternKind::Above)); }),
            ErrorKind::InvalidArgument);
}

TEST(HereProblems, SingleUnfolding) {
  const Substitution mu{{"x", T("s(x)")}};
  const ForbiddenPattern pat(T("f(x)"), Position{1}, PatternKind::Here);
  const auto obs = h_problems(T("a"), Position{}, C("f([])"), mu, pat);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(std::get<MatchingProblem>(obs[0].problem).pairs[0].subject, T("f(a)"));
  EXPECT_EQ(obs[0].level_offset, 1u);
  EXPECT_TRUE(solve(obs[0].problem).is_solvable());
  EXPECT_TRUE(pattern_blocks_somewhere(T("a"), Position{}, C("f([])"), mu, pat, 8));
}

TEST(AboveProblems, Examples) {
  const auto& k = corpus();
  const auto innermost = builtin_patterns(InnermostEncoding{}, k.ex1);
  for (std::size_t i = 0; i < k.loop6.length(); ++i) {
    for (const auto& pat : innermost) {
      const auto ab = a_problems(k.loop6.terms()[i], k.loop6.steps()[i][0].pos, k.loop6.context(), k.loop6.subst(), pat);
      EXPECT_TRUE(all_unsolvable(ab.inside));
      EXPECT_TRUE(all_unsolvable(ab.variables));
    }
  }
  bool blocked = false;
  for (const auto& pat : innermost) {
    const auto ab = a_problems(k.loop1.terms()[4], Position{}, k.loop1.context(), k.loop1.subst(), pat);
    blocked = blocked || any_solvable(ab.inside);
  }
  EXPECT_TRUE(blocked);

  const auto ground = a_problems(T("if(true,a,b)"), Position{}, C("s([])"), {},
                                 ForbiddenPattern(T("if(true,x,y)"), Position{}, PatternKind::Above));
  EXPECT_TRUE(ground.variables.empty());
  EXPECT_EQ(error_kind([&] {
              a_problems(T("f(x)"), Position{1}, C("s([])"), {}, ForbiddenPattern(T("a"), Position{}, PatternKind::Above));
            }),
            ErrorKind::VariableRedex);
}

TEST(BelowProblems, Examples) {
  const auto& k = corpus();
  const auto outermost = builtin_patterns(OutermostEncoding{}, k.ex1);
  for (std::size_t i = 0; i < k.loop1.length(); ++i) {
    for (const auto& pat : outermost) {
      const auto bp = b_problems(k.loop1.terms()[i], k.loop1.steps()[i][0].pos, k.loop1.context(), k.loop1.subst(), pat);
      EXPECT_TRUE(all_unsolvable(bp.term));
      EXPECT_TRUE(all_unsolvable(bp.context));
    }
  }
  bool blocked = false;
  for (std::size_t i = 0; i < k.loop6.length(); ++i) {
    for (const auto& pat : outermost) {
      const auto bp = b_problems(k.loop6.terms()[i], k.loop6.steps()[i][0].pos, k.loop6.context(), k.loop6.subst(), pat);
      blocked = blocked || any_solvable(bp.term) || any_solvable(bp.context);
    }
  }
  EXPECT_TRUE(blocked);
  const auto root = b_problems(T("inf(x)"), Position{}, k.loop_inf.context(), k.loop_inf.subst(),
                               ForbiddenPattern(T("inf(x)"), Position{}, PatternKind::Below));
  EXPECT_TRUE(root.term.empty());
  EXPECT_EQ(root.context.size(), 1u);
  const auto flat = b_problems(T("inf(x)"), Position{}, Context(), {}, ForbiddenPattern(T("inf(x)"), Position{}, PatternKind::Below));
  EXPECT_TRUE(flat.context.empty());
}

// The problem sets are exact: some problem is solvable iff the pattern blocks
// an unrolled step. A solvable problem is confirmed within its witness level;
// a fully unsolvable set must see no block up to level 4.
TEST(PatternProblems, CompleteAgainstConditionOne) {
  Random r(777);
  int solvable_sets = 0, unsolvable_sets = 0;
  for (int i = 0; i < 600; ++i) {
    const Term t = testing_support::random_term(r, 3, testing_support::default_signature(),
                                                testing_support::default_variables(), 0.2);
    const auto pos = positions(t);
    const Position q = pos[r.below(pos.size())];
    if (subterm_at(t, q).is_variable()) continue;
    const Context c = testing_support::random_context(r, 2, true);
    const Substitution mu = testing_support::random_substitution(r);
    const Term level = apply_context_substitution(t, ContextSubstitution(c, mu), r.below(3));
    const auto level_pos = positions(level);
    const Term lhs = testing_support::generalize(r, subterm_at(level, level_pos[r.below(level_pos.size())]));
    if (lhs.is_variable()) continue;
    const auto lhs_pos = positions(lhs);
    const PatternKind kind = static_cast<PatternKind>(r.below(3));
    const ForbiddenPattern pat(lhs, lhs_pos[r.below(lhs_pos.size())], kind);

    const auto obs = pattern_problems(t, q, c, mu, pat);
    std::optional<std::size_t> witness_level;
    bool unknown = false;
    for (const auto& ob : obs) {
      const auto res = solve(ob.problem);
      if (res.is_unknown()) unknown = true;
      if (res.is_solvable()) {
        const std::size_t lvl = res.witness().total() + ob.level_offset;
        witness_level = witness_level ? std::min(*witness_level, lvl) : lvl;
      }
    }
    if (witness_level) {
      ++solvable_sets;
      EXPECT_TRUE(pattern_blocks_somewhere(t, q, c, mu, pat, *witness_level + 2))
          << t << " @ " << q << " C=" << c << " mu=" << mu << " " << pat.to_string();
    } else if (!unknown) {
      ++unsolvable_sets;
      EXPECT_FALSE(pattern_blocks_somewhere(t, q, c, mu, pat, 4))
          << t << " @ " << q << " C=" << c << " mu=" << mu << " " << pat.to_string();
    }
  }
  EXPECT_GT(solvable_sets, 50);
  EXPECT_GT(unsolvable_sets, 50);
}

// ---------------------------------------------------------------------------
// decide_loop
// ---------------------------------------------------------------------------

TEST(DecideLoop, FactorialLoop) {
  const auto& k = corpus();
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::Leftmost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::Outermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::Innermost), Kind::NotStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::LeftmostOutermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::LeftmostInnermost), Kind::NotStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::Full), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop1, StrategyKind::Parallel), Kind::IsStrategyLoop);
}

TEST(DecideLoop, InnermostFactorialLoop) {
  const auto& k = corpus();
  EXPECT_EQ(decide(k.ex1, k.loop6, StrategyKind::Leftmost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop6, StrategyKind::Innermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop6, StrategyKind::Outermost), Kind::NotStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop6, StrategyKind::LeftmostInnermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop6, StrategyKind::LeftmostOutermost), Kind::NotStrategyLoop);
}

TEST(DecideLoop, WitnessExponents) {
  const auto& k = corpus();
  const Verdict v7 = decide_loop(k.ex7, k.loop7, StrategySpec::of(StrategyKind::Leftmost));
  ASSERT_EQ(v7.kind, Kind::NotStrategyLoop);
  EXPECT_EQ(v7.evidence->witness.n, 2u);
  EXPECT_EQ(v7.evidence->witness.sigma, (Substitution{{"x", T("z")}}));
  ASSERT_TRUE(v7.evidence->concrete.has_value());

  const Verdict v8 = decide_loop(k.ex8, k.loop8, StrategySpec::of(StrategyKind::Leftmost));
  ASSERT_EQ(v8.kind, Kind::NotStrategyLoop);
  EXPECT_EQ(v8.evidence->witness.n, 9u);
  const Verdict low = decide_loop(k.ex8, k.loop8, StrategySpec::of(StrategyKind::Leftmost), SolverConfig{4});
  EXPECT_NE(low.kind, Kind::IsStrategyLoop);
}

TEST(DecideLoop, ForbiddenPatternExample) {
  const auto& k = corpus();
  const ForbiddenPattern pi(T("cons(x,cons(y,inf(z)))"), Position{2, 2}, PatternKind::Here);
  const Verdict v = decide_loop(k.inf, k.loop_inf, StrategySpec::forbidden({pi}));
  ASSERT_EQ(v.kind, Kind::NotStrategyLoop);
  EXPECT_EQ(v.evidence->obligation.family, ProblemFamily::Here);
  EXPECT_EQ(v.evidence->witness.n, 0u);
  EXPECT_EQ(v.evidence->witness.sigma, (Substitution{{"y", T("s(x)")}, {"z", T("s(s(x))")}}));
  ASSERT_TRUE(v.evidence->pattern.has_value());
  EXPECT_EQ(*v.evidence->pattern, pi);
  ASSERT_TRUE(v.evidence->concrete.has_value());
  EXPECT_EQ(v.evidence->concrete->level, 2u);
}

TEST(DecideLoop, ParallelLoops) {
  const auto& k = corpus();
  EXPECT_EQ(decide(k.ex1, k.loop9_two, StrategyKind::MaxParallelOutermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop9_one, StrategyKind::MaxParallelInnermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop9_one, StrategyKind::MaxParallel), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop9_one, StrategyKind::ParallelInnermost), Kind::IsStrategyLoop);
  EXPECT_EQ(decide(k.ex1, k.loop9_two, StrategyKind::ParallelOutermost), Kind::IsStrategyLoop);
  EXPECT_EQ(error_kind([&] { decide(k.ex1, k.loop9_one, StrategyKind::Leftmost); }), ErrorKind::ShapeMismatch);

  for (const ValidatedLoop* loop : {&k.loop1, &k.loop6}) {
    const Verdict v = decide_loop(k.ex1, *loop, StrategySpec::of(StrategyKind::MaxParallel));
    ASSERT_EQ(v.kind, Kind::NotStrategyLoop);
    ASSERT_TRUE(v.evidence->concrete.has_value());
    EXPECT_EQ(v.evidence->concrete->level, 0u);
    EXPECT_EQ(v.evidence->concrete->step, 1u);
  }
}

TEST(DecideLoop, EncodingsAgree) {
  const auto& k = corpus();
  for (const ValidatedLoop* loop : {&k.loop1, &k.loop6}) {
    EXPECT_EQ(decide(k.ex1, *loop, StrategyKind::Innermost),
              decide_loop(k.ex1, *loop, StrategySpec::forbidden(builtin_patterns(InnermostEncoding{}, k.ex1))).kind);
    EXPECT_EQ(decide(k.ex1, *loop, StrategyKind::Outermost),
              decide_loop(k.ex1, *loop, StrategySpec::forbidden(builtin_patterns(OutermostEncoding{}, k.ex1))).kind);
  }
}

TEST(DecideLoop, UnknownWhenBoundTooSmall) {
  // g(x)μ^n only reaches g(s(s(s(x)))) after 9 steps; with bound 2 the
  // leftmost problem stays open unless a certificate applies.
  const auto& k = corpus();
  const Verdict v = decide_loop(k.ex8, k.loop8, StrategySpec::of(StrategyKind::Leftmost), SolverConfig{2});
  if (v.kind == Kind::Unknown) {
    EXPECT_FALSE(v.open_problems.empty());
  } else {
    EXPECT_EQ(v.kind, Kind::NotStrategyLoop);
  }
}

// Verdicts on the corpus and on random finder loops agree with the concrete
// strategy checks, with the encodings, and with the conjunction law.
TEST(DecideLoop, CoherenceOnCorpusAndRandomLoops) {
  auto loops = testing_support::corpus_loops();
  for (auto& l : testing_support::random_finder_loops(123, 60)) loops.push_back(std::move(l));
  ASSERT_GE(loops.size(), 60u);
  const auto report = testing_support::check_decider_coherence(loops);
  for (const auto& f : report.failures) ADD_FAILURE() << f;
  EXPECT_GT(report.definite, 200);
  EXPECT_GT(report.conjunctions, 50);
}

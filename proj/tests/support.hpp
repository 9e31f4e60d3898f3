#pragma once

// Helpers shared by the unit tests and the acceptance runner: data files,
// quick term parsing, and seeded random generators for property tests.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "loopcert/deciders.hpp"
#include "loopcert/finder.hpp"
#include "loopcert/formats.hpp"
#include "loopcert/loop.hpp"
#include "loopcert/rewrite.hpp"
#include "loopcert/term.hpp"

namespace testing_support {

using namespace loopcert;

inline std::string data_path(const std::string& name) { return std::string(LOOPCERT_DATA_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string read_data(const std::string& name) { return read_text(data_path(name)); }

/// Parses with x, y, z, w, zs, x1..x3 as variables and [] allowed.
inline Term T(const std::string& text) {
  static const VariableSet vars{"x", "y", "z", "w", "zs", "x1", "x2", "x3"};
  return parse_term(text, vars, true);
}

inline Context C(const std::string& text) { return Context(T(text)); }

inline Trs load_trs(const std::string& name) { return parse_trs(read_data(name)); }

inline ValidatedLoop load_loop(const Trs& trs, const std::string& name) {
  return validate_loop(trs, parse_loop_certificate(read_data(name), trs));
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

struct Symbol {
  std::string name;
  std::size_t arity;
};

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<Symbol>& default_signature() {
  static const std::vector<Symbol> sig{{"a", 0}, {"b", 0}, {"s", 1}, {"g", 1}, {"f", 2}, {"h", 2}};
  return sig;
}

inline const std::vector<std::string>& default_variables() {
  static const std::vector<std::string> vars{"x", "y", "z"};
  return vars;
}

inline Term random_term(Random& r, std::size_t depth, const std::vector<Symbol>& sig = default_signature(),
                        const std::vector<std::string>& vars = default_variables(), double var_bias = 0.3) {
  if (depth == 0 || r.chance(var_bias)) {
    if (!vars.empty() && r.chance(0.7)) return Term::variable(r.pick(vars));
    std::vector<Symbol> constants;
    for (const auto& s : sig) {
      if (s.arity == 0) constants.push_back(s);
    }
    return Term::apply(r.pick(constants).name);
  }
  const Symbol& s = r.pick(sig);
  std::vector<Term> args;
  for (std::size_t i = 0; i < s.arity; ++i) args.push_back(random_term(r, depth - 1, sig, vars, var_bias));
  return Term::apply(s.name, std::move(args));
}

/// A context whose hole sits at depth >= 1 unless `allow_empty` and a coin flip says otherwise.
inline Context random_context(Random& r, std::size_t depth, bool allow_empty = false,
                              const std::vector<Symbol>& sig = default_signature(),
                              const std::vector<std::string>& vars = default_variables()) {
  if (allow_empty && r.chance(0.15)) return Context();
  std::vector<Symbol> functions;
  for (const auto& s : sig) {
    if (s.arity > 0) functions.push_back(s);
  }
  const std::size_t hole_depth = 1 + r.below(std::max<std::size_t>(depth, 1));
  // Build bottom-up along a random path.
  Term body = Term::hole();
  for (std::size_t d = 0; d < hole_depth; ++d) {
    const Symbol& s = r.pick(functions);
    const std::size_t at = r.below(s.arity);
    std::vector<Term> args;
    for (std::size_t i = 0; i < s.arity; ++i) {
      args.push_back(i == at ? body : random_term(r, 1, sig, vars));
    }
    body = Term::apply(s.name, std::move(args));
  }
  return Context(body);
}

/// μ with each binding either a variable or a term whose variables occur at
/// most once (keeps iterated application linear in size).
inline Substitution random_substitution(Random& r, const std::vector<Symbol>& sig = default_signature(),
                                        const std::vector<std::string>& vars = default_variables()) {
  Substitution mu;
  for (const auto& x : vars) {
    if (!r.chance(0.6)) continue;
    if (r.chance(0.5)) {
      mu.bind(x, Term::variable(r.pick(vars)));
      continue;
    }
    // Linear non-variable binding: s(v), g(v), f(v, c), f(c, v) or a constant.
    const std::string v = r.pick(vars);
    switch (r.below(5)) {
      case 0: mu.bind(x, Term::apply("s", {Term::variable(v)})); break;
      case 1: mu.bind(x, Term::apply("g", {Term::variable(v)})); break;
      case 2: mu.bind(x, Term::apply("f", {Term::variable(v), Term::apply("a")})); break;
      case 3: mu.bind(x, Term::apply("h", {Term::apply("b"), Term::variable(v)})); break;
      default: mu.bind(x, Term::apply(r.chance(0.5) ? "a" : "b")); break;
    }
  }
  return mu;
}

/// Small random TRS over a fixed signature; rules satisfy the well-formedness
/// conditions (no variable lhs, V(rhs) ⊆ V(lhs)).
inline Trs random_trs(Random& r, std::size_t rules = 3) {
  static const std::vector<Symbol> sig{{"a", 0}, {"b", 0}, {"s", 1}, {"g", 1}, {"f", 2}, {"h", 2}};
  std::vector<Rule> out;
  while (out.size() < rules) {
    Term lhs = random_term(r, 2, sig, {"x", "y"}, 0.35);
    if (lhs.is_variable()) continue;
    const VariableSet lv = variables(lhs);
    std::vector<std::string> rvars(lv.begin(), lv.end());
    Term rhs = random_term(r, 3, sig, rvars, 0.3);
    if (r.chance(0.5)) {
      // Re-embed an instance of the lhs so that loops are common.
      Substitution mu;
      for (const auto& x : rvars) {
        if (r.chance(0.5)) mu.bind(x, Term::apply("s", {Term::variable(r.pick(rvars))}));
      }
      rhs = random_context(r, 2, true, sig, rvars).fill(mu(lhs));
    }
    out.push_back(Rule{lhs, rhs});
  }
  return Trs(std::move(out), {"x", "y"});
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Concrete strategies whose conjunction a spec stands for.
inline std::vector<ConcreteStrategy> concrete_components(const StrategySpec& spec) {
  using K = StrategyKind;
  switch (spec.kind) {
    case K::Full:
    case K::Parallel: return {ConcreteStrategy::full()};
    case K::Leftmost: return {ConcreteStrategy::leftmost()};
    case K::Innermost:
    case K::ParallelInnermost: return {ConcreteStrategy::innermost()};
    case K::Outermost:
    case K::ParallelOutermost: return {ConcreteStrategy::outermost()};
    case K::LeftmostInnermost: return {ConcreteStrategy::leftmost(), ConcreteStrategy::innermost()};
    case K::LeftmostOutermost: return {ConcreteStrategy::leftmost(), ConcreteStrategy::outermost()};
    case K::MaxParallel: return {ConcreteStrategy::max_parallel()};
    case K::MaxParallelInnermost: return {ConcreteStrategy::max_parallel(), ConcreteStrategy::innermost()};
    case K::MaxParallelOutermost: return {ConcreteStrategy::max_parallel(), ConcreteStrategy::outermost()};
    case K::Forbidden: return {ConcreteStrategy::forbidden(spec.patterns)};
  }
  return {};
}

/// First (level, step) at which an unrolled step is rejected, for levels <= max_level.
inline std::optional<std::pair<std::size_t, std::size_t>> first_rejected_step(const Trs& trs,
                                                                              const ValidatedLoop& loop,
                                                                              const StrategySpec& spec,
                                                                              std::size_t max_level) {
  const auto components = concrete_components(spec);
  for (std::size_t n = 0; n <= max_level; ++n) {
    const UnrolledDerivation d = unroll_loop(loop, n);
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
      const std::vector<Position> qs = step_positions(d.steps[i]);
      for (const auto& s : components) {
        if (!strategy_allows(d.terms[i], qs, trs, s)) return std::make_pair(n, i);
      }
    }
  }
  return std::nullopt;
}

/// Loops found by the finder on seeded random TRSs, at most `per_trs` each.
inline std::vector<std::pair<Trs, ValidatedLoop>> random_finder_loops(std::uint64_t seed, std::size_t wanted,
                                                                      std::size_t per_trs = 3) {
  Random r(seed);
  std::vector<std::pair<Trs, ValidatedLoop>> out;
  for (int attempt = 0; attempt < 5000 && out.size() < wanted; ++attempt) {
    const Trs trs = random_trs(r, 2 + r.below(2));
    FinderConfig config;
    config.max_depth = 3;
    config.max_term_size = 40;
    config.max_terms = 2000;
    std::size_t taken = 0;
    for (auto& cert : find_loops(trs, config)) {
      if (taken == per_trs || out.size() == wanted) break;
      out.emplace_back(trs, validate_loop(trs, std::move(cert)));
      ++taken;
    }
  }
  return out;
}

// Variables renamed by first occurrence in start, context, then the
// bindings in order of their renamed keys.
struct Renamed {
  Term start;
  Term context;
  std::map<std::string, Term> subst;
  friend bool operator==(const Renamed&, const Renamed&) = default;
};

inline Term rename(const Term& t, std::map<std::string, std::string>& names) {
  if (t.is_variable()) {
    auto [it, inserted] = names.try_emplace(t.name(), "v" + std::to_string(names.size()));
    return Term::variable(it->second);
  }
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(rename(a, names));
  return Term::apply(t.name(), std::move(args));
}

inline Renamed renamed(const LoopCertificate& cert) {
  std::map<std::string, std::string> names;
  Renamed out{rename(cert.start, names), rename(cert.context.body(), names), {}};
  for (const auto& [x, t] : cert.subst.bindings()) {
    const std::string key = rename(Term::variable(x), names).name();
    out.subst.emplace(key, t);
  }
  for (auto& [x, t] : out.subst) t = rename(t, names);
  return out;
}

}  // namespace testing_support

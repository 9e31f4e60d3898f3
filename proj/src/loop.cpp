#include "loopcert/loop.hpp"

#include <algorithm>

#include "loopcert/error.hpp"

namespace loopcert {

std::vector<Position> step_positions(const Step& step) {
  std::vector<Position> out;
  out.reserve(step.size());
  for (const RewriteStep& s : step) out.push_back(s.pos);
  return out;
}

bool ValidatedLoop::is_parallel() const noexcept {
  return std::any_of(cert_.steps.begin(), cert_.steps.end(),
                     [](const Step& s) { return s.size() > 1; });
}

ValidatedLoop validate_loop(const Trs& trs, LoopCertificate cert) {
  if (cert.steps.empty()) throw Error(ErrorKind::InvalidArgument, "a loop needs at least one step");
  for (const auto& [x, t] : cert.subst.bindings()) {
    if (t.hole_count() != 0) throw Error(ErrorKind::MalformedContext, "hole in the range of the substitution");
  }
  std::vector<Term> terms{cert.start};
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const Step& step = cert.steps[i];
    const std::string where = "step " + std::to_string(i) + ": ";
    if (step.empty()) throw Error(ErrorKind::NotParallel, where + "no positions");
    try {
      terms.push_back(parallel_rewrite(terms.back(), step, trs));
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    }
  }
  const Term expected = apply_context_substitution(
      cert.start, ContextSubstitution(cert.context, cert.subst), 1);
  if (terms.back() != expected) {
    throw Error(ErrorKind::ClosingMismatch,
                "expected " + expected.to_string() + ", derivation ends in " + terms.back().to_string());
  }
  return ValidatedLoop(std::move(cert), std::move(terms));
}

UnrolledDerivation unroll_loop(const ValidatedLoop& loop, std::size_t n) {
  const ContextSubstitution cs(loop.context(), loop.subst());
  const Position prefix = loop.hole().power(n);
  UnrolledDerivation out;
  for (const Term& t : loop.terms()) out.terms.push_back(apply_context_substitution(t, cs, n));
  for (const Step& step : loop.steps()) {
    Step shifted;
    for (const RewriteStep& s : step) shifted.push_back({prefix + s.pos, s.rule});
    out.steps.push_back(std::move(shifted));
  }
  return out;
}

}  // namespace loopcert

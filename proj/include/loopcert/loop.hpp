#pragma once

// Loop certificates t1 -> t2 -> ... -> t_{m+1} = t1(C,μ) and their unrolling
// t_i(C,μ)^n -> t_{i+1}(C,μ)^n at positions p^n q_i, where p is the hole of C.
// A sequential loop is the special case where every step has one position.

#include <cstddef>
#include <vector>

#include "loopcert/rewrite.hpp"
#include "loopcert/term.hpp"

namespace loopcert {

using Step = std::vector<RewriteStep>;

std::vector<Position> step_positions(const Step& step);

struct LoopCertificate {
  Term start;
  std::vector<Step> steps;
  Context context;
  Substitution subst;
};

class ValidatedLoop {
 public:
  const LoopCertificate& certificate() const noexcept { return cert_; }
  /// t_1 .. t_{m+1}
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const std::vector<Step>& steps() const noexcept { return cert_.steps; }
  const Context& context() const noexcept { return cert_.context; }
  const Substitution& subst() const noexcept { return cert_.subst; }
  /// Hole position p of C.
  const Position& hole() const noexcept { return cert_.context.hole(); }
  std::size_t length() const noexcept { return cert_.steps.size(); }
  /// True if some step reduces more than one position.
  bool is_parallel() const noexcept;

 private:
  friend ValidatedLoop validate_loop(const Trs& trs, LoopCertificate cert);
  ValidatedLoop(LoopCertificate cert, std::vector<Term> terms)
      : cert_(std::move(cert)), terms_(std::move(terms)) {}

  LoopCertificate cert_;
  std::vector<Term> terms_;
};

/// Replays every step and checks the closing equation t_{m+1} = t_1(C,μ).
/// Throws NotARedex, NotParallel, RuleIndexOutOfRange, ClosingMismatch or
/// MalformedContext; step numbers in messages are 0-based.
ValidatedLoop validate_loop(const Trs& trs, LoopCertificate cert);

struct UnrolledDerivation {
  /// t_i(C,μ)^n for i = 1..m+1
  std::vector<Term> terms;
  /// steps with every position prefixed by p^n
  std::vector<Step> steps;
};

UnrolledDerivation unroll_loop(const ValidatedLoop& loop, std::size_t n);

}  // namespace loopcert

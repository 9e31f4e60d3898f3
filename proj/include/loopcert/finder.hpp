#pragma once

// Bounded breadth-first loop search: from a start term t, every derivation
// t ->+ s where some subterm s|_p is an instance tμ yields the loop
// certificate with context s[]_p and substitution μ.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "loopcert/loop.hpp"
#include "loopcert/rewrite.hpp"
#include "loopcert/term.hpp"

namespace loopcert {

struct FinderConfig {
  std::size_t max_depth = 6;
  /// Derived terms larger than this are not explored further.
  std::uint64_t max_term_size = 200;
  /// Cap on distinct terms visited per start term.
  std::size_t max_terms = 100000;
  /// Start from this term only; otherwise from every left-hand side.
  std::optional<Term> start;
};

/// Certificates in discovery order; each one passes validate_loop. Loops with
/// the same start, context and substitution up to variable renaming are
/// reported once.
std::vector<LoopCertificate> find_loops(const Trs& trs, const FinderConfig& config = {});

}  // namespace loopcert

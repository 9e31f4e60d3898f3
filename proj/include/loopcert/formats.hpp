#pragma once

// Text formats: terms, TRS files, forbidden-pattern files, replacement maps,
// loop certificates (JSON) and verdict reports (text or JSON).
//
// Term syntax is `f(t1,...,tn)`, `c` or `c()` for constants, and bare
// identifiers for declared variables. Identifiers may contain letters,
// digits and `_ ' + * . -` (but never the arrow `->`).

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "loopcert/deciders.hpp"
#include "loopcert/loop.hpp"
#include "loopcert/rewrite.hpp"
#include "loopcert/term.hpp"

namespace loopcert {

/// Throws SyntaxError. The hole `[]` is accepted only if `allow_hole` is set.
Term parse_term(std::string_view text, const VariableSet& variables, bool allow_hole = false);

/// Unvalidated contents of a TRS file, in declaration order.
struct TrsDocument {
  std::vector<std::string> variables;
  std::vector<Rule> rules;

  friend bool operator==(const TrsDocument&, const TrsDocument&) = default;
};

/// `(VAR x y ...) (RULES lhs -> rhs ...)` with optional `(COMMENT ...)`
/// blocks. Throws SyntaxError only.
TrsDocument parse_trs_document(std::string_view text);
std::string render_trs(const TrsDocument& doc);

/// Throws SyntaxError, VariableLhs, ExtraRhsVariable, ArityMismatch.
Trs parse_trs(std::string_view text);
std::string render_trs(const Trs& trs);

/// One `term @ position : h|a|b` per line; `#` starts a comment. A line
/// `(VAR ...)` declares extra pattern variables. Throws SyntaxError,
/// PositionOutOfTerm, ArityMismatch.
std::vector<ForbiddenPattern> parse_patterns(std::string_view text, const Trs& trs);
std::string render_patterns(const std::vector<ForbiddenPattern>& patterns, const Trs& trs);

/// One `symbol: i,j,...` per line. Throws SyntaxError.
std::map<std::string, std::vector<int>> parse_replacement_map(std::string_view text);

/// JSON object {"start", "steps", "context", "subst"} with optional "vars".
/// Throws SyntaxError, RuleIndexOutOfRange, MalformedContext.
LoopCertificate parse_loop_certificate(std::string_view text, const Trs& trs);
std::string render_loop_certificate(const LoopCertificate& cert);

enum class ReportFormat { Text, Json };

std::string render_verdict(const Verdict& verdict, ReportFormat format);

}  // namespace loopcert

#pragma once

// Library side of the `loopcert` command-line tool. Both commands return the
// process exit status and write their report to `out`, diagnostics to `err`.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "loopcert/deciders.hpp"
#include "loopcert/formats.hpp"
#include "loopcert/rewrite.hpp"

namespace loopcert {

enum ExitCode : int {
  kExitYes = 0,
  kExitNo = 1,
  kExitUnknown = 2,
  kExitInvalid = 3,
};

struct CheckOptions {
  std::string trs_path;
  /// "-" reads the certificate from standard input.
  std::string loop_path;
  std::string strategy;
  std::size_t bound = 64;
  /// Levels replayed concretely when the answer is yes; 0 disables.
  std::size_t unroll = 4;
  ReportFormat format = ReportFormat::Text;
};

struct FindOptions {
  std::string trs_path;
  std::size_t depth = 6;
  std::uint64_t max_size = 200;
  std::optional<std::string> start;
  ReportFormat format = ReportFormat::Json;
};

/// Resolves a strategy string such as "leftmost-outermost",
/// "forbidden:<file>", "context-sensitive:<file>" or "q-restricted:<file>".
/// Throws InvalidArgument for unknown names and the parser errors of the
/// referenced file.
StrategySpec parse_strategy(std::string_view text, const Trs& trs);

/// Exit 0 yes, 1 no, 2 unknown, 3 invalid input.
int run_check(const CheckOptions& options, std::ostream& out, std::ostream& err);

/// Exit 0 if some loop was found, 1 if none, 3 invalid input.
int run_find(const FindOptions& options, std::ostream& out, std::ostream& err);

/// Exit status for a verdict tag.
int exit_code(Verdict::Kind kind);

}  // namespace loopcert

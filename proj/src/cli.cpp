#include "loopcert/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "loopcert/error.hpp"
#include "loopcert/finder.hpp"
#include "loopcert/loop.hpp"

namespace loopcert {

namespace {

std::string read_file(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  buf << in.rdbuf();
  return buf.str();
}

std::optional<std::string_view> strip(std::string_view text, std::string_view prefix) {
  if (!text.starts_with(prefix)) return std::nullopt;
  return text.substr(prefix.size());
}

}  // namespace

StrategySpec parse_strategy(std::string_view text, const Trs& trs) {
  const std::string name(text);
  if (auto file = strip(text, "forbidden:")) {
    return StrategySpec::forbidden(parse_patterns(read_file(std::string(*file)), trs), name);
  }
  if (auto file = strip(text, "context-sensitive:")) {
    ContextSensitiveEncoding enc{parse_replacement_map(read_file(std::string(*file)))};
    return StrategySpec::forbidden(builtin_patterns(enc, trs), name);
  }
  if (auto file = strip(text, "q-restricted:")) {
    QRestrictedEncoding enc;
    const Trs q = parse_trs(read_file(std::string(*file)));
    for (const Rule& r : q.rules()) enc.lhs.push_back(r.lhs);
    return StrategySpec::forbidden(builtin_patterns(enc, trs), name);
  }
  auto kind = parse_strategy_kind(text);
  if (!kind || *kind == StrategyKind::Forbidden) {
    throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + name + "'");
  }
  return StrategySpec::of(*kind);
}

int exit_code(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::IsStrategyLoop: return kExitYes;
    case Verdict::Kind::NotStrategyLoop: return kExitNo;
    case Verdict::Kind::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

int run_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.bound == 0) throw Error(ErrorKind::InvalidArgument, "--bound must be positive");
    const Trs trs = parse_trs(read_file(options.trs_path));
    const StrategySpec spec = parse_strategy(options.strategy, trs);
    const ValidatedLoop loop = validate_loop(trs, parse_loop_certificate(read_file(options.loop_path), trs));
    SolverConfig config;
    config.bound = options.bound;
    Verdict verdict = decide_loop(trs, loop, spec, config);

    if (verdict.kind == Verdict::Kind::IsStrategyLoop && options.unroll > 0) {
      if (auto v = find_concrete_violation(trs, loop, spec, options.unroll)) {
        verdict.kind = Verdict::Kind::Unknown;
        verdict.notes.push_back("inconsistent: level " + std::to_string(v->level) + ", step " +
                                std::to_string(v->step) + " violates " + v->check);
        err << "loopcert: symbolic and concrete checks disagree; reporting unknown\n";
      }
    }
    out << render_verdict(verdict, options.format);
    return exit_code(verdict.kind);
  } catch (const std::exception& e) {
    err << "loopcert: " << e.what() << "\n";
    return kExitInvalid;
  }
}

int run_find(const FindOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const Trs trs = parse_trs(read_file(options.trs_path));
    FinderConfig config;
    config.max_depth = options.depth;
    config.max_term_size = options.max_size;
    if (options.start) {
      const VariableSet vars(trs.variables().begin(), trs.variables().end());
      config.start = parse_term(*options.start, vars);
    }
    const std::vector<LoopCertificate> loops = find_loops(trs, config);
    if (options.format == ReportFormat::Json) {
      nlohmann::json doc;
      doc["loops"] = nlohmann::json::array();
      for (const auto& cert : loops) doc["loops"].push_back(nlohmann::json::parse(render_loop_certificate(cert)));
      out << doc.dump(2) << "\n";
    } else {
      for (const auto& cert : loops) {
        out << cert.start.to_string() << " ->^" << cert.steps.size() << " " << cert.context.to_string()
            << " with " << cert.subst.to_string() << "\n";
      }
      out << loops.size() << " loop(s)\n";
    }
    return loops.empty() ? kExitNo : kExitYes;
  } catch (const std::exception& e) {
    err << "loopcert: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace loopcert

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "loopcert/cli.hpp"

namespace {

loopcert::ReportFormat to_format(const std::string& s) {
  return s == "json" ? loopcert::ReportFormat::Json : loopcert::ReportFormat::Text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check whether loops of a term rewrite system survive a rewrite strategy"};
  app.require_subcommand(1);

  loopcert::CheckOptions check;
  std::string check_format = "text";
  auto* check_cmd = app.add_subcommand("check", "Classify a loop certificate under a strategy");
  check_cmd->add_option("--trs", check.trs_path, "TRS file")->required();
  check_cmd->add_option("--loop", check.loop_path, "loop certificate (JSON, '-' for stdin)")->required();
  check_cmd->add_option("--strategy", check.strategy, "strategy name or kind:file")->required();
  check_cmd->add_option("--bound", check.bound, "solver exponent bound")->check(CLI::PositiveNumber);
  check_cmd->add_option("--unroll", check.unroll, "levels replayed concretely on a yes answer");
  check_cmd->add_option("--format", check_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  loopcert::FindOptions find;
  std::string find_format = "json";
  std::string start;
  auto* find_cmd = app.add_subcommand("find", "Search for loops by bounded rewriting");
  find_cmd->add_option("--trs", find.trs_path, "TRS file")->required();
  find_cmd->add_option("--depth", find.depth, "maximal derivation length")->check(CLI::PositiveNumber);
  find_cmd->add_option("--max-size", find.max_size, "maximal term size")->check(CLI::PositiveNumber);
  find_cmd->add_option("--start", start, "start term (default: every left-hand side)");
  find_cmd->add_option("--format", find_format, "json or text")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : loopcert::kExitInvalid;
  }

  if (*check_cmd) {
    check.format = to_format(check_format);
    return loopcert::run_check(check, std::cout, std::cerr);
  }
  find.format = to_format(find_format);
  if (!start.empty()) find.start = start;
  return loopcert::run_find(find, std::cout, std::cerr);
}

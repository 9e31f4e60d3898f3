#include "loopcert/finder.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "loopcert/error.hpp"

namespace loopcert {

namespace {

struct Node {
  Term term;
  std::vector<Step> path;
};

void rename_into(const Term& t, std::map<std::string, std::string>& names, std::string& out) {
  if (t.is_variable()) {
    auto [it, inserted] = names.try_emplace(t.name(), "");
    if (inserted) it->second = "_" + std::to_string(names.size() - 1);
    out += it->second;
    return;
  }
  out += t.name();
  if (t.arity() == 0) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i > 0) out += ',';
    rename_into(t.arg(i), names, out);
  }
  out += ')';
}

// (start, C, μ) up to consistent variable renaming.
std::string closing_key(const Term& start, const Context& c, const Substitution& mu) {
  std::map<std::string, std::string> names;
  std::string key;
  rename_into(start, names, key);
  key += '|';
  rename_into(c.body(), names, key);
  std::map<std::string, Term> renamed;
  for (const auto& [x, t] : mu.bindings()) {
    std::string dummy;
    rename_into(Term::variable(x), names, dummy);
    renamed.emplace(dummy, t);
  }
  for (const auto& [x, t] : renamed) {
    key += '|' + x + '/';
    rename_into(t, names, key);
  }
  return key;
}

void search_from(const Trs& trs, const Term& start, const FinderConfig& config, std::set<std::string>& emitted,
                 std::vector<LoopCertificate>& out) {
  std::unordered_set<Term, TermHash> visited{start};
  std::deque<Node> queue{Node{start, {}}};
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    if (node.path.size() >= config.max_depth) continue;
    for (const Redex& r : redex_positions(node.term, trs)) {
      Term next = rewrite_at(node.term, r.pos, trs.rule(r.rule));
      if (next.size() > config.max_term_size) continue;
      std::vector<Step> path = node.path;
      path.push_back(Step{r});

      for (const Position& p : positions(next)) {
        auto mu = match_pattern(start, subterm_at(next, p));
        if (!mu) continue;
        Context c(replace_at(next, p, Term::hole()));
        if (!emitted.insert(closing_key(start, c, *mu)).second) continue;
        LoopCertificate cert{start, path, std::move(c), std::move(*mu)};
        validate_loop(trs, cert);
        out.push_back(std::move(cert));
      }
      if (!visited.insert(next).second) continue;
      if (visited.size() >= config.max_terms) return;
      queue.push_back(Node{std::move(next), std::move(path)});
    }
  }
}

}  // namespace

std::vector<LoopCertificate> find_loops(const Trs& trs, const FinderConfig& config) {
  if (config.max_depth == 0 || config.max_term_size == 0 || config.max_terms == 0) {
    throw Error(ErrorKind::InvalidArgument, "finder bounds must be positive");
  }
  std::vector<Term> starts;
  if (config.start) {
    starts.push_back(*config.start);
  } else {
    for (const Rule& r : trs.rules()) {
      if (std::find(starts.begin(), starts.end(), r.lhs) == starts.end()) starts.push_back(r.lhs);
    }
  }
  std::set<std::string> emitted;
  std::vector<LoopCertificate> out;
  for (const Term& start : starts) search_from(trs, start, config, emitted, out);
  return out;
}

}  // namespace loopcert

#include "loopcert/formats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "loopcert/error.hpp"

namespace loopcert {

using nlohmann::json;

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '+' || c == '*' ||
         c == '.' || c == '-';
}

// Character cursor with 1-based line/column tracking.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line = 1, std::size_t column = 1)
      : text_(text), line_(line), column_(column) {}

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
  bool looking_at(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && !at_end(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  std::string read_ident() {
    std::string out;
    while (!at_end() && is_ident_char(peek()) && !looking_at("->")) {
      out += peek();
      advance();
    }
    return out;
  }

  void expect(char c, std::string_view what) {
    skip_space();
    if (peek() != c) fail("expected " + std::string(what));
    advance();
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::string found = at_end() ? "end of input" : "'" + std::string(1, peek()) + "'";
    throw SyntaxError(line_, column_, message + ", found " + found);
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_;
};

Term parse_term_at(Cursor& cur, const VariableSet& variables, bool allow_hole) {
  cur.skip_space();
  if (cur.looking_at(kHoleSymbol)) {
    if (!allow_hole) cur.fail("the hole [] is not allowed here");
    cur.advance(kHoleSymbol.size());
    return Term::hole();
  }
  const std::size_t line = cur.line();
  const std::size_t column = cur.column();
  std::string name = cur.read_ident();
  if (name.empty()) cur.fail("expected a term");
  cur.skip_space();
  if (cur.peek() != '(') {
    if (variables.contains(name)) return Term::variable(std::move(name));
    return Term::apply(std::move(name));
  }
  if (variables.contains(name)) throw SyntaxError(line, column, "variable " + name + " applied to arguments");
  cur.advance();
  std::vector<Term> args;
  cur.skip_space();
  if (cur.peek() == ')') {
    cur.advance();
    return Term::apply(std::move(name));
  }
  for (;;) {
    args.push_back(parse_term_at(cur, variables, allow_hole));
    cur.skip_space();
    if (cur.peek() == ',') {
      cur.advance();
      continue;
    }
    if (cur.peek() == ')') {
      cur.advance();
      break;
    }
    cur.fail("expected ',' or ')'");
  }
  return Term::apply(std::move(name), std::move(args));
}

Term parse_complete_term(std::string_view text, const VariableSet& variables, bool allow_hole,
                         std::size_t line = 1, std::size_t column = 1) {
  Cursor cur(text, line, column);
  Term t = parse_term_at(cur, variables, allow_hole);
  cur.skip_space();
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return t;
}

void skip_balanced(Cursor& cur) {
  int depth = 1;
  while (depth > 0) {
    if (cur.at_end()) cur.fail("unbalanced parentheses");
    if (cur.peek() == '(') ++depth;
    if (cur.peek() == ')') --depth;
    cur.advance();
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

// Column (1-based) of `part` inside `line`, both views into the same buffer.
std::size_t column_of(std::string_view line, std::string_view part) {
  return static_cast<std::size_t>(part.data() - line.data()) + 1;
}

std::optional<int> parse_index(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) return std::nullopt;
  return value;
}

}  // namespace

Term parse_term(std::string_view text, const VariableSet& variables, bool allow_hole) {
  return parse_complete_term(text, variables, allow_hole);
}

// ---------------------------------------------------------------------------
// TRS files
// ---------------------------------------------------------------------------

TrsDocument parse_trs_document(std::string_view text) {
  TrsDocument doc;
  VariableSet vars;
  bool seen_rules = false;
  Cursor cur(text);
  for (;;) {
    cur.skip_space();
    if (cur.at_end()) break;
    cur.expect('(', "'(' opening a section");
    cur.skip_space();
    const std::size_t line = cur.line();
    const std::size_t column = cur.column();
    const std::string keyword = cur.read_ident();
    if (keyword == "VAR") {
      if (seen_rules) throw SyntaxError(line, column, "VAR section must precede RULES");
      for (;;) {
        cur.skip_space();
        if (cur.peek() == ')') break;
        std::string name = cur.read_ident();
        if (name.empty()) cur.fail("expected a variable name");
        if (vars.insert(name).second) doc.variables.push_back(std::move(name));
      }
      cur.advance();
    } else if (keyword == "RULES") {
      seen_rules = true;
      for (;;) {
        cur.skip_space();
        if (cur.peek() == ')') break;
        if (cur.at_end()) cur.fail("expected ')' closing RULES");
        Term lhs = parse_term_at(cur, vars, false);
        cur.skip_space();
        if (!cur.looking_at("->")) cur.fail("expected '->'");
        cur.advance(2);
        Term rhs = parse_term_at(cur, vars, false);
        doc.rules.push_back(Rule{std::move(lhs), std::move(rhs)});
      }
      cur.advance();
    } else if (keyword == "COMMENT") {
      skip_balanced(cur);
    } else {
      throw SyntaxError(line, column, "unknown section '" + keyword + "'");
    }
  }
  return doc;
}

std::string render_trs(const TrsDocument& doc) {
  std::string out;
  if (!doc.variables.empty()) {
    out += "(VAR";
    for (const auto& v : doc.variables) out += " " + v;
    out += ")\n";
  }
  out += "(RULES\n";
  for (const Rule& r : doc.rules) out += "  " + r.to_string() + "\n";
  out += ")\n";
  return out;
}

Trs parse_trs(std::string_view text) {
  TrsDocument doc = parse_trs_document(text);
  return Trs(std::move(doc.rules), std::move(doc.variables));
}

std::string render_trs(const Trs& trs) { return render_trs(TrsDocument{trs.variables(), trs.rules()}); }

// ---------------------------------------------------------------------------
// Pattern files and replacement maps
// ---------------------------------------------------------------------------

std::vector<ForbiddenPattern> parse_patterns(std::string_view text, const Trs& trs) {
  VariableSet vars(trs.variables().begin(), trs.variables().end());
  std::vector<ForbiddenPattern> out;
  const std::vector<std::string_view> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    const std::string_view raw = lines[ln];
    std::string_view line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;

    if (line.starts_with("(VAR")) {
      Cursor cur(line.substr(4), line_no, column_of(raw, line) + 4);
      for (;;) {
        cur.skip_space();
        if (cur.peek() == ')') break;
        std::string name = cur.read_ident();
        if (name.empty()) cur.fail("expected a variable name");
        vars.insert(std::move(name));
      }
      cur.advance();
      cur.skip_space();
      if (!cur.at_end()) cur.fail("unexpected trailing input");
      continue;
    }

    const std::size_t at = line.rfind('@');
    if (at == std::string_view::npos) {
      throw SyntaxError(line_no, column_of(raw, line), "expected 'term @ position : h|a|b'");
    }
    const std::size_t colon = line.find(':', at);
    if (colon == std::string_view::npos) {
      throw SyntaxError(line_no, column_of(raw, line.substr(at)), "expected ':' after the position");
    }
    const std::string_view term_text = line.substr(0, at);
    const std::string_view pos_text = trim(line.substr(at + 1, colon - at - 1));
    const std::string_view kind_text = trim(line.substr(colon + 1));

    Term lhs = parse_complete_term(term_text, vars, false, line_no, column_of(raw, term_text));

    Position pos;
    if (pos_text != "eps") {
      std::vector<int> indices;
      std::size_t start = 0;
      for (;;) {
        std::size_t dot = pos_text.find('.', start);
        std::string_view part = pos_text.substr(start, dot == std::string_view::npos ? dot : dot - start);
        auto index = parse_index(part);
        if (!index) {
          throw SyntaxError(line_no, column_of(raw, pos_text.empty() ? line.substr(at + 1) : pos_text),
                            "malformed position '" + std::string(pos_text) + "'");
        }
        indices.push_back(*index);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
      }
      pos = Position(std::move(indices));
    }

    PatternKind kind;
    if (kind_text == "h") kind = PatternKind::Here;
    else if (kind_text == "a") kind = PatternKind::Above;
    else if (kind_text == "b") kind = PatternKind::Below;
    else {
      throw SyntaxError(line_no, column_of(raw, kind_text.empty() ? line.substr(colon) : kind_text),
                        "pattern kind must be h, a or b");
    }

    Signature sig = trs.signature();
    extend_signature(lhs, sig);
    out.emplace_back(std::move(lhs), std::move(pos), kind);
  }
  return out;
}

std::string render_patterns(const std::vector<ForbiddenPattern>& patterns, const Trs& trs) {
  VariableSet extra;
  for (const auto& pat : patterns) {
    for (const auto& x : variables(pat.lhs)) {
      if (!trs.is_variable(x)) extra.insert(x);
    }
  }
  std::string out;
  if (!extra.empty()) {
    out += "(VAR";
    for (const auto& x : extra) out += " " + x;
    out += ")\n";
  }
  for (const auto& pat : patterns) {
    out += pat.lhs.to_string() + " @ " + pat.pos.to_string() + " : " + std::string(to_string(pat.kind)) + "\n";
  }
  return out;
}

std::map<std::string, std::vector<int>> parse_replacement_map(std::string_view text) {
  std::map<std::string, std::vector<int>> out;
  const std::vector<std::string_view> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view raw = lines[ln];
    std::string_view line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw SyntaxError(ln + 1, column_of(raw, line), "expected 'symbol: indices'");
    }
    const std::string_view symbol = trim(line.substr(0, colon));
    if (symbol.empty() || !std::all_of(symbol.begin(), symbol.end(), is_ident_char)) {
      throw SyntaxError(ln + 1, column_of(raw, line), "malformed symbol name");
    }
    std::vector<int> indices;
    std::string_view rest = trim(line.substr(colon + 1));
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view part = trim(rest.substr(0, comma));
      auto index = parse_index(part);
      if (!index) throw SyntaxError(ln + 1, column_of(raw, part.empty() ? rest : part), "malformed index");
      indices.push_back(*index);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
      if (trim(rest).empty()) throw SyntaxError(ln + 1, column_of(raw, rest), "dangling ','");
    }
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!out.emplace(std::string(symbol), std::move(indices)).second) {
      throw SyntaxError(ln + 1, column_of(raw, line), "duplicate entry for " + std::string(symbol));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loop certificates
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void certificate_error(const std::string& message) { throw SyntaxError(1, 1, message); }

const json& require_field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) certificate_error(std::string("certificate lacks field \"") + name + "\"");
  return *it;
}

std::string require_string(const json& j, const std::string& what) {
  if (!j.is_string()) certificate_error(what + " must be a string");
  return j.get<std::string>();
}

Term certificate_term(const json& j, const std::string& what, const VariableSet& vars, bool allow_hole) {
  const std::string text = require_string(j, what);
  try {
    return parse_term(text, vars, allow_hole);
  } catch (const SyntaxError& e) {
    certificate_error("in " + what + ": " + e.what());
  }
}

RewriteStep certificate_redex(const json& j, const Trs& trs, const std::string& what) {
  if (!j.is_object()) certificate_error(what + " must be an object {\"pos\": [...], \"rule\": i}");
  const json& pos = require_field(j, "pos");
  if (!pos.is_array()) certificate_error(what + ".pos must be an array");
  std::vector<int> indices;
  for (const json& i : pos) {
    if (!i.is_number_integer() || i.get<long long>() < 1) {
      certificate_error(what + ".pos must contain positive integers");
    }
    indices.push_back(static_cast<int>(i.get<long long>()));
  }
  const json& rule = require_field(j, "rule");
  if (!rule.is_number_integer()) certificate_error(what + ".rule must be an integer");
  const long long index = rule.get<long long>();
  if (index < 0 || static_cast<unsigned long long>(index) >= trs.size()) {
    throw Error(ErrorKind::RuleIndexOutOfRange,
                what + " uses rule " + std::to_string(index) + " but the TRS has " + std::to_string(trs.size()) +
                    " rules");
  }
  return RewriteStep{Position(std::move(indices)), static_cast<std::size_t>(index)};
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json position_json(const Position& p) { return json(p.indices()); }

json substitution_json(const Substitution& s) {
  json out = json::object();
  for (const auto& [x, t] : s.bindings()) out[x] = t.to_string();
  return out;
}

}  // namespace

LoopCertificate parse_loop_certificate(std::string_view text, const Trs& trs) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw SyntaxError(line, column, "malformed JSON");
  }
  if (!doc.is_object()) certificate_error("certificate must be a JSON object");

  VariableSet vars(trs.variables().begin(), trs.variables().end());
  if (auto it = doc.find("vars"); it != doc.end()) {
    if (!it->is_array()) certificate_error("\"vars\" must be an array of names");
    for (const json& v : *it) vars.insert(require_string(v, "\"vars\" entry"));
  }

  Term start = certificate_term(require_field(doc, "start"), "\"start\"", vars, true);
  if (start.hole_count() > 0) throw Error(ErrorKind::MalformedContext, "\"start\" contains a hole");

  const json& steps_json = require_field(doc, "steps");
  if (!steps_json.is_array() || steps_json.empty()) certificate_error("\"steps\" must be a nonempty array");
  std::vector<Step> steps;
  for (std::size_t i = 0; i < steps_json.size(); ++i) {
    const json& sj = steps_json[i];
    const std::string what = "step " + std::to_string(i);
    Step step;
    if (sj.is_object()) {
      step.push_back(certificate_redex(sj, trs, what));
    } else if (sj.is_array() && !sj.empty()) {
      for (std::size_t k = 0; k < sj.size(); ++k) {
        step.push_back(certificate_redex(sj[k], trs, what + " redex " + std::to_string(k)));
      }
    } else {
      certificate_error(what + " must be a redex object or a nonempty array of them");
    }
    steps.push_back(std::move(step));
  }

  Term context_body = certificate_term(require_field(doc, "context"), "\"context\"", vars, true);
  Context context(context_body);

  Substitution subst;
  if (auto it = doc.find("subst"); it != doc.end()) {
    if (!it->is_object()) certificate_error("\"subst\" must be an object");
    for (const auto& [x, value] : it->items()) {
      if (!vars.contains(x)) certificate_error("\"subst\" binds " + x + ", which is not a declared variable");
      Term t = certificate_term(value, "\"subst\"." + x, vars, true);
      subst.bind(x, std::move(t));
    }
  }
  return LoopCertificate{std::move(start), std::move(steps), std::move(context), std::move(subst)};
}

std::string render_loop_certificate(const LoopCertificate& cert) {
  VariableSet vars;
  collect_variables(cert.start, vars);
  collect_variables(cert.context.body(), vars);
  for (const auto& [x, t] : cert.subst.bindings()) {
    vars.insert(x);
    collect_variables(t, vars);
  }
  json steps = json::array();
  for (const Step& step : cert.steps) {
    json sj = json::array();
    for (const RewriteStep& r : step) sj.push_back({{"pos", position_json(r.pos)}, {"rule", r.rule}});
    steps.push_back(std::move(sj));
  }
  json doc = {{"start", cert.start.to_string()},
              {"steps", std::move(steps)},
              {"context", cert.context.to_string()},
              {"subst", substitution_json(cert.subst)},
              {"vars", json(std::vector<std::string>(vars.begin(), vars.end()))}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Verdict reports
// ---------------------------------------------------------------------------

namespace {

json problem_json(const Problem& problem) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        json out;
        out["text"] = p.to_string();
        out["mu"] = substitution_json(p.mu);
        if constexpr (std::is_same_v<P, MatchingProblem>) {
          out["kind"] = "matching";
          json pairs = json::array();
          for (const auto& pr : p.pairs) {
            pairs.push_back({{"subject", pr.subject.to_string()}, {"pattern", pr.pattern.to_string()}});
          }
          out["pairs"] = std::move(pairs);
          json ids = json::array();
          for (const auto& id : p.identities) ids.push_back({id.lhs.to_string(), id.rhs.to_string()});
          out["identities"] = std::move(ids);
        } else {
          out["kind"] = "extended";
          out["outer"] = p.outer.to_string();
          out["pattern"] = p.pattern.to_string();
          out["context"] = p.context.to_string();
          out["term"] = p.term.to_string();
        }
        return out;
      },
      problem);
}

json witness_json(const Witness& w) {
  if (w.m) return {{"m", *w.m}, {"k", w.n}};
  return {{"n", w.n}};
}

std::string witness_text(const Witness& w) {
  std::string s = w.m ? "m=" + std::to_string(*w.m) + ", k=" + std::to_string(w.n) : "n=" + std::to_string(w.n);
  return s + ", sigma=" + w.sigma.to_string();
}

std::string positions_text(const std::vector<Position>& ps) {
  std::string out;
  for (const auto& p : ps) {
    if (!out.empty()) out += ", ";
    out += p.to_string();
  }
  return out;
}

json verdict_json(const Verdict& v) {
  json out;
  out["strategy"] = v.strategy;
  out["verdict"] = std::string(to_string(v.kind));
  out["solver"] = {{"bound", v.config.bound}, {"max_term_size", v.config.max_term_size}};
  out["statistics"] = {{"problems", v.stats.problems},
                       {"solvable", v.stats.solvable},
                       {"unsolvable", v.stats.unsolvable},
                       {"unknown", v.stats.unknown}};
  if (v.evidence) {
    const Evidence& e = *v.evidence;
    json ev;
    ev["step"] = e.step;
    if (e.position) ev["position_index"] = *e.position;
    ev["family"] = std::string(to_string(e.obligation.family));
    if (e.pattern) ev["pattern"] = e.pattern->to_string();
    ev["problem"] = problem_json(e.obligation.problem);
    ev["witness"] = witness_json(e.witness);
    ev["sigma"] = substitution_json(e.witness.sigma);
    if (e.concrete) {
      json positions = json::array();
      for (const auto& p : e.concrete->positions) positions.push_back(position_json(p));
      ev["concrete"] = {{"level", e.concrete->level},
                        {"step", e.concrete->step},
                        {"check", e.concrete->check},
                        {"term", e.concrete->term.to_string()},
                        {"positions", std::move(positions)}};
    } else {
      ev["concrete"] = nullptr;
    }
    out["evidence"] = std::move(ev);
  } else {
    out["evidence"] = nullptr;
  }
  json open = json::array();
  for (const OpenProblem& op : v.open_problems) {
    json o;
    o["step"] = op.step;
    o["family"] = std::string(to_string(op.obligation.family));
    if (op.pattern) o["pattern"] = op.pattern->to_string();
    o["problem"] = problem_json(op.obligation.problem);
    open.push_back(std::move(o));
  }
  out["open_problems"] = std::move(open);
  out["notes"] = v.notes;
  return out;
}

std::string verdict_text(const Verdict& v) {
  std::ostringstream os;
  switch (v.kind) {
    case Verdict::Kind::IsStrategyLoop:
      os << "YES: loop under strategy " << v.strategy << "\n";
      break;
    case Verdict::Kind::NotStrategyLoop:
      os << "NO: not a loop under strategy " << v.strategy << "\n";
      break;
    case Verdict::Kind::Unknown:
      os << "MAYBE: undecided for strategy " << v.strategy << " (" << v.open_problems.size()
         << " open problems)\n";
      break;
  }
  if (v.evidence) {
    const Evidence& e = *v.evidence;
    os << "evidence: step " << e.step;
    if (e.position) os << " (redex " << *e.position << ")";
    os << ", " << to_string(e.obligation.family) << " problem";
    if (e.pattern) os << " for pattern " << e.pattern->to_string();
    os << "\n";
    os << "  problem: " << to_string(e.obligation.problem) << "\n";
    os << "  solvable with " << witness_text(e.witness) << "\n";
    if (e.concrete) {
      const ConcreteViolation& c = *e.concrete;
      os << "  unrolling level " << c.level << ", step " << c.step << ": reducing at " << positions_text(c.positions)
         << " violates " << c.check << "\n";
      os << "    in " << c.term.to_string() << "\n";
    }
  }
  for (const OpenProblem& op : v.open_problems) {
    os << "open: step " << op.step << ", " << to_string(op.obligation.family) << ": "
       << to_string(op.obligation.problem) << "\n";
  }
  for (const auto& note : v.notes) os << "note: " << note << "\n";
  os << "problems: " << v.stats.problems << " (" << v.stats.solvable << " solvable, " << v.stats.unsolvable
     << " unsolvable, " << v.stats.unknown << " unknown)\n";
  os << "solver: bound " << v.config.bound << ", max term size " << v.config.max_term_size << "\n";
  return os.str();
}

}  // namespace

std::string render_verdict(const Verdict& verdict, ReportFormat format) {
  if (format == ReportFormat::Json) return verdict_json(verdict).dump(2) + "\n";
  return verdict_text(verdict);
}

}  // namespace loopcert

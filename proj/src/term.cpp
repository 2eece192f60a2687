#include <map>
#include <functional>
#include "dofforge/term.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

namespace dofforge {

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}

struct Term::Node {
  TermKind kind;
  std::string name;
  double num = 0.0;
  std::vector<Term> args;
  std::string text;
};

namespace {

std::string render(TermKind kind, const std::string& name, double num, const std::vector<Term>& args) {
  switch (kind) {
    case TermKind::Var: return "?" + name;
    case TermKind::Sym: return name;
    case TermKind::Num: return format_number(num);
    case TermKind::App: {
      std::string out = "(" + name;
      for (const auto& a : args) out += " " + a.str();
      return out + ")";
    }
  }
  return {};
}

const std::unordered_map<std::string, int>& heads() {
  static const std::unordered_map<std::string, int> table = {
      {"translate", 2},
      {"rotate", 4},
      {"scale", 3},
      {"invariant-point", 3},
      {"1d-constrained-point", 3},
      {"2d-constrained-point", 3},
      {"fixed-distance-point", 4},
      {"fixed-distance-line", 4},
      {"invariant-direction", 2},
      {"invariant-dimension", 2},
      {">>", 2},
      {"v-", 2},
      {"plus", 2},
      {"minus", 2},
      {"times", 2},
      {"negate", 1},
      {"magnitude", 1},
      {"point", 2},
      {"vec", 2},
      {"direction-of", 1},
      {"make-line-locus", 2},
      {"make-ray-locus", 2},
      {"make-circle-locus", 2},
      {"make-displaced-line", 3},
      {"angular-bisector", 4},
      {"0d-intersection", 2},
      {"shift-locus", 2},
      {"line-distance", 3},
      {"biased-offset", 3},
      {"biased-gap", 3},
      {"rotation-to", 3},
      {"direction-angle", 2},
      {"make-parabola-locus", 6},
      {"make-hyperbola-locus", 6},
      {"distinct", 2},
      {"unbound", 1},
      {"absent", 1},
  };
  return table;
}

bool is_number_text(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char c = s[0];
  if (!(std::isdigit(static_cast<unsigned char>(c)) || ((c == '-' || c == '+' || c == '.') && s.size() > 1))) return false;
  const char* begin = s.data() + (c == '+' ? 1 : 0);
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Term::Term() : Term(Term::sym("nil")) {}

Term Term::var(const std::string& name) {
  auto n = std::make_shared<Node>(Node{TermKind::Var, name, 0.0, {}, {}});
  n->text = render(n->kind, n->name, 0.0, {});
  return Term(std::move(n));
}

Term Term::sym(const std::string& name) {
  auto n = std::make_shared<Node>(Node{TermKind::Sym, name, 0.0, {}, {}});
  n->text = name;
  return Term(std::move(n));
}

Term Term::num(double v) {
  auto n = std::make_shared<Node>(Node{TermKind::Num, {}, v == 0.0 ? 0.0 : v, {}, {}});
  n->text = format_number(n->num);
  return Term(std::move(n));
}

Term Term::app(const std::string& head, std::vector<Term> args) {
  auto n = std::make_shared<Node>(Node{TermKind::App, head, 0.0, std::move(args), {}});
  n->text = render(TermKind::App, n->name, 0.0, n->args);
  return Term(std::move(n));
}

TermKind Term::kind() const { return n_->kind; }
bool Term::is_app(const std::string& head) const { return is_app() && n_->name == head; }
bool Term::is_sym(const std::string& name) const { return is_sym() && n_->name == name; }
const std::string& Term::name() const { return n_->name; }
double Term::number() const { return n_->num; }
const std::vector<Term>& Term::args() const { return n_->args; }
std::string Term::str() const { return n_->text; }

bool Term::operator==(const Term& o) const {
  return n_ == o.n_ || n_->text == o.n_->text;
}

std::optional<int> head_arity(const std::string& head) {
  auto it = heads().find(head);
  if (it == heads().end()) return std::nullopt;
  return it->second;
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
    return std::string(buf, p);
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

SexpReader::SexpReader(const std::string& text) : text_(text) {}

void SexpReader::advance() {
  if (text_[pos_] == '\n') {
    ++line_;
    col_ = 1;
  } else {
    ++col_;
  }
  ++pos_;
}

void SexpReader::skip_space() {
  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (c == ';') {
      while (pos_ < text_.size() && text_[pos_] != '\n') advance();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else {
      break;
    }
  }
}

void SexpReader::fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

bool SexpReader::at_end() {
  skip_space();
  return pos_ >= text_.size();
}

bool SexpReader::peek_open() { return !at_end() && text_[pos_] == '('; }
bool SexpReader::peek_close() { return !at_end() && text_[pos_] == ')'; }

void SexpReader::expect_open() {
  if (!peek_open()) fail("expected '('");
  advance();
}

void SexpReader::expect_close() {
  if (!peek_close()) fail("expected ')'");
  advance();
}

std::string SexpReader::read_atom() {
  if (at_end()) fail("unexpected end of input");
  if (text_[pos_] == '(' || text_[pos_] == ')') fail("expected an atom");
  std::string out;
  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
    out += c;
    advance();
  }
  return out;
}

Term SexpReader::read_term() {
  if (at_end()) fail("unexpected end of input");
  if (peek_close()) fail("unbalanced ')'");
  if (peek_open()) {
    const int l = line_, c = col_;
    advance();
    if (peek_open() || peek_close()) fail("expected a head symbol");
    const std::string head = read_atom();
    std::vector<Term> args;
    while (!peek_close()) {
      if (at_end()) throw ParseError("unterminated '(" + head + "'", l, c);
      args.push_back(read_term());
    }
    advance();
    const auto ar = head_arity(head);
    if (!ar) throw ParseError("unknown head '" + head + "'", l, c);
    if (*ar != static_cast<int>(args.size())) {
      throw ParseError("head '" + head + "' takes " + std::to_string(*ar) + " arguments, got " +
                           std::to_string(args.size()),
                       l, c);
    }
    return Term::app(head, std::move(args));
  }
  const std::string atom = read_atom();
  double v;
  if (atom[0] == '?') {
    if (atom.size() == 1) fail("empty variable name");
    return Term::var(atom.substr(1));
  }
  if (is_number_text(atom, v)) return Term::num(v);
  return Term::sym(atom);
}

Term parse_term(const std::string& text) {
  SexpReader r(text);
  Term t = r.read_term();
  if (!r.at_end()) r.fail("trailing input after term");
  return t;
}

std::vector<Term> parse_terms(const std::string& text) {
  SexpReader r(text);
  std::vector<Term> out;
  while (!r.at_end()) out.push_back(r.read_term());
  return out;
}

namespace {

Term walk(const Term& t, const Subst& s) {
  Term cur = t;
  while (cur.is_var()) {
    auto it = s.find(cur.name());
    if (it == s.end()) break;
    cur = it->second;
  }
  return cur;
}

}  // namespace

Term substitute(const Subst& s, const Term& t) {
  const Term w = walk(t, s);
  if (!w.is_app()) return w;
  std::vector<Term> args;
  args.reserve(w.arity());
  bool changed = false;
  for (const auto& a : w.args()) {
    args.push_back(substitute(s, a));
    changed = changed || !(args.back() == a);
  }
  return changed ? Term::app(w.name(), std::move(args)) : w;
}

bool occurs(const std::string& var, const Term& t, const Subst& s) {
  const Term w = walk(t, s);
  if (w.is_var()) return w.name() == var;
  if (!w.is_app()) return false;
  for (const auto& a : w.args()) {
    if (occurs(var, a, s)) return true;
  }
  return false;
}

bool unify(const Term& a, const Term& b, Subst& s) {
  const Term x = walk(a, s), y = walk(b, s);
  if (x.is_var() && y.is_var() && x.name() == y.name()) return true;
  if (x.is_var()) {
    if (occurs(x.name(), y, s)) return false;
    s[x.name()] = y;
    return true;
  }
  if (y.is_var()) return unify(y, x, s);
  if (x.kind() != y.kind()) return false;
  if (!x.is_app()) return x == y;
  if (x.name() != y.name() || x.arity() != y.arity()) return false;
  for (size_t i = 0; i < x.arity(); ++i) {
    if (!unify(x.arg(i), y.arg(i), s)) return false;
  }
  return true;
}

bool match(const Term& pattern, const Term& t, Subst& s) {
  if (pattern.is_var()) {
    auto it = s.find(pattern.name());
    if (it != s.end()) return it->second == t;
    s[pattern.name()] = t;
    return true;
  }
  if (pattern.kind() != t.kind()) return false;
  if (!pattern.is_app()) return pattern == t;
  if (pattern.name() != t.name() || pattern.arity() != t.arity()) return false;
  for (size_t i = 0; i < t.arity(); ++i) {
    if (!match(pattern.arg(i), t.arg(i), s)) return false;
  }
  return true;
}

void collect_vars(const Term& t, std::vector<std::string>& ordered) {
  if (t.is_var()) {
    if (std::find(ordered.begin(), ordered.end(), t.name()) == ordered.end()) ordered.push_back(t.name());
    return;
  }
  for (const auto& a : t.is_app() ? t.args() : std::vector<Term>{}) collect_vars(a, ordered);
}

std::set<std::string> vars_of(const Term& t) {
  std::vector<std::string> v;
  collect_vars(t, v);
  return {v.begin(), v.end()};
}

bool contains(const Term& t, const Term& sub) {
  if (t == sub) return true;
  if (!t.is_app()) return false;
  for (const auto& a : t.args()) {
    if (contains(a, sub)) return true;
  }
  return false;
}

bool contains_sym(const Term& t, const std::string& name) {
  if (t.is_sym()) return t.name() == name;
  if (!t.is_app()) return false;
  for (const auto& a : t.args()) {
    if (contains_sym(a, name)) return true;
  }
  return false;
}

Term replace(const Term& t, const Term& from, const Term& to) {
  if (t == from) return to;
  if (!t.is_app()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(replace(a, from, to));
  return Term::app(t.name(), std::move(args));
}

Term replace_sym(const Term& t, const std::map<std::string, Term>& table) {
  if (t.is_sym()) {
    auto it = table.find(t.name());
    return it == table.end() ? t : it->second;
  }
  if (!t.is_app()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(replace_sym(a, table));
  return Term::app(t.name(), std::move(args));
}

Term rename_apart(const Term& t, const std::string& tag) {
  if (t.is_var()) return Term::var(t.name() + "_" + tag);
  if (!t.is_app()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(rename_apart(a, tag));
  return Term::app(t.name(), std::move(args));
}

std::vector<Term> canonical_vars(const std::vector<Term>& ts) {
  std::vector<std::string> order;
  for (const auto& t : ts) collect_vars(t, order);
  // Simultaneous rename; substitute() would chase v1 -> v2 -> v1 forever.
  std::map<std::string, std::string> names;
  for (size_t i = 0; i < order.size(); ++i) names[order[i]] = "v" + std::to_string(i + 1);
  std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
    if (t.is_var()) return Term::var(names.at(t.name()));
    if (!t.is_app()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(go(a));
    return Term::app(t.name(), std::move(args));
  };
  std::vector<Term> out;
  for (const auto& t : ts) out.push_back(go(t));
  return out;
}

std::string join_terms(const std::vector<Term>& ts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) out += sep;
    out += ts[i].str();
  }
  return out;
}

}  // namespace dofforge

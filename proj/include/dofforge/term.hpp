#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dofforge {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

enum class TermKind { Var, Sym, Num, App };

// Immutable S-expression term. ?x variables, $x constants, bare symbols,
// numbers and applications (head arg...).
class Term {
 public:
  Term();
  static Term var(const std::string& name);
  static Term sym(const std::string& name);
  static Term num(double v);
  static Term app(const std::string& head, std::vector<Term> args);

  TermKind kind() const;
  bool is_var() const { return kind() == TermKind::Var; }
  bool is_sym() const { return kind() == TermKind::Sym; }
  bool is_num() const { return kind() == TermKind::Num; }
  bool is_app() const { return kind() == TermKind::App; }
  bool is_app(const std::string& head) const;
  bool is_sym(const std::string& name) const;
  // Variable name without '?', symbol text, or application head.
  const std::string& name() const;
  double number() const;
  const std::vector<Term>& args() const;
  const Term& arg(size_t i) const { return args().at(i); }
  size_t arity() const { return args().size(); }

  std::string str() const;
  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  // Total order on printed form; used for every canonical sort.
  bool operator<(const Term& o) const { return str() < o.str(); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

// Known heads and their arities. Parsing rejects unknown heads.
std::optional<int> head_arity(const std::string& head);

Term parse_term(const std::string& text);
std::vector<Term> parse_terms(const std::string& text);

// Reader over a token stream, shared with the rule-base parser.
class SexpReader {
 public:
  explicit SexpReader(const std::string& text);
  bool at_end();
  bool peek_open();
  bool peek_close();
  void expect_open();
  void expect_close();
  // Bare atom (symbol/number) as raw text.
  std::string read_atom();
  Term read_term();
  int line() const { return line_; }
  int col() const { return col_; }
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  void skip_space();
  std::string text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  void advance();
};

using Subst = std::map<std::string, Term>;

Term substitute(const Subst& s, const Term& t);
bool occurs(const std::string& var, const Term& t, const Subst& s);
// Most general unifier extending s; false on clash or occurs-check failure.
bool unify(const Term& a, const Term& b, Subst& s);
// One-way match: only variables of `pattern` bind; variables in `t` are rigid.
bool match(const Term& pattern, const Term& t, Subst& s);

std::set<std::string> vars_of(const Term& t);
void collect_vars(const Term& t, std::vector<std::string>& ordered);
bool contains(const Term& t, const Term& sub);
bool contains_sym(const Term& t, const std::string& name);
Term replace(const Term& t, const Term& from, const Term& to);
Term replace_sym(const Term& t, const std::map<std::string, Term>& table);
// Renames every variable v to v_<tag>.
Term rename_apart(const Term& t, const std::string& tag);

// Renames variables by first appearance across the list (?v1, ?v2, ...) so
// alpha-equivalent lists print identically.
std::vector<Term> canonical_vars(const std::vector<Term>& ts);
std::string join_terms(const std::vector<Term>& ts, const std::string& sep = " ");

std::string format_number(double v);

}  // namespace dofforge

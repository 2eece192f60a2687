#include "dofforge/rules.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dofforge {

extern const char* const kDefaultRulesText;

namespace {

enum class Section { None, Action, Match, Reform };

std::optional<GeomKind> parse_kind_atom(const std::string& a, SexpReader& r) {
  if (a == "any") return std::nullopt;
  if (a == "circle") return GeomKind::Circle;
  if (a == "line-segment") return GeomKind::LineSegment;
  r.fail("unknown geom kind '" + a + "'");
}

struct Clause {
  std::string name;
  std::vector<Term> terms;
  int line, col;
};

}  // namespace

std::string RuleBase::hash() const {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : source) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

RuleBase RuleBase::without(const std::string& name) const {
  auto drop = [&](const std::string& n) { return n == name || n.rfind(name + "-", 0) == 0; };
  RuleBase out = *this;
  std::erase_if(out.actions, [&](const ActionRule& r) { return drop(r.name); });
  std::erase_if(out.matches, [&](const MatchRule& r) { return drop(r.name); });
  std::erase_if(out.reforms, [&](const ReformRule& r) { return drop(r.name); });
  out.source += "\n;; without " + name + "\n";
  return out;
}

RuleBase parse_rule_base(const std::string& text) {
  RuleBase rb;
  rb.source = text;
  SexpReader r(text);
  Section section = Section::None;
  while (!r.at_end()) {
    if (!r.peek_open()) {
      const std::string header = r.read_atom();
      if (header == "ACTION-RULES") section = Section::Action;
      else if (header == "MATCH-RULES") section = Section::Match;
      else if (header == "REFORM-RULES") section = Section::Reform;
      else r.fail("unknown section '" + header + "'");
      continue;
    }
    const int rule_line = r.line(), rule_col = r.col();
    r.expect_open();
    if (r.read_atom() != "rule") throw ParseError("expected (rule ...)", rule_line, rule_col);
    if (section == Section::None) throw ParseError("rule outside of a section", rule_line, rule_col);
    const std::string name = r.read_atom();
    std::optional<GeomKind> kind;
    if (!r.peek_open() && !r.peek_close()) kind = parse_kind_atom(r.read_atom(), r);
    std::vector<Clause> clauses;
    while (!r.peek_close()) {
      if (r.at_end()) throw ParseError("unterminated rule '" + name + "'", rule_line, rule_col);
      Clause c;
      c.line = r.line();
      c.col = r.col();
      r.expect_open();
      c.name = r.read_atom();
      while (!r.peek_close()) {
        if (r.at_end()) throw ParseError("unterminated clause '" + c.name + "'", c.line, c.col);
        c.terms.push_back(r.read_term());
      }
      r.expect_close();
      clauses.push_back(std::move(c));
    }
    r.expect_close();

    auto bad = [&](const Clause& c, const std::string& why) { throw ParseError(why, c.line, c.col); };
    if (section == Section::Action) {
      ActionRule a;
      a.name = name;
      a.kind = kind;
      bool has_pattern = false;
      for (auto& c : clauses) {
        if (c.name == "pattern") {
          if (c.terms.size() != 1 || !inv_type_of(c.terms[0])) bad(c, "pattern needs one invariant term");
          a.pattern = c.terms[0];
          has_pattern = true;
        } else if (c.name == "preserve") {
          a.preserve = c.terms;
        } else if (c.name == "achieve") {
          a.achieve = c.terms;
        } else {
          bad(c, "unknown clause '" + c.name + "' in action rule");
        }
      }
      if (!has_pattern) throw ParseError("action rule '" + name + "' has no pattern", rule_line, rule_col);
      rb.actions.push_back(std::move(a));
    } else if (section == Section::Match) {
      MatchRule m;
      m.name = name;
      bool lhs = false, rhs = false;
      for (auto& c : clauses) {
        if (c.name == "lhs") {
          if (c.terms.size() != 2) bad(c, "matching rule lhs needs two terms");
          m.lhs1 = c.terms[0];
          m.lhs2 = c.terms[1];
          lhs = true;
        } else if (c.name == "rhs") {
          if (c.terms.size() != 1) bad(c, "matching rule rhs needs one term");
          m.rhs = c.terms[0];
          rhs = true;
        } else if (c.name == "guard") {
          m.guards = c.terms;
        } else {
          bad(c, "unknown clause '" + c.name + "' in matching rule");
        }
      }
      if (!lhs || !rhs) throw ParseError("matching rule '" + name + "' needs lhs and rhs", rule_line, rule_col);
      rb.matches.push_back(std::move(m));
    } else {
      ReformRule f;
      f.name = name;
      f.kind = kind;
      bool lhs = false;
      for (auto& c : clauses) {
        if (c.name == "lhs") {
          if (c.terms.empty()) bad(c, "reformulation lhs is empty");
          for (const auto& t : c.terms) {
            if (!inv_type_of(t)) bad(c, "reformulation lhs must list invariants");
          }
          f.lhs = c.terms;
          lhs = true;
        } else if (c.name == "rhs") {
          for (const auto& t : c.terms) {
            if (!inv_type_of(t)) bad(c, "reformulation rhs must list invariants");
          }
          f.rhs = c.terms;
        } else if (c.name == "guard") {
          f.guards = c.terms;
        } else {
          bad(c, "unknown clause '" + c.name + "' in reformulation rule");
        }
      }
      if (!lhs) throw ParseError("reformulation rule '" + name + "' has no lhs", rule_line, rule_col);
      rb.reforms.push_back(std::move(f));
    }
  }
  return rb;
}

RuleBase load_rule_base(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DofError("cannot read rule base '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rule_base(ss.str());
}

const std::string& default_rule_text() {
  static const std::string text = kDefaultRulesText;
  return text;
}

const RuleBase& default_rule_base() {
  static const RuleBase rb = parse_rule_base(default_rule_text());
  return rb;
}

InvariantActions actions_for(const Term& invariant, GeomKind kind, const RuleBase& rb, int& fresh) {
  InvariantActions out;
  for (const auto& rule : rb.actions) {
    if (rule.kind && *rule.kind != kind) continue;
    Subst s;
    if (!match(rule.pattern, invariant, s)) continue;
    const std::string tag = std::to_string(++fresh);
    for (const auto& t : rule.preserve) out.preserve.push_back(canonical_term(rename_apart(substitute(s, t), tag)));
    for (const auto& t : rule.achieve) out.achieve.push_back(canonical_term(rename_apart(substitute(s, t), tag)));
  }
  return out;
}

Term canonical_term(const Term& t) {
  if (!t.is_app()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(canonical_term(a));
  if (t.name() == "0d-intersection" && args[1] < args[0]) std::swap(args[0], args[1]);
  return Term::app(t.name(), std::move(args));
}

namespace {

thread_local int g_rule_tag = 0;

bool guards_hold(const std::vector<Term>& guards, const Subst& rule_s, const Subst& s) {
  for (const auto& g : guards) {
    if (g.is_app("distinct")) {
      if (substitute(s, substitute(rule_s, g.arg(0))) == substitute(s, substitute(rule_s, g.arg(1)))) return false;
    } else if (g.is_app("unbound")) {
      if (!substitute(s, substitute(rule_s, g.arg(0))).is_var()) return false;
    } else {
      return false;
    }
  }
  return true;
}

std::optional<GeoMatch> try_rule(const MatchRule& rule, const Term& x, const Term& y, const Subst& s) {
  // rule variables live in their own namespace so they never meet input variables
  const std::string tag = "mr" + std::to_string(++g_rule_tag);
  const Term l1 = rename_apart(rule.lhs1, tag), l2 = rename_apart(rule.lhs2, tag);
  Subst s1, s2;
  if (!match(l1, x, s1) || !match(l2, y, s2)) return std::nullopt;
  Subst out = s;
  for (const auto& [v, img] : s2) {
    auto it = s1.find(v);
    if (it == s1.end()) {
      s1[v] = img;
    } else if (!unify(it->second, img, out)) {
      return std::nullopt;
    }
  }
  if (!guards_hold([&] {
        std::vector<Term> gs;
        for (const auto& g : rule.guards) gs.push_back(rename_apart(g, tag));
        return gs;
      }(), s1, out)) {
    return std::nullopt;
  }
  const Term rhs = substitute(out, substitute(s1, rename_apart(rule.rhs, tag)));
  return GeoMatch{canonical_term(rhs), out};
}

std::optional<GeoMatch> gm(const Term& a0, const Term& b0, const std::vector<MatchRule>& rules, const Subst& s) {
  const Term a = substitute(s, a0), b = substitute(s, b0);
  if (a == b) return GeoMatch{a, s};
  for (const auto& rule : rules) {
    if (auto r = try_rule(rule, a, b, s)) return r;
    if (auto r = try_rule(rule, b, a, s)) return r;
  }
  if (a.is_app() && b.is_app() && a.name() == b.name() && a.arity() == b.arity()) {
    Subst cur = s;
    std::vector<Term> args;
    bool ok = true;
    for (size_t i = 0; i < a.arity() && ok; ++i) {
      auto r = gm(a.arg(i), b.arg(i), rules, cur);
      if (!r) {
        ok = false;
        break;
      }
      cur = r->subst;
      args.push_back(r->term);
    }
    if (ok) {
      Term t = Term::app(a.name(), std::move(args));
      return GeoMatch{canonical_term(substitute(cur, t)), cur};
    }
  }
  Subst u = s;
  if (!unify(a, b, u)) return std::nullopt;
  return GeoMatch{canonical_term(substitute(u, a)), u};
}

}  // namespace

std::optional<GeoMatch> geo_match(const Term& a, const Term& b, const std::vector<MatchRule>& rules, const Subst& s) {
  return gm(a, b, rules, s);
}

bool instance_of(const Term& specific, const Term& general, const std::vector<MatchRule>& rules) {
  const auto r = geo_match(general, specific, rules);
  if (!r) return false;
  for (const auto& v : vars_of(specific)) {
    const Term img = substitute(r->subst, Term::var(v));
    if (!(img.is_var() && img.name() == v)) return false;
  }
  return r->term == canonical_term(specific);
}

}  // namespace dofforge

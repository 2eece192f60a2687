#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dofforge/geom.hpp"
#include "dofforge/term.hpp"

namespace dofforge {

struct ActionRule {
  std::string name;
  std::optional<GeomKind> kind;  // nullopt: any kind
  Term pattern;
  std::vector<Term> preserve;
  std::vector<Term> achieve;
};

struct MatchRule {
  std::string name;
  Term lhs1, lhs2, rhs;
  std::vector<Term> guards;
};

struct ReformRule {
  std::string name;
  std::optional<GeomKind> kind;
  std::vector<Term> lhs, rhs;
  std::vector<Term> guards;
};

struct RuleBase {
  std::vector<ActionRule> actions;
  std::vector<MatchRule> matches;
  std::vector<ReformRule> reforms;
  std::string source;

  // FNV-1a of the source text, hex.
  std::string hash() const;
  // Copy without the rules whose name equals `name` or starts with `name-`.
  RuleBase without(const std::string& name) const;
};

RuleBase parse_rule_base(const std::string& text);
RuleBase load_rule_base(const std::string& path);
const RuleBase& default_rule_base();
const std::string& default_rule_text();

struct InvariantActions {
  std::vector<Term> preserve;
  std::vector<Term> achieve;
};

// Preserve/achieve actions for a ground invariant, with rule-local variables
// renamed apart using `fresh`.
InvariantActions actions_for(const Term& invariant, GeomKind kind, const RuleBase& rb, int& fresh);

struct GeoMatch {
  Term term;
  Subst subst;
};

// Geometric unification: matching rules are tried outermost first, then
// arguments pairwise; anything else falls back to plain unification.
std::optional<GeoMatch> geo_match(const Term& a, const Term& b, const std::vector<MatchRule>& rules,
                                  const Subst& s = {});

// True when `specific` is a (geometric) specialization of `general` without
// binding any variable of `specific`.
bool instance_of(const Term& specific, const Term& general, const std::vector<MatchRule>& rules);

// Sorts the (symmetric) arguments of every 0d-intersection.
Term canonical_term(const Term& t);

}  // namespace dofforge

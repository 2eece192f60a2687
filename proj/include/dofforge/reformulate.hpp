#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "dofforge/geom.hpp"
#include "dofforge/rules.hpp"

namespace dofforge {

struct ReformStep {
  std::string rule;
  std::vector<Term> removed;
  std::vector<Term> added;
};

struct Reformulation {
  std::vector<Term> invariants;  // canonical, sorted
  std::vector<bool> preserved;   // parallel to invariants
  std::vector<ReformStep> trace;
};

// Well-founded complexity measure, compared lexicographically.
using Complexity = std::array<int, 5>;
Complexity complexity(GeomKind kind, const std::vector<Term>& invariants);

// Rewrites to the canonical multiset. Asserts the complexity drops at
// every step.
Reformulation reformulate(GeomKind kind, const std::vector<Term>& invariants, const RuleBase& rb);

// Same, tracking which outputs derive only from `preserved` inputs.
Reformulation reformulate_split(GeomKind kind, const std::vector<Term>& preserved, const std::vector<Term>& tba,
                                const RuleBase& rb);

struct SchemeEntry {
  Signature raw;
  bool over_constrained = false;
  Signature canonical;
  std::vector<Term> reformulated;
};

struct SignatureScheme {
  GeomKind kind = GeomKind::Circle;
  std::vector<SchemeEntry> entries;     // one per raw signature
  std::vector<Signature> canonical;     // sorted, unique
};

SignatureScheme derive_signature_scheme(GeomKind kind, const RuleBase& rb);

}  // namespace dofforge

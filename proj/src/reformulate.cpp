#include "dofforge/reformulate.hpp"

#include <algorithm>
#include <numeric>

namespace dofforge {

namespace {

int rank_of(InvType t) {
  switch (t) {
    case InvType::InvariantPoint: return 1;
    case InvType::OneDConstrainedPoint: return 2;
    case InvType::InvariantDirection:
    case InvType::InvariantDimension: return 3;
    case InvType::TwoDConstrainedPoint: return 4;
    case InvType::FixedDistanceLine:
    case InvType::FixedDistancePoint: return 5;
  }
  return 0;
}

bool on_end2(const Term& inv) {
  return inv.arity() > 1 && inv.arg(1).is_app(">>") && inv.arg(1).arg(1).is_sym("end2");
}

struct Item {
  Term inv;
  bool preserved;
};

void sort_items(std::vector<Item>& items) {
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.inv < b.inv; });
  // an invariant listed twice is one constraint; keep the preserved copy
  std::vector<Item> out;
  for (auto& it : items) {
    if (!out.empty() && out.back().inv == it.inv) {
      out.back().preserved = out.back().preserved || it.preserved;
    } else {
      out.push_back(it);
    }
  }
  items = std::move(out);
}

std::vector<Term> terms_of(const std::vector<Item>& items) {
  std::vector<Term> out;
  for (const auto& i : items) out.push_back(i.inv);
  return out;
}

bool absent_holds(const Term& pattern, const Subst& s, const std::vector<Item>& items, const std::vector<size_t>& used) {
  for (size_t i = 0; i < items.size(); ++i) {
    if (std::find(used.begin(), used.end(), i) != used.end()) continue;
    Subst t = s;
    if (match(pattern, items[i].inv, t)) return false;
  }
  return true;
}

bool try_tuple(const ReformRule& rule, const std::vector<Item>& items, std::vector<size_t>& used, Subst& s) {
  const size_t k = used.size();
  if (k == rule.lhs.size()) {
    for (const auto& g : rule.guards) {
      if (g.is_app("absent")) {
        if (!absent_holds(g.arg(0), s, items, used)) return false;
      } else if (g.is_app("distinct")) {
        if (substitute(s, g.arg(0)) == substitute(s, g.arg(1))) return false;
      } else {
        return false;
      }
    }
    return true;
  }
  for (size_t i = 0; i < items.size(); ++i) {
    if (std::find(used.begin(), used.end(), i) != used.end()) continue;
    Subst next = s;
    if (!match(rule.lhs[k], items[i].inv, next)) continue;
    used.push_back(i);
    if (try_tuple(rule, items, used, next)) {
      s = std::move(next);
      return true;
    }
    used.pop_back();
  }
  return false;
}

}  // namespace

Complexity complexity(GeomKind kind, const std::vector<Term>& invariants) {
  int distance = 0, dirs = 0, dims = 0, end2 = 0, ranks = 0;
  for (const auto& inv : invariants) {
    const auto t = inv_type_of(inv);
    if (!t) continue;
    if (*t == InvType::FixedDistanceLine || *t == InvType::FixedDistancePoint) ++distance;
    if (*t == InvType::InvariantDirection) ++dirs;
    if (*t == InvType::InvariantDimension) ++dims;
    if (on_end2(inv)) end2 += *t == InvType::InvariantPoint ? 2 : 1;
    ranks += rank_of(*t);
  }
  int lonely = 0;
  if (kind == GeomKind::LineSegment) lonely = (dims == 0 ? dirs : 0) + (dirs == 0 ? dims : 0);
  return {distance, lonely, end2, static_cast<int>(invariants.size()), ranks};
}

Reformulation reformulate_split(GeomKind kind, const std::vector<Term>& preserved, const std::vector<Term>& tba,
                                const RuleBase& rb) {
  std::vector<Item> items;
  for (const auto& t : preserved) items.push_back({canonical_term(t), true});
  for (const auto& t : tba) items.push_back({canonical_term(t), false});
  sort_items(items);
  Reformulation out;
  for (;;) {
    bool fired = false;
    for (const auto& rule : rb.reforms) {
      if (rule.kind && *rule.kind != kind) continue;
      std::vector<size_t> used;
      Subst s;
      if (!try_tuple(rule, items, used, s)) continue;
      const Complexity before = complexity(kind, terms_of(items));
      ReformStep step;
      step.rule = rule.name;
      bool all_preserved = true;
      for (size_t i : used) {
        step.removed.push_back(items[i].inv);
        all_preserved = all_preserved && items[i].preserved;
      }
      std::vector<Item> next;
      for (size_t i = 0; i < items.size(); ++i) {
        if (std::find(used.begin(), used.end(), i) == used.end()) next.push_back(items[i]);
      }
      for (const auto& r : rule.rhs) {
        const Term t = canonical_term(substitute(s, r));
        bool flag = all_preserved;
        // an invariant carried through unchanged keeps its own origin
        for (size_t i : used) {
          if (items[i].inv == t) flag = items[i].preserved;
        }
        next.push_back({t, flag});
        step.added.push_back(t);
      }
      sort_items(next);
      const Complexity after = complexity(kind, terms_of(next));
      if (!(after < before)) {
        throw DofError("reformulation rule " + rule.name + " does not reduce complexity on " +
                       join_terms(step.removed));
      }
      items = std::move(next);
      out.trace.push_back(std::move(step));
      fired = true;
      break;
    }
    if (!fired) break;
  }
  for (const auto& it : items) {
    out.invariants.push_back(it.inv);
    out.preserved.push_back(it.preserved);
  }
  return out;
}

Reformulation reformulate(GeomKind kind, const std::vector<Term>& invariants, const RuleBase& rb) {
  return reformulate_split(kind, {}, invariants, rb);
}

SignatureScheme derive_signature_scheme(GeomKind kind, const RuleBase& rb) {
  SignatureScheme scheme;
  scheme.kind = kind;
  for (const auto& raw : raw_signatures(kind)) {
    SchemeEntry e;
    e.raw = raw;
    if (!dof_admissible(raw)) {
      e.over_constrained = true;
    } else {
      e.reformulated = reformulate(kind, representative(raw, "$g", false), rb).invariants;
      try {
        e.canonical = signature_of(kind, e.reformulated);
        scheme.canonical.push_back(e.canonical);
      } catch (const OverConstrained&) {
        e.over_constrained = true;
      }
    }
    scheme.entries.push_back(std::move(e));
  }
  std::sort(scheme.canonical.begin(), scheme.canonical.end());
  scheme.canonical.erase(std::unique(scheme.canonical.begin(), scheme.canonical.end()), scheme.canonical.end());
  return scheme;
}

}  // namespace dofforge

#include "dofforge/planner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace dofforge {

namespace {

std::string state_key(const std::vector<Term>& p, const std::vector<Term>& t) {
  return join_terms(p, "|") + " || " + join_terms(t, "|");
}

bool has_free_params(const Term& action) {
  return !vars_of(action).empty() || contains_sym(action, "arbitrary-point");
}

class Search {
 public:
  Search(const PlanSpec& spec, const RuleBase& rb, const SearchConfig& cfg) : spec_(spec), rb_(rb), cfg_(cfg) {}

  SearchResult run() {
    SearchResult res;
    res.spec = spec_;
    res.reform = reformulate_split(spec_.kind, spec_.preserved, spec_.tba, rb_);
    for (size_t i = 0; i < res.reform.invariants.size(); ++i) {
      (res.reform.preserved[i] ? res.root_preserved : res.root_tba).push_back(res.reform.invariants[i]);
    }
    SearchNode root;
    root.preserved = res.root_preserved;
    root.tba = res.root_tba;
    root.status = root.tba.empty() ? NodeStatus::Solution : NodeStatus::Open;
    nodes_.push_back(root);
    seen_[state_key(root.preserved, root.tba)].push_back(0);

    std::deque<int> queue{0};
    int solution_depth = root.status == NodeStatus::Solution ? 0 : -1;
    while (!queue.empty()) {
      const int id = queue.front();
      queue.pop_front();
      if (nodes_[id].status != NodeStatus::Open) continue;
      const int depth = nodes_[id].depth;
      if (depth >= cfg_.max_depth) {
        res.depth_limited = true;
        continue;
      }
      if (solution_depth >= 0 && cfg_.extra_levels >= 0 && depth + 1 > solution_depth + cfg_.extra_levels) continue;
      if (static_cast<int>(nodes_.size()) >= cfg_.max_nodes) {
        res.node_limited = true;
        break;
      }
      for (int child : expand(id)) {
        if (nodes_[child].status == NodeStatus::Solution && solution_depth < 0) solution_depth = nodes_[child].depth;
        if (nodes_[child].status == NodeStatus::Open) queue.push_back(child);
      }
    }

    for (const auto& n : nodes_) {
      if (n.status != NodeStatus::Solution) continue;
      std::vector<Term> steps;
      for (int cur = n.id; cur > 0; cur = nodes_[cur].parent) steps.push_back(nodes_[cur].action);
      std::reverse(steps.begin(), steps.end());
      res.plans.push_back({canonical_vars(steps)});
    }
    res.nodes = std::move(nodes_);
    if (res.plans.empty() && res.depth_limited) {
      throw DepthExceeded("no plan within depth " + std::to_string(cfg_.max_depth) + " for " +
                          join_terms(res.reform.invariants));
    }
    return res;
  }

 private:
  const InvariantActions& actions(const Term& inv) {
    auto it = cache_.find(inv.str());
    if (it != cache_.end()) return it->second;
    return cache_.emplace(inv.str(), actions_for(inv, spec_.kind, rb_, fresh_)).first->second;
  }

  struct Other {
    Term inv;
    const std::vector<Term>* acts;
  };

  // Every way of folding the remaining constraints' actions into `cur`.
  void fold(const std::vector<Other>& others, size_t i, const Term& cur, const Subst& s, std::vector<bool>& incl,
            std::vector<std::pair<Term, std::vector<bool>>>& out) {
    if (i == others.size()) {
      out.emplace_back(canonical_term(substitute(s, cur)), incl);
      return;
    }
    for (const auto& b : *others[i].acts) {
      auto r = geo_match(cur, b, rb_.matches, s);
      if (!r) continue;
      incl[i] = true;
      fold(others, i + 1, r->term, r->subst, incl, out);
      incl[i] = false;
    }
    fold(others, i + 1, cur, s, incl, out);
  }

  bool any_instance(const Term& a, const std::vector<Term>& general) {
    for (const auto& g : general) {
      if (instance_of(a, g, rb_.matches)) return true;
    }
    return false;
  }

  struct Effect {
    std::vector<Term> preserved, tba, clobbered;
    int achieved = 0;
  };

  Effect effect_of(const SearchNode& n, const Term& a, const std::vector<Other>& others, const std::vector<bool>& incl,
                   const Term* target = nullptr) {
    auto included = [&](const Term& inv) {
      if (target && *target == inv) return true;
      for (size_t i = 0; i < others.size(); ++i) {
        if (incl[i] && others[i].inv == inv) return true;
      }
      return false;
    };
    Effect e;
    for (const auto& p : n.preserved) {
      if (included(p) || any_instance(a, actions(p).preserve)) {
        e.preserved.push_back(p);
      } else {
        e.tba.push_back(p);
        e.clobbered.push_back(p);
      }
    }
    for (const auto& t : n.tba) {
      if (included(t) || any_instance(a, actions(t).achieve)) {
        e.preserved.push_back(t);
        ++e.achieved;
      } else {
        e.tba.push_back(t);
      }
    }
    std::sort(e.preserved.begin(), e.preserved.end());
    std::sort(e.tba.begin(), e.tba.end());
    return e;
  }

  int add_child(int parent, Move move, const Term& action, Effect e) {
    SearchNode c;
    c.id = static_cast<int>(nodes_.size());
    c.parent = parent;
    c.depth = nodes_[parent].depth + 1;
    c.move = move;
    c.action = rename_apart(action, "n" + std::to_string(c.id));
    c.preserved = std::move(e.preserved);
    c.tba = std::move(e.tba);
    c.clobbered = std::move(e.clobbered);
    c.any_clobbered = nodes_[parent].any_clobbered || !c.clobbered.empty();
    const std::string key = state_key(c.preserved, c.tba);
    if (c.tba.empty()) {
      c.status = NodeStatus::Solution;
    } else {
      // reaching a state already seen at a shallower depth is a cycle; the
      // parent itself is exempt so alternative configurations survive
      for (int other : seen_[key]) {
        if (other != parent && nodes_[other].depth < c.depth) c.status = NodeStatus::Cycle;
      }
    }
    seen_[key].push_back(c.id);
    nodes_.push_back(std::move(c));
    return nodes_.back().id;
  }

  std::vector<int> expand(int id) {
    const SearchNode n = nodes_[id];
    std::vector<int> children;
    std::set<std::string> seen;
    auto key_of = [](const Term& a) { return canonical_vars({a})[0].str(); };

    for (const auto& t : n.tba) {
      std::vector<Other> others;
      for (const auto& p : n.preserved) others.push_back({p, &actions(p).preserve});
      for (const auto& q : n.tba) {
        if (q != t) others.push_back({q, &actions(q).achieve});
      }
      for (const auto& a : actions(t).achieve) {
        std::vector<std::pair<Term, std::vector<bool>>> combos;
        std::vector<bool> incl(others.size(), false);
        fold(others, 0, a, {}, incl, combos);
        for (auto& [act, inc] : combos) {
          if (!seen.insert(key_of(act)).second) continue;
          Effect e = effect_of(n, act, others, inc, &t);
          const bool combined = std::find(inc.begin(), inc.end(), true) != inc.end();
          children.push_back(add_child(id, combined ? Move::Combined : Move::Achieve, act, std::move(e)));
        }
      }
    }

    // alternative configurations: move within the freedom the preserved
    // invariants leave, before anything has been clobbered
    if (!n.any_clobbered && !n.preserved.empty()) {
      std::set<std::string> kinds;
      for (const auto& p : n.preserved) {
        for (const auto& b : actions(p).preserve) {
          if (!has_free_params(b) || kinds.count(b.name())) continue;
          std::vector<Other> others;
          for (const auto& q : n.preserved) {
            if (q != p) others.push_back({q, &actions(q).preserve});
          }
          std::vector<std::pair<Term, std::vector<bool>>> combos;
          std::vector<bool> incl(others.size(), false);
          fold(others, 0, b, {}, incl, combos);
          for (auto& [act, inc] : combos) {
            Effect e = effect_of(n, act, others, inc);
            if (!e.clobbered.empty() || e.achieved > 0) continue;
            if (!seen.insert(key_of(act)).second) continue;
            kinds.insert(act.name());
            children.push_back(add_child(id, Move::Alternative, act, std::move(e)));
            break;
          }
        }
      }
    }
    return children;
  }

  const PlanSpec& spec_;
  const RuleBase& rb_;
  const SearchConfig& cfg_;
  int fresh_ = 0;
  std::map<std::string, InvariantActions> cache_;
  std::vector<SearchNode> nodes_;
  std::map<std::string, std::vector<int>> seen_;
};

const char* move_name(Move m) {
  switch (m) {
    case Move::Root: return "root";
    case Move::Combined: return "combined";
    case Move::Achieve: return "achieve";
    case Move::Alternative: return "alternative";
  }
  return "?";
}

const char* status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Open: return "open";
    case NodeStatus::Solution: return "SOLUTION";
    case NodeStatus::Cycle: return "cycle";
  }
  return "?";
}

}  // namespace

SearchResult synthesize_skeletal(const PlanSpec& spec, const RuleBase& rb, const SearchConfig& cfg) {
  return Search(spec, rb, cfg).run();
}

std::string to_string(const SkeletalPlan& p) {
  std::ostringstream os;
  for (size_t i = 0; i < p.steps.size(); ++i) os << (i + 1) << ". " << p.steps[i].str() << "\n";
  return os.str();
}

std::string explain(const SearchResult& r) {
  std::ostringstream os;
  if (!r.reform.trace.empty()) {
    os << "reformulation:\n";
    for (const auto& st : r.reform.trace) {
      os << "  " << st.rule << ": " << join_terms(st.removed) << "\n    => " << join_terms(st.added) << "\n";
    }
  }
  std::map<int, std::vector<int>> kids;
  for (const auto& n : r.nodes) {
    if (n.parent >= 0) kids[n.parent].push_back(n.id);
  }
  auto print = [&](auto&& self, int id) -> void {
    const auto& n = r.nodes[id];
    const std::string pad(2 * n.depth, ' ');
    os << pad << "[" << n.id << "] " << move_name(n.move) << " " << status_name(n.status) << "\n";
    if (n.parent >= 0) os << pad << "  step: " << n.action.str() << "\n";
    os << pad << "  preserved: " << join_terms(n.preserved) << "\n";
    os << pad << "  to-be-achieved: " << join_terms(n.tba) << "\n";
    if (!n.clobbered.empty()) os << pad << "  clobbered: " << join_terms(n.clobbered) << "\n";
    for (int k : kids[id]) self(self, k);
  };
  if (!r.nodes.empty()) print(print, 0);
  os << r.plans.size() << " plan(s)";
  if (r.depth_limited) os << ", depth bound reached";
  if (r.node_limited) os << ", node cap reached";
  os << "\n";
  return os.str();
}

}  // namespace dofforge

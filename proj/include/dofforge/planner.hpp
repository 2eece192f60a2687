#pragma once

#include <string>
#include <vector>

#include "dofforge/reformulate.hpp"
#include "dofforge/rules.hpp"

namespace dofforge {

class DepthExceeded : public DofError {
 public:
  using DofError::DofError;
};

// What a plan fragment must do: keep `preserved`, establish `tba`.
struct PlanSpec {
  GeomKind kind = GeomKind::Circle;
  std::string geom = "$g";
  std::vector<Term> preserved;
  std::vector<Term> tba;
};

struct SearchConfig {
  int max_depth = 6;
  int max_nodes = 200000;
  // Levels searched past the first one holding a solution; negative means
  // run to quiescence.
  int extra_levels = -1;
};

enum class NodeStatus { Open, Solution, Cycle };

enum class Move { Root, Combined, Achieve, Alternative };

struct SearchNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  Move move = Move::Root;
  Term action;  // step leading here (unset for the root)
  std::vector<Term> preserved;
  std::vector<Term> tba;
  std::vector<Term> clobbered;  // invariants this step broke
  bool any_clobbered = false;    // along the path from the root
  NodeStatus status = NodeStatus::Open;
};

struct SkeletalPlan {
  std::vector<Term> steps;
};

struct SearchResult {
  PlanSpec spec;
  Reformulation reform;
  std::vector<Term> root_preserved;
  std::vector<Term> root_tba;
  std::vector<SearchNode> nodes;
  std::vector<SkeletalPlan> plans;  // breadth-first order
  bool depth_limited = false;
  bool node_limited = false;
};

// Breadth-first search over (Preserved, TBA) states. Throws DepthExceeded
// when no plan is found and the depth bound cut the search short.
SearchResult synthesize_skeletal(const PlanSpec& spec, const RuleBase& rb, const SearchConfig& cfg = {});

std::string explain(const SearchResult& r);
std::string to_string(const SkeletalPlan& p);

}  // namespace dofforge

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "dofforge/geom.hpp"
#include "dofforge/planner.hpp"
#include "dofforge/rules.hpp"

namespace dofforge {

// Removes earlier actions made pointless by a later action of the same kind,
// then renames variables canonically. `held` lists invariants already true
// when the plan starts. Idempotent.
std::vector<Term> eliminate_redundant(const std::vector<Term>& steps, GeomKind kind, const std::string& geom,
                                      const std::vector<Term>& held, const RuleBase& rb);

// Free parameters: arbitrary points plus distinct variables.
int free_param_count(const std::vector<Term>& steps);

// (distinct action kinds, free parameters, -intersections, -steps); larger is
// preferred. Each intersection is a place the plan can abort.
using PlanWeight = std::array<int, 4>;
PlanWeight plan_weight(const std::vector<Term>& steps);

// A subsumes B: every execution of B is an instantiation of A.
bool subsumes(const std::vector<Term>& a, const std::vector<Term>& b, const RuleBase& rb);

// Maximal plans first, each layer by weight then text.
std::vector<std::vector<Term>> prioritize(const std::vector<std::vector<Term>>& plans, const RuleBase& rb);

struct Step {
  enum class Kind { Bind, Apply, ForMin, Case, Abort };
  // ForMin candidates: points of a locus or intersection, scale amounts, or
  // rotation angles.
  enum class Domain { Points, Amount, Angle };

  Kind kind = Kind::Apply;
  std::string local;  // variable name without '?'
  Term expr;          // Bind value, Apply action, ForMin source, Case subject
  Domain domain = Domain::Points;
  std::vector<Step> body;        // ForMin body; Case Points arm
  std::vector<Step> coincident;  // Case Coincident arm
  std::vector<Step> empty;       // Case Empty arm
  std::string message;           // Abort

  static Step bind(std::string local, Term e);
  static Step apply(Term action);
  static Step for_min(std::string local, Domain d, Term source, std::vector<Step> body);
  static Step abort(std::string msg);
};

bool operator==(const Step& a, const Step& b);

std::string to_string(Step::Kind k);
std::string to_string(Step::Domain d);

// Compiles a skeletal plan: free parameters become ForMin loops over the rest
// of the plan, every intersection becomes a three-armed Case.
std::vector<Step> elaborate(const std::vector<Term>& steps);

// Indented pseudo-source.
std::string pretty(const std::vector<Step>& body);

// Locals used before being bound; empty for a closed body.
std::vector<std::string> unbound_locals(const std::vector<Step>& body);

struct MotionSpec {
  using Fn = std::function<double(const GeomState& before, const GroundAction& a, const GeomState& after)>;
  Fn translate, rotate, scale;

  static MotionSpec standard();
  double cost(const GeomState& before, const GroundAction& a, const GeomState& after) const;
};

struct MotionRecord {
  GeomState before;
  GroundAction action;
  GeomState after;
};

double total_motion(const std::vector<MotionRecord>& trace, const MotionSpec& motion);

// Coordinate descent over candidate indices, starting from `initial` (all
// zeros when empty). Ties keep the earlier candidate.
std::vector<size_t> least_motion_search(const std::vector<size_t>& sizes,
                                        const std::function<double(const std::vector<size_t>&)>& objective,
                                        int max_passes = 4, std::vector<size_t> initial = {});

}  // namespace dofforge

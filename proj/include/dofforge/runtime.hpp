#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dofforge/eval.hpp"
#include "dofforge/phase2.hpp"
#include "dofforge/planner.hpp"

namespace dofforge {

class MissingPlanFragment : public DofError {
 public:
  explicit MissingPlanFragment(const Signature& s)
      : DofError("no plan fragment for signature " + to_string(s)), signature(s) {}
  Signature signature;
};

struct ExecConfig {
  int samples = 64;
  double inflate = 2.0;
  int max_passes = 4;
  int refine_passes = 5;
  int refine_factor = 10;
  MotionSpec motion = MotionSpec::standard();
};

struct TraceEvent {
  Step::Kind kind = Step::Kind::Apply;
  std::string local;
  std::string detail;  // arm name, action text, abort message
  std::optional<Value> value;
  double objective = 0.0;
};

struct ExecutionTrace {
  std::string constraint;
  std::string signature;
  std::vector<TraceEvent> events;
  std::vector<Value> choices;  // ForMin winners in execution order
  std::vector<std::pair<std::string, double>> residuals;
  double motion = 0.0;
};

struct PlanFragment {
  Signature signature;
  std::vector<std::string> params;  // constants of the pattern, geom first
  std::vector<Term> pattern;        // canonical invariants with params as constants
  std::vector<Term> steps;          // the skeletal plan it was compiled from
  std::vector<Step> body;
};

struct ExecResult {
  GeomState state;
  ExecutionTrace trace;
};

// Runs a body whose parameters are already substituted. With `replay`, ForMin
// loops take the recorded winners instead of searching.
ExecResult execute_body(const std::vector<Step>& body, const Scene& scene, const GeomState& geom,
                        const ExecConfig& cfg = {}, const std::vector<Value>* replay = nullptr);

// Binds the fragment's pattern against `invariants` (canonical form of the
// geom's constraints) and executes it.
ExecResult execute_plan(const PlanFragment& frag, const Scene& scene, const GeomState& geom,
                        const std::vector<Term>& invariants, const ExecConfig& cfg = {},
                        const std::vector<Value>* replay = nullptr);

// Parameter table mapping pattern constants to scene terms, if the pattern
// multiset matches.
std::optional<std::map<std::string, Term>> bind_pattern(const PlanFragment& frag, const std::vector<Term>& invariants);

std::vector<Step> instantiate(const std::vector<Step>& body, const std::map<std::string, Term>& table);

struct PlanLibrary {
  std::string geom_kind;  // "circle", "line-segment" or "all"
  std::string rulebase_hash;
  int depth = 6;
  int alternative = 0;
  std::vector<PlanFragment> fragments;

  const PlanFragment* find(const Signature& s) const;
  void merge(const PlanLibrary& other);
};

enum class SynthesisStatus { Solved, MissingRules, OverConstrained };

struct SynthesisOutcome {
  Signature signature;
  SynthesisStatus status = SynthesisStatus::Solved;
  bool depth_exceeded = false;
  int skeletal = 0;  // Phase I plans
  std::vector<std::vector<Term>> ranked;  // after redundancy elimination
  std::optional<PlanFragment> fragment;
  std::string explanation;
};

// From-scratch fragment for a canonical signature; `alternative` picks a lower
// ranked plan (clamped to the last one).
SynthesisOutcome synthesize_fragment(const Signature& sig, const RuleBase& rb, const SearchConfig& cfg = {},
                                     int alternative = 0);

struct LibrarySynthesis {
  PlanLibrary library;
  std::vector<SynthesisOutcome> outcomes;  // canonical signatures
  int raw = 0;
  int over_constrained = 0;

  int solved() const;
  std::vector<Signature> missing() const;
  std::string summary() const;
};

LibrarySynthesis synthesize_library(const std::vector<GeomKind>& kinds, const RuleBase& rb,
                                    const SearchConfig& cfg = {}, int alternative = 0, int jobs = 1);

struct SpecReport {
  SearchResult search;
  std::vector<std::vector<Term>> reduced;  // deduplicated, prioritized
  std::vector<std::vector<Step>> bodies;
  std::string text() const;
};

SpecReport synthesize_spec(const PlanSpec& spec, const RuleBase& rb, const SearchConfig& cfg = {});

struct SolveResult {
  Scene scene;
  std::vector<ExecutionTrace> traces;
};

// Satisfies the scene's constraints in order. Throws MissingPlanFragment or
// Diagnostic.
SolveResult solve_scene(const Scene& scene, const PlanLibrary& lib, const RuleBase& rb, const ExecConfig& cfg = {});

}  // namespace dofforge

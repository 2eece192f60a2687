#pragma once

#include <string>
#include <vector>

#include "dofforge/eval.hpp"
#include "dofforge/planner.hpp"
#include "dofforge/runtime.hpp"
#include "json.hpp"

namespace dofforge {

using Json = nlohmann::ordered_json;

// Malformed or schema-violating input file.
class SchemaError : public DofError {
 public:
  using DofError::DofError;
};

// Invariants as JSON objects, e.g.
//   {"type": "fixed-distance-line", "line": "L1", "distance": 1, "bias": "CCW"}
// Entity references are bare names, literal points are [x, y], anything else
// is an expression string "( ... )". {"term": "( ... )"} holds any invariant.
Term invariant_from_json(const Json& j, const std::string& geom);
Json invariant_to_json(const Term& inv);

Scene scene_from_json(const Json& j);
Json scene_to_json(const Scene& s);

Json step_to_json(const Step& s);
Step step_from_json(const Json& j);

Json library_to_json(const PlanLibrary& lib);
PlanLibrary library_from_json(const Json& j);

// {"geom_kind": "circle", "geom": "c", "preserved": [...], "to_be_achieved": [...]}
// Invariants may be JSON objects or term strings.
PlanSpec spec_from_json(const Json& j);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

struct SvgOptions {
  double size = 480.0;  // longer side of the drawing area, px
  double padding = 10.0;
};

// Entities black, initial geoms dashed gray, solved geoms solid, chosen points
// as 3px dots.
std::string render_svg(const Scene& initial, const Scene& solved, const std::vector<Point2>& chosen,
                       const SvgOptions& opt = {});

// Point-valued ForMin winners, in execution order.
std::vector<Point2> chosen_points(const std::vector<ExecutionTrace>& traces);

std::string explain_traces(const std::vector<ExecutionTrace>& traces, const PlanLibrary& lib);

}  // namespace dofforge

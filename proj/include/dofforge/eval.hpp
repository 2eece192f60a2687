#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dofforge/geom.hpp"
#include "dofforge/geometry.hpp"
#include "dofforge/term.hpp"

namespace dofforge {

class UnboundName : public DofError {
 public:
  using DofError::DofError;
};

class TypeMismatch : public DofError {
 public:
  using DofError::DofError;
};

// A plan could not be carried out: Abort steps, failed service routines,
// dimensions driven to zero.
class Diagnostic : public DofError {
 public:
  Diagnostic(std::string routine, std::string cause, std::string constraint = "")
      : DofError(constraint.empty() ? routine + ": " + cause : constraint + ": " + routine + ": " + cause),
        routine_(std::move(routine)), cause_(std::move(cause)), constraint_(std::move(constraint)) {}
  const std::string& routine() const { return routine_; }
  const std::string& cause() const { return cause_; }
  const std::string& constraint() const { return constraint_; }
  Diagnostic with_constraint(const std::string& c) const { return Diagnostic(routine_, cause_, c); }

 private:
  std::string routine_, cause_, constraint_;
};

struct Entity {
  enum class Kind { Point, Line };
  std::string name;
  Kind kind = Kind::Point;
  Point2 point;  // the point, or a point on the line
  Direction2 dir;

  Locus1d line() const { return make_line_locus(point, dir); }
};

struct SceneConstraint {
  std::string geom;
  Term invariant;
};

struct Scene {
  Tolerance tol;
  std::vector<Entity> entities;
  std::vector<GeomState> geoms;
  std::vector<SceneConstraint> constraints;

  const Entity* entity(const std::string& name) const;
  const GeomState* geom(const std::string& name) const;
  GeomState* geom(const std::string& name);
  // Entities and geoms; a unit box around the origin when there are none.
  BBox bbox() const;
};

// A value of a term. Points and free vectors share one representation.
struct Value {
  enum class Kind { Scalar, Vec, Dir, Locus, Isect, Sym };
  std::variant<double, Point2, Direction2, Locus1d, IntersectionResult, std::string> v;

  Kind kind() const { return static_cast<Kind>(v.index()); }
  double scalar() const;
  Point2 point() const;
  Vector2 vec() const;
  Direction2 dir() const;
  Locus1d locus() const;
  const IntersectionResult& isect() const;
  const std::string& sym() const;

  static Value of(double d) { return {d}; }
  static Value of(Point2 p) { return {p}; }
  static Value of(Vector2 p) { return {Point2{p.x, p.y}}; }
  static Value of(Direction2 d) { return {d}; }
  static Value of(Locus1d l) { return {l}; }
  static Value of(IntersectionResult r) { return {std::move(r)}; }
  static Value symbol(std::string s) { return {std::move(s)}; }
};

std::string to_string(const Value& v);

struct EvalContext {
  const Scene* scene = nullptr;
  const GeomState* geom = nullptr;  // the geom being moved
  std::string geom_sym;             // its constant, e.g. "$c"
  std::map<std::string, Term> params;  // fragment parameter -> scene term
  std::map<std::string, Value> locals;  // ?var -> value
  Tolerance tol;
};

Value eval_expr(const Term& t, const EvalContext& ctx);

// Evaluates every argument of an invariant term on the context's geom.
ResolvedInvariant resolve_invariant(const Term& inv, const EvalContext& ctx);

// Residual of a ground invariant term; point-valued intersections with
// several candidates count the nearest one.
double term_residual(const Term& inv, const EvalContext& ctx);

}  // namespace dofforge

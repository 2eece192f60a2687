#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dofforge/geometry.hpp"
#include "dofforge/term.hpp"

namespace dofforge {

class DofError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDimension : public DofError {
 public:
  using DofError::DofError;
};

class OverConstrained : public DofError {
 public:
  using DofError::DofError;
};

enum class GeomKind { Circle, LineSegment };

std::string to_string(GeomKind k);
GeomKind parse_geom_kind(const std::string& s);
int geom_dof(GeomKind k);

enum class Bias { CCW, CW, Left, Right, Inside, Outside };

// Term spelling (BIAS_COUNTERCLOCKWISE...) and file spelling (CCW...).
std::string bias_symbol(Bias b);
std::string bias_short(Bias b);
std::optional<Bias> bias_from_symbol(const std::string& s);
std::optional<Bias> bias_from_short(const std::string& s);
// +1 for the counterclockwise/left side, -1 for clockwise/right.
int bias_sign(Bias b);

struct GeomState {
  GeomKind kind = GeomKind::Circle;
  std::string name;
  Point2 center;
  double radius = 1.0;
  Point2 end1, end2;
  // Invariants currently holding, as ground terms.
  std::vector<Term> preserved;

  static GeomState circle(const std::string& name, Point2 center, double radius);
  static GeomState segment(const std::string& name, Point2 e1, Point2 e2);

  Point2 point(const std::string& accessor) const;
  double length() const { return distance(end1, end2); }
  Direction2 direction() const { return Direction2::from(v_sub(end2, end1)); }
  // Reference point whose displacement measures translation motion.
  Point2 anchor() const;
  double size() const { return kind == GeomKind::Circle ? radius : length(); }
};

struct GroundAction {
  enum class Kind { Translate, Rotate, Scale };
  Kind kind = Kind::Translate;
  Vector2 vec;      // translate
  Point2 pivot;     // rotate / scale
  double amount = 0.0;  // rotate angle (rad) or scale delta (length units)

  static GroundAction translate(Vector2 v) { return {Kind::Translate, v, {}, 0.0}; }
  static GroundAction rotate(Point2 p, double a) { return {Kind::Rotate, {}, p, a}; }
  static GroundAction scale(Point2 p, double a) { return {Kind::Scale, {}, p, a}; }
};

std::string describe(const GroundAction& a);

// Throws NonPositiveDimension when a scale would make radius/length <= 0.
GeomState apply_action(const GeomState& s, const GroundAction& a, const Tolerance& tol = {});

enum class InvType {
  InvariantPoint,
  OneDConstrainedPoint,
  TwoDConstrainedPoint,
  FixedDistancePoint,
  FixedDistanceLine,
  InvariantDirection,
  InvariantDimension
};

std::optional<InvType> inv_type_of(const Term& t);
std::string inv_head(InvType t);

// An invariant with every argument evaluated.
struct ResolvedInvariant {
  InvType type = InvType::InvariantPoint;
  std::string accessor = "center";
  Point2 point;      // invariant-point coordinates, fixed-distance-point anchor
  Locus1d locus;     // 1d locus, or the line of fixed-distance-line
  double dist = 0.0;
  Bias bias = Bias::CCW;
  Direction2 dir;
  double value = 0.0;
};

double invariant_residual(const GeomState& s, const ResolvedInvariant& inv);

struct Signature {
  GeomKind kind = GeomKind::Circle;
  // circle: center, radius, fixed points, fixed lines
  // segment: end1, end2, direction, length, fixed lines
  std::array<int, 5> f{};

  bool operator==(const Signature& o) const { return kind == o.kind && f == o.f; }
  bool operator<(const Signature& o) const;
  int constraint_dof() const;
};

std::string to_string(const Signature& s);
Signature parse_signature(const std::string& text);
std::vector<Signature> raw_signatures(GeomKind k);
bool dof_admissible(const Signature& s);

// Throws OverConstrained when the invariants exceed a field or the geom's DOF.
Signature signature_of(GeomKind k, const std::vector<Term>& invariants);

// Representative invariant multiset for a signature on geom constant `g`.
// With generic_bias the biases are parameters ($lbias1...), otherwise the
// fixed-line biases are counterclockwise then clockwise.
std::vector<Term> representative(const Signature& s, const std::string& g, bool generic_bias);

}  // namespace dofforge

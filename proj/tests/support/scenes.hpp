#pragma once
// Scene builders shared by the unit and acceptance tests.

#include <cmath>
#include <random>

#include "dofforge/runtime.hpp"

namespace scenes {

using namespace dofforge;

inline Entity line(const std::string& name, Point2 through, double angle) {
  return {name, Entity::Kind::Line, through, Direction2::from(std::cos(angle), std::sin(angle))};
}

inline Entity point(const std::string& name, Point2 p) { return {name, Entity::Kind::Point, p, Direction2::from(1, 0)}; }

inline Term fdl(const std::string& geom, const std::string& line, double d, const char* bias) {
  return parse_term("(fixed-distance-line $" + geom + " $" + line + " " + format_number(d) + " " + bias + ")");
}

// Circle c, tangent on the left of L1 and on the right of L2, each boundary
// distance away from its line.
inline Scene two_lines(Point2 through1, double a1, double d1, Point2 through2, double a2, double d2, Point2 center,
                       double r) {
  Scene s;
  s.entities = {line("L1", through1, a1), line("L2", through2, a2)};
  s.geoms = {GeomState::circle("c", center, r)};
  s.constraints = {{"c", fdl("c", "L1", d1, "BIAS_COUNTERCLOCKWISE")}, {"c", fdl("c", "L2", d2, "BIAS_CLOCKWISE")}};
  return s;
}

// Random instance: line angles 20 to 160 degrees apart, everything else in
// [-5, 5] or [0.5, 2].
inline Scene random_two_lines(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-5, 5), len(0.5, 2), ang(0, 2 * M_PI),
      gap(20 * M_PI / 180, 160 * M_PI / 180);
  const double a1 = ang(rng);
  const double a2 = a1 + (rng() % 2 ? 1 : -1) * gap(rng);
  const Point2 p1{pos(rng), pos(rng)}, p2{pos(rng), pos(rng)};
  const double d1 = len(rng), d2 = len(rng);
  const Point2 c{pos(rng), pos(rng)};
  const double r = len(rng);
  return two_lines(p1, a1, d1, p2, a2, d2, c, r);
}

inline const PlanLibrary& circle_library() {
  static const PlanLibrary lib = synthesize_library({GeomKind::Circle}, default_rule_base()).library;
  return lib;
}

inline const PlanLibrary& full_library() {
  static const PlanLibrary lib =
      synthesize_library({GeomKind::Circle, GeomKind::LineSegment}, default_rule_base()).library;
  return lib;
}

}  // namespace scenes

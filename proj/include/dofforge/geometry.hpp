#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dofforge {

struct Tolerance {
  double abs_eps = 1e-9;
  double rel_eps = 1e-9;

  bool equal(double a, double b) const;
  // Scale-aware zero test for a value derived from magnitudes around `scale`.
  bool near_zero(double v, double scale = 0.0) const;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vector2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

Vector2 v_sub(const Point2& a, const Point2& b);
Point2 add(const Point2& p, const Vector2& v);
Vector2 add(const Vector2& a, const Vector2& b);
Vector2 scaled(const Vector2& v, double k);
double dot(const Vector2& a, const Vector2& b);
double cross(const Vector2& a, const Vector2& b);
double magnitude(const Vector2& v);
double distance(const Point2& a, const Point2& b);
Point2 rotate_about(const Point2& p, const Point2& pivot, double angle);
bool finite(const Point2& p);

class Direction2 {
 public:
  Direction2() = default;
  // Normalizes; throws GeometryError on a (near) zero vector.
  static Direction2 from(double dx, double dy);
  static Direction2 from(const Vector2& v) { return from(v.x, v.y); }
  static Direction2 from_angle(double radians);

  double dx() const { return dx_; }
  double dy() const { return dy_; }
  Vector2 vec() const { return {dx_, dy_}; }
  Direction2 reversed() const { return Direction2(-dx_, -dy_); }
  Vector2 left_normal() const { return {-dy_, dx_}; }
  double angle() const;

 private:
  Direction2(double dx, double dy) : dx_(dx), dy_(dy) {}
  double dx_ = 1.0;
  double dy_ = 0.0;
};

// Signed angle rotating `from` onto `to`, in (-pi, pi].
double angle_between(const Direction2& from, const Direction2& to);

enum class LocusKind { Line, Ray, Circle, Parabola, Hyperbola, Ellipse };

std::string to_string(LocusKind k);

struct Locus1d {
  LocusKind kind = LocusKind::Line;
  Point2 origin;  // through-point, ray origin or circle center
  Direction2 dir;
  double radius = 0.0;

  static Locus1d line(const Point2& through, const Direction2& dir);
  static Locus1d ray(const Point2& origin, const Direction2& dir);
  static Locus1d circle(const Point2& center, double radius);
  // Conic tags are reserved: always throws.
  static Locus1d reserved(LocusKind kind);

  Point2 point_at(double t) const;
  bool is_straight() const { return kind == LocusKind::Line || kind == LocusKind::Ray; }
};

// Distance from p to the locus point set.
double locus_residual(const Locus1d& l, const Point2& p);

struct IntersectionResult {
  enum class Tag { Points, Coincident, Empty };
  Tag tag = Tag::Empty;
  std::vector<Point2> points;
  Locus1d locus;

  static IntersectionResult make_points(std::vector<Point2> pts, const Tolerance& tol);
  static IntersectionResult coincident(const Locus1d& l);
  static IntersectionResult empty() { return {}; }
};

struct BBox {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  bool valid() const { return xmin <= xmax && ymin <= ymax; }
  void include(const Point2& p);
  BBox inflated(double factor) const;  // about the center
  double diagonal() const;
};

BBox empty_bbox();

enum class Side { Left, Right };

Locus1d make_line_locus(const Point2& through, const Direction2& dir);
Locus1d make_ray_locus(const Point2& origin, const Direction2& dir);
Locus1d make_circle_locus(const Point2& center, double radius);
Locus1d make_displaced_line(const Locus1d& line, Side side, double dist);
double signed_distance(const Locus1d& line, const Point2& p);
// s1, s2 are +1 (counterclockwise side) or -1 (clockwise side).
Locus1d angular_bisector(const Locus1d& l1, const Locus1d& l2, int s1, int s2,
                         const Tolerance& tol = {});
Locus1d shift_locus(const Locus1d& l, const Vector2& v);
IntersectionResult intersect_0d(const Locus1d& a, const Locus1d& b, const Tolerance& tol = {});
std::pair<double, Point2> closest_point(const Locus1d& l, const Point2& p);
std::vector<double> discretize(const Locus1d& l, const BBox& box, int n);
// Clipped parameter interval of a straight locus inside box; false if disjoint.
bool clip_interval(const Locus1d& l, const BBox& box, double& t0, double& t1);

}  // namespace dofforge

#include "dofforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dofforge {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double scale_of(const Point2& p) { return std::max(std::abs(p.x), std::abs(p.y)); }
}  // namespace

bool Tolerance::equal(double a, double b) const {
  return std::abs(a - b) <= abs_eps + rel_eps * std::max(std::abs(a), std::abs(b));
}

bool Tolerance::near_zero(double v, double scale) const {
  return std::abs(v) <= abs_eps + rel_eps * std::abs(scale);
}

Vector2 v_sub(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
Point2 add(const Point2& p, const Vector2& v) { return {p.x + v.x, p.y + v.y}; }
Vector2 add(const Vector2& a, const Vector2& b) { return {a.x + b.x, a.y + b.y}; }
Vector2 scaled(const Vector2& v, double k) { return {v.x * k, v.y * k}; }
double dot(const Vector2& a, const Vector2& b) { return a.x * b.x + a.y * b.y; }
double cross(const Vector2& a, const Vector2& b) { return a.x * b.y - a.y * b.x; }
double magnitude(const Vector2& v) { return std::hypot(v.x, v.y); }
double distance(const Point2& a, const Point2& b) { return magnitude(v_sub(a, b)); }
bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Point2 rotate_about(const Point2& p, const Point2& pivot, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Vector2 r = v_sub(p, pivot);
  return {pivot.x + c * r.x - s * r.y, pivot.y + s * r.x + c * r.y};
}

Direction2 Direction2::from(double dx, double dy) {
  const double n = std::hypot(dx, dy);
  if (!(n > 1e-300) || !std::isfinite(n)) throw GeometryError("direction from a zero or non-finite vector");
  return Direction2(dx / n, dy / n);
}

Direction2 Direction2::from_angle(double radians) {
  return Direction2(std::cos(radians), std::sin(radians));
}

double Direction2::angle() const { return std::atan2(dy_, dx_); }

double angle_between(const Direction2& from, const Direction2& to) {
  return std::atan2(cross(from.vec(), to.vec()), dot(from.vec(), to.vec()));
}

std::string to_string(LocusKind k) {
  switch (k) {
    case LocusKind::Line: return "line";
    case LocusKind::Ray: return "ray";
    case LocusKind::Circle: return "circle";
    case LocusKind::Parabola: return "parabola";
    case LocusKind::Hyperbola: return "hyperbola";
    case LocusKind::Ellipse: return "ellipse";
  }
  return "?";
}

Locus1d Locus1d::line(const Point2& through, const Direction2& dir) {
  return {LocusKind::Line, through, dir, 0.0};
}

Locus1d Locus1d::ray(const Point2& origin, const Direction2& dir) {
  return {LocusKind::Ray, origin, dir, 0.0};
}

Locus1d Locus1d::circle(const Point2& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("circle locus needs a positive radius");
  return {LocusKind::Circle, center, Direction2{}, radius};
}

Locus1d Locus1d::reserved(LocusKind kind) {
  throw GeometryError(to_string(kind) + " loci are reserved and cannot be constructed");
}

Point2 Locus1d::point_at(double t) const {
  if (kind == LocusKind::Circle) return {origin.x + radius * std::cos(t), origin.y + radius * std::sin(t)};
  return add(origin, scaled(dir.vec(), t));
}

double locus_residual(const Locus1d& l, const Point2& p) {
  switch (l.kind) {
    case LocusKind::Line: return std::abs(signed_distance(l, p));
    case LocusKind::Ray: return distance(closest_point(l, p).second, p);
    case LocusKind::Circle: return std::abs(distance(p, l.origin) - l.radius);
    default: throw GeometryError("residual against a reserved locus");
  }
}

IntersectionResult IntersectionResult::make_points(std::vector<Point2> pts, const Tolerance& tol) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<Point2> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out) {
      if (tol.equal(p.x, q.x) && tol.equal(p.y, q.y)) dup = true;
    }
    if (!dup) out.push_back(p);
  }
  IntersectionResult r;
  if (out.empty()) return r;
  r.tag = Tag::Points;
  r.points = std::move(out);
  return r;
}

IntersectionResult IntersectionResult::coincident(const Locus1d& l) {
  IntersectionResult r;
  r.tag = Tag::Coincident;
  r.locus = l;
  return r;
}

void BBox::include(const Point2& p) {
  xmin = std::min(xmin, p.x);
  ymin = std::min(ymin, p.y);
  xmax = std::max(xmax, p.x);
  ymax = std::max(ymax, p.y);
}

BBox BBox::inflated(double factor) const {
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  // a degenerate box still needs some extent to be searchable
  const double hw = std::max(0.5 * (xmax - xmin), 0.5) * factor;
  const double hh = std::max(0.5 * (ymax - ymin), 0.5) * factor;
  return {cx - hw, cy - hh, cx + hw, cy + hh};
}

double BBox::diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }

BBox empty_bbox() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, -inf, -inf};
}

Locus1d make_line_locus(const Point2& through, const Direction2& dir) { return Locus1d::line(through, dir); }
Locus1d make_ray_locus(const Point2& origin, const Direction2& dir) { return Locus1d::ray(origin, dir); }
Locus1d make_circle_locus(const Point2& center, double radius) { return Locus1d::circle(center, radius); }

Locus1d make_displaced_line(const Locus1d& line, Side side, double dist) {
  if (line.kind != LocusKind::Line) throw GeometryError("make-displaced-line needs a line");
  const double s = side == Side::Left ? dist : -dist;
  return Locus1d::line(add(line.origin, scaled(line.dir.left_normal(), s)), line.dir);
}

double signed_distance(const Locus1d& line, const Point2& p) {
  if (!line.is_straight()) throw GeometryError("signed distance needs a line");
  return cross(line.dir.vec(), v_sub(p, line.origin));
}

Locus1d angular_bisector(const Locus1d& l1, const Locus1d& l2, int s1, int s2, const Tolerance& tol) {
  if (l1.kind != LocusKind::Line || l2.kind != LocusKind::Line) throw GeometryError("angular bisector needs two lines");
  const double cr = cross(l1.dir.vec(), l2.dir.vec());
  if (tol.near_zero(cr)) {
    const double gap = signed_distance(l1, l2.origin);
    if (tol.near_zero(gap, scale_of(l2.origin))) return l1;
    return Locus1d::line(add(l1.origin, scaled(l1.dir.left_normal(), 0.5 * gap)), l1.dir);
  }
  const auto meet = intersect_0d(l1, l2, tol);
  const Point2 apex = meet.points.front();
  // On the bisector s1*n1.u == s2*n2.u, so u is perpendicular to s1*n1 - s2*n2.
  const Vector2 n1 = scaled(l1.dir.left_normal(), s1);
  const Vector2 n2 = scaled(l2.dir.left_normal(), s2);
  const Vector2 w = {n1.x - n2.x, n1.y - n2.y};
  Vector2 u = {-w.y, w.x};
  if (dot(n1, u) < 0.0) u = scaled(u, -1.0);
  return Locus1d::ray(apex, Direction2::from(u));
}

Locus1d shift_locus(const Locus1d& l, const Vector2& v) {
  Locus1d out = l;
  out.origin = add(l.origin, v);
  return out;
}

namespace {

IntersectionResult straight_straight(const Locus1d& a, const Locus1d& b, const Tolerance& tol) {
  const Vector2 da = a.dir.vec(), db = b.dir.vec();
  const double cr = cross(da, db);
  const Vector2 ab = v_sub(b.origin, a.origin);
  if (tol.near_zero(cr)) {
    if (!tol.near_zero(cross(da, ab), scale_of(b.origin) + scale_of(a.origin))) return IntersectionResult::empty();
    if (a.kind == LocusKind::Line) return IntersectionResult::coincident(b);
    if (b.kind == LocusKind::Line) return IntersectionResult::coincident(a);
    const double t = dot(ab, da);  // position of b's origin along a
    if (dot(da, db) > 0.0) return IntersectionResult::coincident(t >= 0.0 ? b : a);
    // opposite rays: they overlap on the segment between the origins
    if (t < -tol.abs_eps) return IntersectionResult::empty();
    return IntersectionResult::make_points({a.origin, b.origin}, tol);
  }
  const double t = cross(ab, db) / cr;
  const double u = cross(ab, da) / cr;
  if (a.kind == LocusKind::Ray && t < -tol.abs_eps) return IntersectionResult::empty();
  if (b.kind == LocusKind::Ray && u < -tol.abs_eps) return IntersectionResult::empty();
  return IntersectionResult::make_points({a.point_at(std::max(t, a.kind == LocusKind::Ray ? 0.0 : t))}, tol);
}

IntersectionResult straight_circle(const Locus1d& a, const Locus1d& c, const Tolerance& tol) {
  const double t0 = dot(v_sub(c.origin, a.origin), a.dir.vec());
  const Point2 foot = a.point_at(t0);
  const double h = distance(foot, c.origin);
  std::vector<double> ts;
  if (tol.equal(h, c.radius)) {
    ts.push_back(t0);
  } else if (h < c.radius) {
    const double s = std::sqrt(c.radius * c.radius - h * h);
    ts = {t0 - s, t0 + s};
  }
  std::vector<Point2> pts;
  for (double t : ts) {
    if (a.kind == LocusKind::Ray && t < -tol.abs_eps) continue;
    pts.push_back(a.point_at(a.kind == LocusKind::Ray ? std::max(t, 0.0) : t));
  }
  return IntersectionResult::make_points(std::move(pts), tol);
}

IntersectionResult circle_circle(const Locus1d& a, const Locus1d& b, const Tolerance& tol) {
  const Vector2 ab = v_sub(b.origin, a.origin);
  const double d = magnitude(ab);
  const double scale = std::max(a.radius, b.radius);
  if (tol.near_zero(d, scale)) {
    if (tol.equal(a.radius, b.radius)) return IntersectionResult::coincident(a);
    return IntersectionResult::empty();
  }
  const double outer = a.radius + b.radius, inner = std::abs(a.radius - b.radius);
  const Vector2 u = scaled(ab, 1.0 / d);
  if (tol.equal(d, outer) || tol.equal(d, inner)) {
    const double along = tol.equal(d, outer) ? a.radius : (a.radius >= b.radius ? a.radius : -a.radius);
    return IntersectionResult::make_points({add(a.origin, scaled(u, along))}, tol);
  }
  if (d > outer || d < inner) return IntersectionResult::empty();
  const double x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - x * x));
  const Point2 m = add(a.origin, scaled(u, x));
  const Vector2 n = {-u.y, u.x};
  return IntersectionResult::make_points({add(m, scaled(n, h)), add(m, scaled(n, -h))}, tol);
}

void require_implemented(const Locus1d& l) {
  if (l.kind != LocusKind::Line && l.kind != LocusKind::Ray && l.kind != LocusKind::Circle) {
    throw GeometryError("intersection with a reserved " + to_string(l.kind) + " locus");
  }
}

}  // namespace

IntersectionResult intersect_0d(const Locus1d& a, const Locus1d& b, const Tolerance& tol) {
  require_implemented(a);
  require_implemented(b);
  if (a.is_straight() && b.is_straight()) return straight_straight(a, b, tol);
  if (a.is_straight()) return straight_circle(a, b, tol);
  if (b.is_straight()) return straight_circle(b, a, tol);
  return circle_circle(a, b, tol);
}

std::pair<double, Point2> closest_point(const Locus1d& l, const Point2& p) {
  if (l.kind == LocusKind::Circle) {
    const Vector2 r = v_sub(p, l.origin);
    double t = magnitude(r) == 0.0 ? 0.0 : std::atan2(r.y, r.x);
    if (t < 0.0) t += kTwoPi;
    return {t, l.point_at(t)};
  }
  double t = dot(v_sub(p, l.origin), l.dir.vec());
  if (l.kind == LocusKind::Ray) t = std::max(t, 0.0);
  return {t, l.point_at(t)};
}

bool clip_interval(const Locus1d& l, const BBox& box, double& t0, double& t1) {
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  if (l.kind == LocusKind::Ray) t0 = 0.0;
  const double o[2] = {l.origin.x, l.origin.y};
  const double d[2] = {l.dir.dx(), l.dir.dy()};
  const double lo[2] = {box.xmin, box.ymin};
  const double hi[2] = {box.xmax, box.ymax};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return false;
      continue;
    }
    double a = (lo[k] - o[k]) / d[k], b = (hi[k] - o[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 <= t1;
}

std::vector<double> discretize(const Locus1d& l, const BBox& box, int n) {
  std::vector<double> ts;
  if (n < 2 || !box.valid()) return ts;
  if (l.kind == LocusKind::Circle) {
    const double cx = std::clamp(l.origin.x, box.xmin, box.xmax);
    const double cy = std::clamp(l.origin.y, box.ymin, box.ymax);
    const double near = std::hypot(cx - l.origin.x, cy - l.origin.y);
    const double far = std::hypot(std::max(std::abs(box.xmin - l.origin.x), std::abs(box.xmax - l.origin.x)),
                                  std::max(std::abs(box.ymin - l.origin.y), std::abs(box.ymax - l.origin.y)));
    if (near > l.radius || far < l.radius) return ts;
    for (int k = 0; k < n; ++k) ts.push_back(kTwoPi * k / n);
    return ts;
  }
  double t0, t1;
  if (!clip_interval(l, box, t0, t1)) return ts;
  for (int k = 0; k < n; ++k) ts.push_back(t0 + (t1 - t0) * k / (n - 1));
  return ts;
}

}  // namespace dofforge

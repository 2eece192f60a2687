#include "dofforge/verify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dofforge {

namespace {

class Unreadable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Only what a hand-written scene constraint can contain.
struct V {
  enum { Num, Pt, Dir, Line, Ray, Circle, Bias } kind;
  double num = 0;
  double x = 0, y = 0;    // point, line through-point, ray origin, circle center
  double dx = 1, dy = 0;  // unit
  int sign = 1;
  bool inside = false;
};

struct Resolver {
  const Scene& scene;
  const GeomState& g;
  std::string gsym;

  V eval(const Term& t) const {
    if (t.is_num()) return {V::Num, t.number()};
    if (t.is_sym()) return symbol(t.name());
    if (!t.is_app()) throw Unreadable("variable " + t.str());
    const std::string& h = t.name();
    if (h == "point" || h == "vec") {
      const double a = num(t.arg(0)), b = num(t.arg(1));
      if (h == "point") return pt(a, b);
      return dir(a, b);
    }
    if (h == ">>") return field(t.arg(0), t.arg(1));
    if (h == "make-line-locus" || h == "make-ray-locus") {
      const V p = eval(t.arg(0)), d = as_dir(eval(t.arg(1)));
      if (p.kind != V::Pt) throw Unreadable(t.str());
      V out{h == "make-line-locus" ? V::Line : V::Ray};
      out.x = p.x, out.y = p.y, out.dx = d.dx, out.dy = d.dy;
      return out;
    }
    if (h == "make-circle-locus") {
      const V c = eval(t.arg(0));
      if (c.kind != V::Pt) throw Unreadable(t.str());
      V out{V::Circle};
      out.x = c.x, out.y = c.y, out.num = num(t.arg(1));
      return out;
    }
    throw Unreadable("unsupported head " + h);
  }

  double num(const Term& t) const {
    const V v = eval(t);
    if (v.kind != V::Num) throw Unreadable("expected a number: " + t.str());
    return v.num;
  }

  static V pt(double x, double y) {
    V v{V::Pt};
    v.x = x, v.y = y;
    return v;
  }
  static V dir(double dx, double dy) {
    const double n = std::hypot(dx, dy);
    if (!(n > 0)) throw Unreadable("zero direction");
    V v{V::Dir};
    v.dx = dx / n, v.dy = dy / n;
    return v;
  }
  static V as_dir(const V& v) {
    if (v.kind == V::Dir) return v;
    if (v.kind == V::Pt) return dir(v.x, v.y);
    throw Unreadable("expected a direction");
  }

  V symbol(const std::string& s) const {
    if (s == "BIAS_COUNTERCLOCKWISE" || s == "BIAS_LEFT") return {V::Bias, 0, 0, 0, 1, 0, +1};
    if (s == "BIAS_CLOCKWISE" || s == "BIAS_RIGHT") return {V::Bias, 0, 0, 0, 1, 0, -1};
    if (s == "BIAS_OUTSIDE") return {V::Bias, 0, 0, 0, 1, 0, +1, false};
    if (s == "BIAS_INSIDE") return {V::Bias, 0, 0, 0, 1, 0, +1, true};
    if (s.size() > 1 && s[0] == '$') {
      for (const auto& e : scene.entities) {
        if (e.name != s.substr(1)) continue;
        if (e.kind == Entity::Kind::Point) return pt(e.point.x, e.point.y);
        V v{V::Line};
        v.x = e.point.x, v.y = e.point.y, v.dx = e.dir.dx(), v.dy = e.dir.dy();
        return v;
      }
    }
    throw Unreadable("unknown name " + s);
  }

  V field(const Term& of, const Term& f) const {
    if (!f.is_sym()) throw Unreadable("bad accessor");
    const std::string& n = f.name();
    if (of.is_sym(gsym)) {
      if (n == "center") return pt(g.center.x, g.center.y);
      if (n == "end1") return pt(g.end1.x, g.end1.y);
      if (n == "end2") return pt(g.end2.x, g.end2.y);
      if (n == "radius") return {V::Num, g.radius};
      if (n == "length") return {V::Num, std::hypot(g.end2.x - g.end1.x, g.end2.y - g.end1.y)};
      if (n == "direction") return dir(g.end2.x - g.end1.x, g.end2.y - g.end1.y);
      throw Unreadable("unknown field " + n);
    }
    const V e = eval(of);
    if (e.kind == V::Line && n == "direction") return dir(e.dx, e.dy);
    if (e.kind == V::Line && n == "through") return pt(e.x, e.y);
    throw Unreadable("unknown field " + n);
  }

  Point2 geom_point(const Term& acc) const {
    const V p = eval(acc);
    if (p.kind != V::Pt) throw Unreadable("expected a point accessor");
    return {p.x, p.y};
  }
};

// Left of the directed line is positive.
double signed_dist(const V& line, double px, double py) {
  return line.dx * (py - line.y) - line.dy * (px - line.x);
}

double dist_to(const V& l, double px, double py) {
  switch (l.kind) {
    case V::Line: return std::abs(signed_dist(l, px, py));
    case V::Ray: {
      const double t = (px - l.x) * l.dx + (py - l.y) * l.dy;
      if (t <= 0) return std::hypot(px - l.x, py - l.y);
      return std::abs(signed_dist(l, px, py));
    }
    case V::Circle: return std::abs(std::hypot(px - l.x, py - l.y) - l.num);
    default: throw Unreadable("expected a locus");
  }
}

double residual(const Term& inv, const Resolver& r) {
  const GeomState& g = r.g;
  const bool circle = g.kind == GeomKind::Circle;
  const std::string& h = inv.name();
  if (h == "invariant-point") {
    const Point2 p = r.geom_point(inv.arg(1));
    const V q = r.eval(inv.arg(2));
    if (q.kind != V::Pt) throw Unreadable("expected a point");
    return std::hypot(p.x - q.x, p.y - q.y);
  }
  if (h == "1d-constrained-point") {
    const Point2 p = r.geom_point(inv.arg(1));
    return dist_to(r.eval(inv.arg(2)), p.x, p.y);
  }
  if (h == "2d-constrained-point") return 0.0;
  if (h == "fixed-distance-point") {
    const V q = r.eval(inv.arg(1));
    const double d = r.num(inv.arg(2));
    const V b = r.eval(inv.arg(3));
    if (q.kind != V::Pt || b.kind != V::Bias) throw Unreadable(inv.str());
    if (!circle) return std::abs(std::hypot(g.end1.x - q.x, g.end1.y - q.y) - d);
    // outside: boundary d away from the point; inside: the point d inside the boundary
    const double want = b.inside ? g.radius - d : g.radius + d;
    return std::abs(std::hypot(g.center.x - q.x, g.center.y - q.y) - want);
  }
  if (h == "fixed-distance-line") {
    const V l = r.eval(inv.arg(1));
    const double d = r.num(inv.arg(2));
    const V b = r.eval(inv.arg(3));
    if (l.kind != V::Line || b.kind != V::Bias) throw Unreadable(inv.str());
    if (!circle) return std::abs(b.sign * signed_dist(l, g.end1.x, g.end1.y) - d);
    // tangent on the bias side at distance d: center at d + radius
    return std::abs(b.sign * signed_dist(l, g.center.x, g.center.y) - (d + g.radius));
  }
  if (h == "invariant-direction") {
    if (circle) return 0.0;
    const V want = Resolver::as_dir(r.eval(inv.arg(1)));
    const V have = Resolver::dir(g.end2.x - g.end1.x, g.end2.y - g.end1.y);
    return std::abs(std::atan2(have.dx * want.dy - have.dy * want.dx, have.dx * want.dx + have.dy * want.dy));
  }
  if (h == "invariant-dimension") {
    const double have = circle ? g.radius : std::hypot(g.end2.x - g.end1.x, g.end2.y - g.end1.y);
    return std::abs(have - r.num(inv.arg(1)));
  }
  throw Unreadable("not an invariant: " + inv.str());
}

}  // namespace

double VerifyReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : rows) {
    if (!r.error.empty()) return std::numeric_limits<double>::infinity();
    m = std::max(m, r.residual);
  }
  return m;
}

bool VerifyReport::pass() const {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

std::string VerifyReport::table() const {
  std::ostringstream os;
  char buf[64];
  for (const auto& r : rows) {
    if (r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%-3zu %-4s %12.3e  ", r.index, r.pass ? "ok" : "FAIL", r.residual);
    } else {
      std::snprintf(buf, sizeof buf, "%-3zu %-4s %12s  ", r.index, "FAIL", "error");
    }
    os << buf << r.geom << "  " << r.invariant;
    if (!r.error.empty()) os << "  (" << r.error << ")";
    os << "\n";
  }
  std::snprintf(buf, sizeof buf, "max residual %.3e, tolerance %.3e: %s\n", max_residual(), tolerance,
                pass() ? "pass" : "FAIL");
  os << buf;
  return os.str();
}

VerifyReport verify_scene(const Scene& scene, double tol) {
  VerifyReport rep;
  rep.tolerance = tol;
  for (size_t k = 0; k < scene.constraints.size(); ++k) {
    const auto& c = scene.constraints[k];
    ResidualRow row;
    row.index = k;
    row.geom = c.geom;
    row.invariant = c.invariant.str();
    const GeomState* g = scene.geom(c.geom);
    try {
      if (!g) throw Unreadable("unknown geom " + c.geom);
      row.residual = residual(c.invariant, Resolver{scene, *g, "$" + c.geom});
      row.pass = std::isfinite(row.residual) && row.residual <= tol;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.pass = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace dofforge

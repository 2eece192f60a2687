#include "dofforge/eval.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dofforge {

const Entity* Scene::entity(const std::string& name) const {
  for (const auto& e : entities) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const GeomState* Scene::geom(const std::string& name) const {
  for (const auto& g : geoms) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

GeomState* Scene::geom(const std::string& name) {
  for (auto& g : geoms) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

BBox Scene::bbox() const {
  BBox b = empty_bbox();
  for (const auto& e : entities) b.include(e.point);
  for (const auto& g : geoms) {
    if (g.kind == GeomKind::Circle) {
      b.include({g.center.x - g.radius, g.center.y - g.radius});
      b.include({g.center.x + g.radius, g.center.y + g.radius});
    } else {
      b.include(g.end1);
      b.include(g.end2);
    }
  }
  if (!b.valid()) return {-1.0, -1.0, 1.0, 1.0};
  return b;
}

namespace {

const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::Scalar: return "scalar";
    case Value::Kind::Vec: return "point";
    case Value::Kind::Dir: return "direction";
    case Value::Kind::Locus: return "locus";
    case Value::Kind::Isect: return "intersection";
    case Value::Kind::Sym: return "symbol";
  }
  return "?";
}

[[noreturn]] void mismatch(const Value& v, const char* want) {
  throw TypeMismatch(std::string("expected a ") + want + ", got a " + kind_name(v.kind()));
}

}  // namespace

double Value::scalar() const {
  if (kind() != Kind::Scalar) mismatch(*this, "scalar");
  return std::get<double>(v);
}

Point2 Value::point() const {
  if (kind() != Kind::Vec) mismatch(*this, "point");
  return std::get<Point2>(v);
}

Vector2 Value::vec() const {
  const Point2 p = point();
  return {p.x, p.y};
}

Direction2 Value::dir() const {
  // a literal (vec dx dy) stands for its direction
  if (kind() == Kind::Vec) return Direction2::from(vec());
  if (kind() != Kind::Dir) mismatch(*this, "direction");
  return std::get<Direction2>(v);
}

Locus1d Value::locus() const {
  if (kind() == Kind::Isect && isect().tag == IntersectionResult::Tag::Coincident) return isect().locus;
  if (kind() != Kind::Locus) mismatch(*this, "locus");
  return std::get<Locus1d>(v);
}

const IntersectionResult& Value::isect() const {
  if (kind() != Kind::Isect) mismatch(*this, "intersection");
  return std::get<IntersectionResult>(v);
}

const std::string& Value::sym() const {
  if (kind() != Kind::Sym) mismatch(*this, "symbol");
  return std::get<std::string>(v);
}

std::string to_string(const Value& v) {
  std::ostringstream os;
  auto pt = [&](const Point2& p) { os << "(" << format_number(p.x) << " " << format_number(p.y) << ")"; };
  switch (v.kind()) {
    case Value::Kind::Scalar: os << format_number(v.scalar()); break;
    case Value::Kind::Vec: pt(v.point()); break;
    case Value::Kind::Dir: os << "dir(" << format_number(v.dir().dx()) << " " << format_number(v.dir().dy()) << ")"; break;
    case Value::Kind::Locus: {
      const auto l = v.locus();
      os << to_string(l.kind) << " ";
      pt(l.origin);
      if (l.kind == LocusKind::Circle) {
        os << " r=" << format_number(l.radius);
      } else {
        os << " dir(" << format_number(l.dir.dx()) << " " << format_number(l.dir.dy()) << ")";
      }
      break;
    }
    case Value::Kind::Isect: {
      const auto& r = v.isect();
      if (r.tag == IntersectionResult::Tag::Empty) os << "empty";
      if (r.tag == IntersectionResult::Tag::Coincident) os << "coincident";
      if (r.tag == IntersectionResult::Tag::Points) {
        os << "points";
        for (const auto& p : r.points) {
          os << " ";
          pt(p);
        }
      }
      break;
    }
    case Value::Kind::Sym: os << v.sym(); break;
  }
  return os.str();
}

namespace {

Bias bias_of(const Value& v) {
  const auto b = bias_from_symbol(v.sym());
  if (!b) throw TypeMismatch("'" + v.sym() + "' is not a bias");
  return *b;
}

Side side_of(Bias b) {
  switch (b) {
    case Bias::CCW:
    case Bias::Left: return Side::Left;
    case Bias::CW:
    case Bias::Right: return Side::Right;
    default: throw TypeMismatch("a line displacement needs a left/right bias");
  }
}

const GeomState* geom_named(const std::string& sym, const EvalContext& ctx) {
  if (ctx.geom && sym == ctx.geom_sym) return ctx.geom;
  if (ctx.scene && sym.size() > 1 && sym[0] == '$') return ctx.scene->geom(sym.substr(1));
  return nullptr;
}

Point2 reference_point(const EvalContext& ctx) { return ctx.geom ? ctx.geom->anchor() : Point2{}; }

// A point-valued use of an intersection: the nearest candidate to the geom.
Point2 as_point(const Value& v, const EvalContext& ctx) {
  if (v.kind() != Value::Kind::Isect) return v.point();
  const auto& r = v.isect();
  const Point2 ref = reference_point(ctx);
  switch (r.tag) {
    case IntersectionResult::Tag::Empty: throw Diagnostic("0d-intersection", "loci do not intersect");
    case IntersectionResult::Tag::Coincident: return closest_point(r.locus, ref).second;
    case IntersectionResult::Tag::Points: {
      Point2 best = r.points.front();
      for (const auto& p : r.points) {
        if (distance(p, ref) < distance(best, ref)) best = p;
      }
      return best;
    }
  }
  return {};
}

Value accessor(const Term& obj, const std::string& field, const EvalContext& ctx) {
  if (obj.is_sym()) {
    if (const GeomState* g = geom_named(obj.name(), ctx)) {
      if (field == "center" || field == "end1" || field == "end2") return Value::of(g->point(field));
      if (field == "radius" && g->kind == GeomKind::Circle) return Value::of(g->radius);
      if (field == "length" && g->kind == GeomKind::LineSegment) return Value::of(g->length());
      if (field == "direction" && g->kind == GeomKind::LineSegment) return Value::of(g->direction());
      throw UnboundName(to_string(g->kind) + " " + obj.name() + " has no field '" + field + "'");
    }
  }
  const Value v = eval_expr(obj, ctx);
  if (field == "arbitrary-point") throw UnboundName("arbitrary point of " + obj.str() + " was never chosen");
  if (field == "magnitude") return Value::of(magnitude(v.vec()));
  if (field == "direction") {
    if (v.kind() == Value::Kind::Vec) return Value::of(Direction2::from(v.vec()));
    const Locus1d l = v.locus();
    if (!l.is_straight()) throw TypeMismatch("a circle locus has no direction");
    return Value::of(l.dir);
  }
  if (field == "through" || field == "center") return Value::of(v.locus().origin);
  if (field == "radius") {
    const Locus1d l = v.locus();
    if (l.kind != LocusKind::Circle) throw TypeMismatch("only circle loci have a radius");
    return Value::of(l.radius);
  }
  throw UnboundName("unknown field '" + field + "' of " + obj.str());
}

Value arith(const std::string& head, const Value& a, const Value& b) {
  using K = Value::Kind;
  if (head == "times") {
    if (a.kind() == K::Scalar && b.kind() == K::Scalar) return Value::of(a.scalar() * b.scalar());
    const Value& k = a.kind() == K::Scalar ? a : b;
    const Value& x = a.kind() == K::Scalar ? b : a;
    const Vector2 u = x.kind() == K::Dir ? x.dir().vec() : x.vec();
    return Value::of(scaled(u, k.scalar()));
  }
  const double sign = head == "plus" ? 1.0 : -1.0;
  if (a.kind() == K::Scalar) return Value::of(a.scalar() + sign * b.scalar());
  const Vector2 u = a.vec();
  const Vector2 w = b.kind() == K::Dir ? b.dir().vec() : b.vec();
  return Value::of(Vector2{u.x + sign * w.x, u.y + sign * w.y});
}

Value apply_head(const Term& t, const EvalContext& ctx) {
  const std::string& h = t.name();
  auto arg = [&](size_t i) { return eval_expr(t.arg(i), ctx); };
  auto pt = [&](size_t i) { return as_point(arg(i), ctx); };
  if (h == ">>") {
    if (!t.arg(1).is_sym()) throw TypeMismatch("accessor field must be a symbol: " + t.str());
    return accessor(t.arg(0), t.arg(1).name(), ctx);
  }
  if (h == "v-") return Value::of(v_sub(pt(0), pt(1)));
  if (h == "plus" || h == "minus" || h == "times") {
    Value a = arg(0), b = arg(1);
    if (a.kind() == Value::Kind::Isect) a = Value::of(as_point(a, ctx));
    if (b.kind() == Value::Kind::Isect) b = Value::of(as_point(b, ctx));
    return arith(h, a, b);
  }
  if (h == "negate") {
    const Value a = arg(0);
    if (a.kind() == Value::Kind::Scalar) return Value::of(-a.scalar());
    if (a.kind() == Value::Kind::Dir) return Value::of(a.dir().reversed());
    return Value::of(scaled(a.vec(), -1.0));
  }
  if (h == "magnitude") return Value::of(magnitude(arg(0).vec()));
  if (h == "point" || h == "vec") return Value::of(Point2{arg(0).scalar(), arg(1).scalar()});
  if (h == "direction-of") {
    const Value a = arg(0);
    return Value::of(a.kind() == Value::Kind::Dir ? a.dir() : Direction2::from(a.vec()));
  }
  if (h == "make-line-locus") return Value::of(make_line_locus(pt(0), arg(1).dir()));
  if (h == "make-ray-locus") return Value::of(make_ray_locus(pt(0), arg(1).dir()));
  if (h == "make-circle-locus") return Value::of(make_circle_locus(pt(0), arg(1).scalar()));
  if (h == "make-displaced-line") {
    return Value::of(make_displaced_line(arg(0).locus(), side_of(bias_of(arg(1))), arg(2).scalar()));
  }
  if (h == "angular-bisector") {
    return Value::of(angular_bisector(arg(0).locus(), arg(1).locus(), bias_sign(bias_of(arg(2))),
                                      bias_sign(bias_of(arg(3))), ctx.tol));
  }
  if (h == "0d-intersection") return Value::of(intersect_0d(arg(0).locus(), arg(1).locus(), ctx.tol));
  if (h == "shift-locus") return Value::of(shift_locus(arg(0).locus(), arg(1).vec()));
  if (h == "line-distance") return Value::of(bias_sign(bias_of(arg(2))) * signed_distance(arg(0).locus(), pt(1)));
  if (h == "biased-offset") {
    const double d = arg(0).scalar(), r = arg(1).scalar();
    return Value::of(bias_of(arg(2)) == Bias::Inside ? r - d : d + r);
  }
  if (h == "biased-gap") {
    const double m = arg(0).scalar(), d = arg(1).scalar();
    return Value::of(bias_of(arg(2)) == Bias::Inside ? m + d : m - d);
  }
  if (h == "rotation-to") {
    const Point2 pivot = pt(0);
    return Value::of(angle_between(Direction2::from(v_sub(pt(1), pivot)), Direction2::from(v_sub(pt(2), pivot))));
  }
  if (h == "direction-angle") return Value::of(angle_between(arg(0).dir(), arg(1).dir()));
  if (h == "make-parabola-locus") return Value::of(Locus1d::reserved(LocusKind::Parabola));
  if (h == "make-hyperbola-locus") return Value::of(Locus1d::reserved(LocusKind::Hyperbola));
  throw TypeMismatch("'" + h + "' is not a measurement");
}

}  // namespace

Value eval_expr(const Term& t, const EvalContext& ctx) {
  switch (t.kind()) {
    case TermKind::Num: return Value::of(t.number());
    case TermKind::Var: {
      auto it = ctx.locals.find(t.name());
      if (it == ctx.locals.end()) throw UnboundName("unbound variable ?" + t.name());
      return it->second;
    }
    case TermKind::Sym: {
      const std::string& s = t.name();
      if (auto it = ctx.params.find(s); it != ctx.params.end()) return eval_expr(it->second, ctx);
      if (s.size() > 1 && s[0] == '$' && ctx.scene) {
        if (const Entity* e = ctx.scene->entity(s.substr(1))) {
          return e->kind == Entity::Kind::Point ? Value::of(e->point) : Value::of(e->line());
        }
        if (geom_named(s, ctx)) throw TypeMismatch("geom " + s + " is not a value");
      }
      if (s[0] == '$') throw UnboundName("unknown name " + s);
      return Value::symbol(s);
    }
    case TermKind::App: break;
  }
  try {
    return apply_head(t, ctx);
  } catch (const GeometryError& e) {
    throw Diagnostic(t.name(), e.what());
  }
}

ResolvedInvariant resolve_invariant(const Term& inv, const EvalContext& ctx) {
  const auto type = inv_type_of(inv);
  if (!type) throw TypeMismatch("not an invariant: " + inv.str());
  ResolvedInvariant r;
  r.type = *type;
  auto acc = [&](const Term& a) {
    if (!a.is_app(">>") || !a.arg(1).is_sym()) throw TypeMismatch("expected a point accessor: " + a.str());
    return a.arg(1).name();
  };
  auto bias = [&](const Term& a) { return bias_of(eval_expr(a, ctx)); };
  switch (r.type) {
    case InvType::InvariantPoint:
      r.accessor = acc(inv.arg(1));
      r.point = as_point(eval_expr(inv.arg(2), ctx), ctx);
      break;
    case InvType::OneDConstrainedPoint:
      r.accessor = acc(inv.arg(1));
      r.locus = eval_expr(inv.arg(2), ctx).locus();
      break;
    case InvType::TwoDConstrainedPoint: break;
    case InvType::FixedDistancePoint:
      r.point = as_point(eval_expr(inv.arg(1), ctx), ctx);
      r.dist = eval_expr(inv.arg(2), ctx).scalar();
      r.bias = bias(inv.arg(3));
      break;
    case InvType::FixedDistanceLine:
      r.locus = eval_expr(inv.arg(1), ctx).locus();
      r.dist = eval_expr(inv.arg(2), ctx).scalar();
      r.bias = bias(inv.arg(3));
      break;
    case InvType::InvariantDirection: {
      const Value v = eval_expr(inv.arg(1), ctx);
      r.dir = v.kind() == Value::Kind::Dir ? v.dir() : Direction2::from(v.vec());
      break;
    }
    case InvType::InvariantDimension: r.value = eval_expr(inv.arg(1), ctx).scalar(); break;
  }
  return r;
}

double term_residual(const Term& inv, const EvalContext& ctx) {
  if (!ctx.geom) throw UnboundName("no geom to check " + inv.str());
  if (inv.is_app("invariant-point")) {
    const Value v = eval_expr(inv.arg(2), ctx);
    if (v.kind() == Value::Kind::Isect) {
      const auto& r = v.isect();
      const Point2 p = ctx.geom->point(inv.arg(1).arg(1).name());
      if (r.tag == IntersectionResult::Tag::Empty) return std::numeric_limits<double>::infinity();
      if (r.tag == IntersectionResult::Tag::Coincident) return locus_residual(r.locus, p);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : r.points) best = std::min(best, distance(p, q));
      return best;
    }
  }
  return invariant_residual(*ctx.geom, resolve_invariant(inv, ctx));
}

}  // namespace dofforge

#include "dofforge/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dofforge {

namespace {

void expect_object(const Json& j, const std::set<std::string>& allowed, const std::set<std::string>& required,
                   const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw SchemaError(where + ": unknown field '" + k + "'");
  }
  for (const auto& k : required) {
    if (!j.contains(k)) throw SchemaError(where + ": missing field '" + k + "'");
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(where + ": not finite");
  return v;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

Point2 point_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(where + ": expected [x, y]");
  return {number(j[0], where), number(j[1], where)};
}

Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }
Json dir_json(const Direction2& d) { return Json::array({d.dx(), d.dy()}); }

Term parse_expr(const std::string& s, const std::string& where) {
  try {
    return parse_term(s);
  } catch (const std::exception& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

// number | [x, y] | "Name" | "$name" | "( ... )"
Term expr_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return Term::num(number(j, where));
  if (j.is_array()) {
    const Point2 p = point_of(j, where);
    return Term::app("point", {Term::num(p.x), Term::num(p.y)});
  }
  const std::string s = text(j, where);
  if (s.empty()) throw SchemaError(where + ": empty name");
  if (s[0] == '(' || s[0] == '$') return parse_expr(s, where);
  return Term::sym("$" + s);
}

Json expr_to_json(const Term& t) {
  if (t.is_num()) return t.number();
  if (t.is_sym() && t.name().size() > 1 && t.name()[0] == '$') return t.name().substr(1);
  if (t.is_app("point") && t.arg(0).is_num() && t.arg(1).is_num()) {
    return Json::array({t.arg(0).number(), t.arg(1).number()});
  }
  return t.str();
}

Term bias_from_json(const Json& j, const std::string& where) {
  const std::string s = text(j, where);
  const auto b = bias_from_short(s);
  if (!b) throw SchemaError(where + ": unknown bias '" + s + "'");
  return Term::sym(bias_symbol(*b));
}

Json bias_to_json(const Term& t) {
  if (t.is_sym()) {
    if (const auto b = bias_from_symbol(t.name())) return bias_short(*b);
  }
  return nullptr;  // not representable; caller falls back to the term form
}

Term accessor(const std::string& g, const Json& j, const std::string& where) {
  const std::string a = text(j, where);
  if (a != "center" && a != "end1" && a != "end2") throw SchemaError(where + ": unknown accessor '" + a + "'");
  return Term::app(">>", {Term::sym(g), Term::sym(a)});
}

Term direction_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) {
    const Point2 p = point_of(j, where);
    return Term::app("vec", {Term::num(p.x), Term::num(p.y)});
  }
  return expr_from_json(j, where);
}

Json direction_to_json(const Term& t) {
  if (t.is_app("vec") && t.arg(0).is_num() && t.arg(1).is_num()) {
    return Json::array({t.arg(0).number(), t.arg(1).number()});
  }
  return expr_to_json(t);
}

Json structured(const Term& t) {
  const auto type = inv_type_of(t);
  if (!type) return nullptr;
  Json j;
  j["type"] = inv_head(*type);
  auto acc = [&](const Term& a) -> Json {
    if (a.is_app(">>") && a.arg(0) == t.arg(0) && a.arg(1).is_sym()) return a.arg(1).name();
    return nullptr;
  };
  switch (*type) {
    case InvType::InvariantPoint:
      j["accessor"] = acc(t.arg(1));
      j["point"] = expr_to_json(t.arg(2));
      break;
    case InvType::OneDConstrainedPoint:
      j["accessor"] = acc(t.arg(1));
      j["locus"] = expr_to_json(t.arg(2));
      break;
    case InvType::TwoDConstrainedPoint:
      j["accessor"] = acc(t.arg(1));
      j["region"] = expr_to_json(t.arg(2));
      break;
    case InvType::FixedDistancePoint:
      j["point"] = expr_to_json(t.arg(1));
      j["distance"] = expr_to_json(t.arg(2));
      j["bias"] = bias_to_json(t.arg(3));
      break;
    case InvType::FixedDistanceLine:
      j["line"] = expr_to_json(t.arg(1));
      j["distance"] = expr_to_json(t.arg(2));
      j["bias"] = bias_to_json(t.arg(3));
      break;
    case InvType::InvariantDirection: j["direction"] = direction_to_json(t.arg(1)); break;
    case InvType::InvariantDimension: j["value"] = expr_to_json(t.arg(1)); break;
  }
  for (const auto& [k, v] : j.items()) {
    if (v.is_null()) return nullptr;
  }
  return j;
}

std::string geom_kind_name(GeomKind k) { return k == GeomKind::Circle ? "circle" : "line-segment"; }

GeomKind geom_kind_from(const Json& j, const std::string& where) {
  const std::string s = text(j, where);
  if (s == "circle") return GeomKind::Circle;
  if (s == "line-segment") return GeomKind::LineSegment;
  throw SchemaError(where + ": unknown geom kind '" + s + "'");
}

void check_names(const Term& t, const Scene& s, const std::string& g, const std::string& where) {
  if (t.is_sym() && t.name().size() > 1 && t.name()[0] == '$') {
    const std::string n = t.name().substr(1);
    if (n != g && !s.entity(n)) throw SchemaError(where + ": unknown name '" + n + "'");
  }
  if (t.is_app()) {
    for (const auto& a : t.args()) check_names(a, s, g, where);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 5e-7 ? 0.0 : v);
  return buf;
}

}  // namespace

Term invariant_from_json(const Json& j, const std::string& geom) {
  const std::string where = "invariant";
  const std::string g = "$" + geom;
  if (j.is_string()) return parse_expr(j.get<std::string>(), where);
  if (j.is_object() && j.contains("term")) {
    expect_object(j, {"term"}, {"term"}, where);
    return parse_expr(text(j["term"], where), where);
  }
  if (!j.is_object() || !j.contains("type")) throw SchemaError(where + ": expected an object with 'type'");
  const std::string type = text(j["type"], where + ".type");
  const std::string w = where + " " + type;
  const Term G = Term::sym(g);
  if (type == "invariant-point") {
    expect_object(j, {"type", "accessor", "point"}, {"accessor", "point"}, w);
    return Term::app(type, {G, accessor(g, j["accessor"], w), expr_from_json(j["point"], w)});
  }
  if (type == "1d-constrained-point") {
    expect_object(j, {"type", "accessor", "locus"}, {"accessor", "locus"}, w);
    return Term::app(type, {G, accessor(g, j["accessor"], w), expr_from_json(j["locus"], w)});
  }
  if (type == "2d-constrained-point") {
    expect_object(j, {"type", "accessor", "region"}, {"accessor", "region"}, w);
    return Term::app(type, {G, accessor(g, j["accessor"], w), expr_from_json(j["region"], w)});
  }
  if (type == "fixed-distance-point") {
    expect_object(j, {"type", "point", "distance", "bias"}, {"point", "distance", "bias"}, w);
    return Term::app(type, {G, expr_from_json(j["point"], w), expr_from_json(j["distance"], w),
                            bias_from_json(j["bias"], w)});
  }
  if (type == "fixed-distance-line") {
    expect_object(j, {"type", "line", "distance", "bias"}, {"line", "distance", "bias"}, w);
    return Term::app(type, {G, expr_from_json(j["line"], w), expr_from_json(j["distance"], w),
                            bias_from_json(j["bias"], w)});
  }
  if (type == "invariant-direction") {
    expect_object(j, {"type", "direction"}, {"direction"}, w);
    return Term::app(type, {G, direction_from_json(j["direction"], w)});
  }
  if (type == "invariant-dimension") {
    expect_object(j, {"type", "value"}, {"value"}, w);
    return Term::app(type, {G, expr_from_json(j["value"], w)});
  }
  throw SchemaError(where + ": unknown type '" + type + "'");
}

Json invariant_to_json(const Term& inv) {
  Json j = structured(inv);
  const std::string g = inv.is_app() && inv.arity() && inv.arg(0).is_sym() ? inv.arg(0).name().substr(1) : "";
  // fall back whenever the structured form would not read back identically
  if (!j.is_null()) {
    try {
      if (invariant_from_json(j, g) == inv) return j;
    } catch (const DofError&) {
    }
  }
  return Json{{"term", inv.str()}};
}

Scene scene_from_json(const Json& j) {
  expect_object(j, {"tolerance", "entities", "geoms", "constraints"}, {}, "scene");
  Scene s;
  if (j.contains("tolerance")) {
    const auto& t = j["tolerance"];
    expect_object(t, {"abs", "rel"}, {}, "tolerance");
    if (t.contains("abs")) s.tol.abs_eps = number(t["abs"], "tolerance.abs");
    if (t.contains("rel")) s.tol.rel_eps = number(t["rel"], "tolerance.rel");
  }
  std::set<std::string> names;
  auto claim = [&](const std::string& n, const std::string& where) {
    if (n.empty() || n[0] == '$' || n[0] == '(' || n.find_first_of(" \t\n()") != std::string::npos) {
      throw SchemaError(where + ": bad name '" + n + "'");
    }
    if (!names.insert(n).second) throw SchemaError(where + ": duplicate name '" + n + "'");
  };
  for (const auto& e : j.value("entities", Json::array())) {
    expect_object(e, {"name", "kind", "data"}, {"name", "kind", "data"}, "entity");
    Entity en;
    en.name = text(e["name"], "entity.name");
    const std::string w = "entity " + en.name;
    claim(en.name, w);
    const std::string kind = text(e["kind"], w + ".kind");
    if (kind == "point") {
      en.kind = Entity::Kind::Point;
      en.point = point_of(e["data"], w);
    } else if (kind == "line") {
      en.kind = Entity::Kind::Line;
      expect_object(e["data"], {"through", "direction"}, {"through", "direction"}, w);
      en.point = point_of(e["data"]["through"], w + ".through");
      const Point2 d = point_of(e["data"]["direction"], w + ".direction");
      try {
        en.dir = Direction2::from(d.x, d.y);
      } catch (const GeometryError&) {
        throw SchemaError(w + ": zero direction");
      }
    } else {
      throw SchemaError(w + ": unknown kind '" + kind + "'");
    }
    s.entities.push_back(en);
  }
  for (const auto& gj : j.value("geoms", Json::array())) {
    expect_object(gj, {"name", "kind", "state", "preserved"}, {"name", "kind", "state"}, "geom");
    const std::string name = text(gj["name"], "geom.name");
    const std::string w = "geom " + name;
    claim(name, w);
    const GeomKind kind = geom_kind_from(gj["kind"], w + ".kind");
    const auto& st = gj["state"];
    GeomState g;
    if (kind == GeomKind::Circle) {
      expect_object(st, {"center", "radius"}, {"center", "radius"}, w + ".state");
      const double r = number(st["radius"], w + ".radius");
      if (!(r > 0)) throw SchemaError(w + ": radius must be positive");
      g = GeomState::circle(name, point_of(st["center"], w + ".center"), r);
    } else {
      expect_object(st, {"end1", "end2"}, {"end1", "end2"}, w + ".state");
      g = GeomState::segment(name, point_of(st["end1"], w + ".end1"), point_of(st["end2"], w + ".end2"));
      if (!(g.length() > 0)) throw SchemaError(w + ": zero length");
    }
    for (const auto& p : gj.value("preserved", Json::array())) g.preserved.push_back(invariant_from_json(p, name));
    s.geoms.push_back(g);
  }
  for (const auto& c : j.value("constraints", Json::array())) {
    expect_object(c, {"geom", "invariant"}, {"geom", "invariant"}, "constraint");
    SceneConstraint sc;
    sc.geom = text(c["geom"], "constraint.geom");
    if (!s.geom(sc.geom)) throw SchemaError("constraint: unknown geom '" + sc.geom + "'");
    sc.invariant = invariant_from_json(c["invariant"], sc.geom);
    if (!inv_type_of(sc.invariant)) throw SchemaError("constraint: not an invariant: " + sc.invariant.str());
    if (!sc.invariant.arg(0).is_sym("$" + sc.geom)) {
      throw SchemaError("constraint: invariant is not on geom '" + sc.geom + "'");
    }
    check_names(sc.invariant, s, sc.geom, "constraint on " + sc.geom);
    s.constraints.push_back(sc);
  }
  for (const auto& g : s.geoms) {
    for (const auto& p : g.preserved) check_names(p, s, g.name, "geom " + g.name + " preserved");
  }
  return s;
}

Json scene_to_json(const Scene& s) {
  Json j;
  j["tolerance"] = {{"abs", s.tol.abs_eps}, {"rel", s.tol.rel_eps}};
  j["entities"] = Json::array();
  for (const auto& e : s.entities) {
    Json ej{{"name", e.name}, {"kind", e.kind == Entity::Kind::Point ? "point" : "line"}};
    if (e.kind == Entity::Kind::Point) {
      ej["data"] = point_json(e.point);
    } else {
      ej["data"] = {{"through", point_json(e.point)}, {"direction", dir_json(e.dir)}};
    }
    j["entities"].push_back(ej);
  }
  j["geoms"] = Json::array();
  for (const auto& g : s.geoms) {
    Json gj{{"name", g.name}, {"kind", geom_kind_name(g.kind)}};
    if (g.kind == GeomKind::Circle) {
      gj["state"] = {{"center", point_json(g.center)}, {"radius", g.radius}};
    } else {
      gj["state"] = {{"end1", point_json(g.end1)}, {"end2", point_json(g.end2)}};
    }
    gj["preserved"] = Json::array();
    for (const auto& p : g.preserved) gj["preserved"].push_back(invariant_to_json(p));
    j["geoms"].push_back(gj);
  }
  j["constraints"] = Json::array();
  for (const auto& c : s.constraints) {
    j["constraints"].push_back({{"geom", c.geom}, {"invariant", invariant_to_json(c.invariant)}});
  }
  return j;
}

Json step_to_json(const Step& s) {
  Json j{{"op", to_string(s.kind)}};
  if (!s.local.empty()) j["local"] = s.local;
  if (s.kind != Step::Kind::Abort) j["expr"] = s.expr.str();
  if (s.kind == Step::Kind::ForMin) j["domain"] = to_string(s.domain);
  auto arm = [](const std::vector<Step>& b) {
    Json a = Json::array();
    for (const auto& x : b) a.push_back(step_to_json(x));
    return a;
  };
  if (!s.body.empty()) j["body"] = arm(s.body);
  if (!s.coincident.empty()) j["coincident"] = arm(s.coincident);
  if (!s.empty.empty()) j["empty"] = arm(s.empty);
  if (s.kind == Step::Kind::Abort) j["message"] = s.message;
  return j;
}

Step step_from_json(const Json& j) {
  expect_object(j, {"op", "local", "expr", "domain", "body", "coincident", "empty", "message"}, {"op"}, "step");
  Step s;
  const std::string op = text(j["op"], "step.op");
  bool known = false;
  for (auto k : {Step::Kind::Bind, Step::Kind::Apply, Step::Kind::ForMin, Step::Kind::Case, Step::Kind::Abort}) {
    if (to_string(k) == op) {
      s.kind = k;
      known = true;
    }
  }
  if (!known) throw SchemaError("step: unknown op '" + op + "'");
  if (j.contains("local")) s.local = text(j["local"], "step.local");
  if (j.contains("expr")) s.expr = parse_expr(text(j["expr"], "step.expr"), "step.expr");
  if (j.contains("domain")) {
    const std::string d = text(j["domain"], "step.domain");
    known = false;
    for (auto k : {Step::Domain::Points, Step::Domain::Amount, Step::Domain::Angle}) {
      if (to_string(k) == d) {
        s.domain = k;
        known = true;
      }
    }
    if (!known) throw SchemaError("step: unknown domain '" + d + "'");
  }
  auto arm = [](const Json& a, const std::string& w) {
    if (!a.is_array()) throw SchemaError(w + ": expected an array");
    std::vector<Step> out;
    for (const auto& x : a) out.push_back(step_from_json(x));
    return out;
  };
  if (j.contains("body")) s.body = arm(j["body"], "step.body");
  if (j.contains("coincident")) s.coincident = arm(j["coincident"], "step.coincident");
  if (j.contains("empty")) s.empty = arm(j["empty"], "step.empty");
  if (j.contains("message")) s.message = text(j["message"], "step.message");
  return s;
}

Json library_to_json(const PlanLibrary& lib) {
  Json j;
  j["geom_kind"] = lib.geom_kind;
  j["rulebase_hash"] = lib.rulebase_hash;
  j["config"] = {{"depth", lib.depth}, {"alternative", lib.alternative}};
  j["fragments"] = Json::array();
  for (const auto& f : lib.fragments) {
    Json fj;
    fj["signature"] = to_string(f.signature);
    fj["params"] = f.params;
    fj["pattern"] = Json::array();
    for (const auto& t : f.pattern) fj["pattern"].push_back(t.str());
    fj["steps"] = Json::array();
    for (const auto& t : f.steps) fj["steps"].push_back(t.str());
    fj["body"] = Json::array();
    for (const auto& s : f.body) fj["body"].push_back(step_to_json(s));
    j["fragments"].push_back(fj);
  }
  return j;
}

PlanLibrary library_from_json(const Json& j) {
  expect_object(j, {"geom_kind", "rulebase_hash", "config", "fragments"}, {"geom_kind", "fragments"}, "library");
  PlanLibrary lib;
  lib.geom_kind = text(j["geom_kind"], "library.geom_kind");
  if (j.contains("rulebase_hash")) lib.rulebase_hash = text(j["rulebase_hash"], "library.rulebase_hash");
  if (j.contains("config")) {
    const auto& c = j["config"];
    expect_object(c, {"depth", "alternative"}, {}, "library.config");
    if (c.contains("depth")) lib.depth = static_cast<int>(number(c["depth"], "config.depth"));
    if (c.contains("alternative")) lib.alternative = static_cast<int>(number(c["alternative"], "config.alternative"));
  }
  if (!j["fragments"].is_array()) throw SchemaError("library.fragments: expected an array");
  for (const auto& fj : j["fragments"]) {
    expect_object(fj, {"signature", "params", "pattern", "steps", "body"}, {"signature", "params", "pattern", "body"},
                  "fragment");
    PlanFragment f;
    try {
      f.signature = parse_signature(text(fj["signature"], "fragment.signature"));
    } catch (const DofError& e) {
      throw SchemaError(std::string("fragment.signature: ") + e.what());
    }
    const std::string w = "fragment " + to_string(f.signature);
    for (const auto& p : fj["params"]) f.params.push_back(text(p, w + ".params"));
    for (const auto& t : fj["pattern"]) f.pattern.push_back(parse_expr(text(t, w + ".pattern"), w));
    for (const auto& t : fj.value("steps", Json::array())) f.steps.push_back(parse_expr(text(t, w + ".steps"), w));
    for (const auto& s : fj["body"]) f.body.push_back(step_from_json(s));
    lib.fragments.push_back(std::move(f));
  }
  return lib;
}

PlanSpec spec_from_json(const Json& j) {
  expect_object(j, {"geom_kind", "geom", "preserved", "to_be_achieved"}, {"geom_kind", "to_be_achieved"}, "spec");
  PlanSpec s;
  s.kind = geom_kind_from(j["geom_kind"], "spec.geom_kind");
  const std::string g = j.contains("geom") ? text(j["geom"], "spec.geom") : "g";
  s.geom = "$" + g;
  for (const auto& p : j.value("preserved", Json::array())) s.preserved.push_back(invariant_from_json(p, g));
  for (const auto& p : j["to_be_achieved"]) s.tba.push_back(invariant_from_json(p, g));
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json_file(const std::string& path) {
  const std::string t = read_text_file(path);
  try {
    return Json::parse(t);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DofError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw DofError("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::vector<Point2> chosen_points(const std::vector<ExecutionTrace>& traces) {
  std::vector<Point2> out;
  for (const auto& t : traces) {
    for (const auto& e : t.events) {
      if (e.kind == Step::Kind::ForMin && e.value && e.value->kind() == Value::Kind::Vec) out.push_back(e.value->point());
    }
  }
  return out;
}

std::string render_svg(const Scene& initial, const Scene& solved, const std::vector<Point2>& chosen,
                       const SvgOptions& opt) {
  BBox box = empty_bbox();
  auto add_geom = [&](const GeomState& g) {
    if (g.kind == GeomKind::Circle) {
      box.include({g.center.x - g.radius, g.center.y - g.radius});
      box.include({g.center.x + g.radius, g.center.y + g.radius});
    } else {
      box.include(g.end1);
      box.include(g.end2);
    }
  };
  for (const auto& e : initial.entities) box.include(e.point);
  for (const auto& g : initial.geoms) add_geom(g);
  for (const auto& g : solved.geoms) add_geom(g);
  for (const auto& p : chosen) box.include(p);
  if (!box.valid()) box = {-1, -1, 1, 1};
  const double margin = 0.05 * std::max(1e-9, box.diagonal()) + (box.diagonal() == 0 ? 1.0 : 0.0);
  box = {box.xmin - margin, box.ymin - margin, box.xmax + margin, box.ymax + margin};
  const double w = box.xmax - box.xmin, h = box.ymax - box.ymin;
  const double s = opt.size / std::max(w, h);
  const double W = w * s + 2 * opt.padding, H = h * s + 2 * opt.padding;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(H)
     << "\" viewBox=\"0 0 " << fmt(W) << " " << fmt(H) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // y-up: one flip for everything below
  os << "<g transform=\"matrix(" << fmt(s) << " 0 0 " << fmt(-s) << " " << fmt(opt.padding - s * box.xmin) << " "
     << fmt(H - opt.padding + s * box.ymin) << ")\" fill=\"none\">\n";
  const std::string stroke = " vector-effect=\"non-scaling-stroke\"";
  for (const auto& e : initial.entities) {
    if (e.kind == Entity::Kind::Point) {
      os << "<circle cx=\"" << fmt(e.point.x) << "\" cy=\"" << fmt(e.point.y) << "\" r=\"" << fmt(2.0 / s)
         << "\" fill=\"black\"/>\n";
      continue;
    }
    const Locus1d l = e.line();
    double t0, t1;
    if (!clip_interval(l, box, t0, t1)) continue;
    const Point2 a = l.point_at(t0), b = l.point_at(t1);
    os << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x) << "\" y2=\"" << fmt(b.y)
       << "\" stroke=\"black\" stroke-width=\"1.5\"" << stroke << "/>\n";
  }
  auto draw = [&](const GeomState& g, const std::string& style) {
    if (g.kind == GeomKind::Circle) {
      os << "<circle cx=\"" << fmt(g.center.x) << "\" cy=\"" << fmt(g.center.y) << "\" r=\"" << fmt(g.radius) << "\" "
         << style << stroke << "/>\n";
    } else {
      os << "<line x1=\"" << fmt(g.end1.x) << "\" y1=\"" << fmt(g.end1.y) << "\" x2=\"" << fmt(g.end2.x) << "\" y2=\""
         << fmt(g.end2.y) << "\" " << style << stroke << "/>\n";
    }
  };
  for (const auto& g : initial.geoms) draw(g, "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
  for (const auto& g : solved.geoms) draw(g, "stroke=\"#1f4e9c\" stroke-width=\"2\"");
  for (const auto& p : chosen) {
    os << "<circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y) << "\" r=\"" << fmt(3.0 / s)
       << "\" fill=\"#c0392b\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string explain_traces(const std::vector<ExecutionTrace>& traces, const PlanLibrary& lib) {
  std::ostringstream os;
  for (const auto& t : traces) {
    os << t.constraint << "\n";
    os << "  signature " << t.signature << "\n";
    try {
      if (const PlanFragment* f = lib.find(parse_signature(t.signature))) {
        std::istringstream body(pretty(f->body));
        for (std::string line; std::getline(body, line);) os << "  | " << line << "\n";
      }
    } catch (const DofError&) {
    }
    for (const auto& e : t.events) {
      os << "  " << to_string(e.kind);
      if (!e.local.empty()) os << " ?" << e.local;
      if (!e.detail.empty()) os << " " << e.detail;
      if (e.value) os << " = " << to_string(*e.value);
      if (e.kind == Step::Kind::ForMin) os << "  (motion " << format_number(e.objective) << ")";
      os << "\n";
    }
    for (const auto& [inv, r] : t.residuals) os << "  residual " << format_number(r) << "  " << inv << "\n";
    os << "  motion " << format_number(t.motion) << "\n";
  }
  return os.str();
}

}  // namespace dofforge

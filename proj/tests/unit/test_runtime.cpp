#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <random>

#include "dofforge/runtime.hpp"
#include "dofforge/verify.hpp"
#include "support/oracle.hpp"
#include "support/scenes.hpp"

using namespace dofforge;
using Catch::Matchers::WithinAbs;

namespace {

Term T(const std::string& s) { return parse_term(s); }

EvalContext context(const Scene& s, const GeomState& g) {
  EvalContext c;
  c.scene = &s;
  c.geom = &g;
  c.geom_sym = "$" + g.name;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_state(const GeomState& a, const GeomState& b) {
  return same_bits(a.center.x, b.center.x) && same_bits(a.center.y, b.center.y) && same_bits(a.radius, b.radius) &&
         same_bits(a.end1.x, b.end1.x) && same_bits(a.end1.y, b.end1.y) && same_bits(a.end2.x, b.end2.x) &&
         same_bits(a.end2.y, b.end2.y);
}

oracle::Line O(const Entity& e) { return oracle::line({e.point.x, e.point.y}, e.dir.dx(), e.dir.dy()); }

}  // namespace

TEST_CASE("expression evaluation") {
  Scene s;
  s.entities = {scenes::point("p", {0, 0}), scenes::line("X", {0, 0}, 0), scenes::line("Y1", {0, 1}, 0)};
  const auto c = GeomState::circle("c", {2, 3}, 1);
  const auto ctx = context(s, c);
  const Point2 v = eval_expr(T("(v- (>> $c center) $p)"), ctx).point();
  CHECK(v.x == 2);
  CHECK(v.y == 3);
  CHECK(eval_expr(T("(>> (v- (point 3 4) (point 0 0)) magnitude)"), ctx).scalar() == 5);
  CHECK(eval_expr(T("(0d-intersection $X $Y1)"), ctx).isect().tag == IntersectionResult::Tag::Empty);
  CHECK_THROWS_AS(eval_expr(T("(v- $nowhere (>> $c center))"), ctx), UnboundName);
  CHECK_THROWS_AS(eval_expr(T("(>> $X arbitrary-point)"), ctx), UnboundName);
}

TEST_CASE("the bisector term evaluates to the ray between the displaced lines") {
  const Scene s = scenes::two_lines({0, 0}, 0, 1, {8, 0}, -M_PI / 2, 1, {3, 5}, 1);
  const auto ctx = context(s, s.geoms[0]);
  const Locus1d b = eval_expr(T("(angular-bisector (make-displaced-line $L1 BIAS_LEFT 1) "
                                "(make-displaced-line $L2 BIAS_RIGHT 1) BIAS_COUNTERCLOCKWISE BIAS_CLOCKWISE)"),
                              ctx)
                        .locus();
  REQUIRE(b.kind == LocusKind::Ray);
  // y = 1 meets x = 7; the ray runs up and to the left between the lines
  CHECK_THAT(b.origin.x, WithinAbs(7, 1e-12));
  CHECK_THAT(b.origin.y, WithinAbs(1, 1e-12));
  CHECK(b.dir.dx() < 0);
  CHECK(b.dir.dy() > 0);
}

TEST_CASE("an empty body leaves the geom alone") {
  const Scene s = scenes::two_lines({0, 0}, 0, 1, {8, 0}, -M_PI / 2, 1, {3, 5}, 1);
  const auto r = execute_body({}, s, s.geoms[0]);
  CHECK(same_state(r.state, s.geoms[0]));
  CHECK(r.trace.events.empty());
  CHECK(r.trace.motion == 0);
}

TEST_CASE("a scene with no constraints is returned unchanged") {
  Scene s;
  s.geoms = {GeomState::circle("c", {1, 2}, 3)};
  const auto r = solve_scene(s, scenes::circle_library(), default_rule_base());
  CHECK(same_state(r.scene.geoms[0], s.geoms[0]));
  CHECK(r.traces.empty());
}

TEST_CASE("solving the two-line scene") {
  const Scene s = scenes::two_lines({0, 0}, 0, 1, {8, 0}, -M_PI / 2, 1, {3, 5}, 1);
  const auto r = solve_scene(s, scenes::circle_library(), default_rule_base());
  REQUIRE(r.traces.size() == 2);
  CHECK(r.traces[0].signature == "<Center-Free,Radius-Free, FixedPts-0,FixedLines-1>");
  CHECK(r.traces[1].signature == "<Center-L1,Radius-Free, FixedPts-0,FixedLines-1>");
  const auto& c = r.scene.geoms[0];
  const oracle::P center{c.center.x, c.center.y};
  CHECK(oracle::fdl_residual(center, c.radius, O(s.entities[0]), 1, +1) < 1e-9);
  CHECK(oracle::fdl_residual(center, c.radius, O(s.entities[1]), 1, -1) < 1e-9);
  CHECK(c.radius > 0);
  CHECK(r.scene.geoms[0].preserved.size() == 2);
}

TEST_CASE("re-executing with the recorded choices reproduces the state bit for bit") {
  std::mt19937 rng(29);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    const Scene s = scenes::random_two_lines(rng);
    SolveResult solved;
    try {
      solved = solve_scene(s, scenes::circle_library(), default_rule_base());
    } catch (const Diagnostic&) {
      continue;
    }
    // replay the second constraint from the state after the first
    Scene mid = s;
    mid.constraints.resize(1);
    const auto first = solve_scene(mid, scenes::circle_library(), default_rule_base());
    const GeomState& g = first.scene.geoms[0];
    std::vector<Term> all = g.preserved;
    all.push_back(s.constraints[1].invariant);
    const auto m = reformulate(GeomKind::Circle, all, default_rule_base());
    const auto* frag = scenes::circle_library().find(signature_of(GeomKind::Circle, m.invariants));
    REQUIRE(frag);
    const auto again = execute_plan(*frag, first.scene, g, m.invariants, {}, &solved.traces[1].choices);
    CHECK(same_state(again.state, solved.scene.geoms[0]));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("earlier constraints survive later ones") {
  std::mt19937 rng(31);
  for (int i = 0; i < 30; ++i) {
    const Scene s = scenes::random_two_lines(rng);
    try {
      const auto r = solve_scene(s, scenes::circle_library(), default_rule_base());
      const auto rep = verify_scene(r.scene, 1e-8);
      CHECK(rep.pass());
    } catch (const Diagnostic&) {
    }
  }
}

TEST_CASE("a missing fragment is reported by signature") {
  const Scene s = scenes::two_lines({0, 0}, 0, 1, {8, 0}, -M_PI / 2, 1, {3, 5}, 1);
  try {
    solve_scene(s, PlanLibrary{}, default_rule_base());
    FAIL("expected MissingPlanFragment");
  } catch (const MissingPlanFragment& e) {
    CHECK(to_string(e.signature) == "<Center-Free,Radius-Free, FixedPts-0,FixedLines-1>");
  }
}

TEST_CASE("over-constraining a geom is a diagnostic") {
  Scene s = scenes::two_lines({0, 0}, 0, 1, {8, 0}, -M_PI / 2, 1, {3, 5}, 1);
  s.entities.push_back(scenes::line("L3", {0, 9}, M_PI));
  s.constraints.push_back({"c", scenes::fdl("c", "L3", 1, "BIAS_COUNTERCLOCKWISE")});
  s.constraints.push_back({"c", T("(invariant-dimension $c 1)")});
  CHECK_THROWS_AS(solve_scene(s, scenes::circle_library(), default_rule_base()), Diagnostic);
}

// Every action rule, on random geoms: achieve actions establish the pattern
// (or fail loudly), preserve actions keep it.
namespace {

struct Grounder {
  std::mt19937& rng;
  const EvalContext& ctx;

  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Term pt() { return Term::app("point", {Term::num(uni(-6, 6)), Term::num(uni(-6, 6))}); }

  Term ground_arb(const Term& t) {
    if (!t.is_app()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(ground_arb(a));
    const Term g = Term::app(t.name(), args);
    if (g.is_app(">>") && g.arg(1).is_sym("arbitrary-point")) {
      const Locus1d l = eval_expr(g.arg(0), ctx).locus();
      const double s = l.kind == LocusKind::Circle ? uni(0, 2 * M_PI) : l.kind == LocusKind::Ray ? uni(0, 5) : uni(-5, 5);
      const Point2 p = l.point_at(s);
      return Term::app("point", {Term::num(p.x), Term::num(p.y)});
    }
    return g;
  }

  // Free variables by position: translate vector; pivot, amount; pivot, axis, angle.
  Term ground(const Term& action) {
    std::vector<Term> args;
    for (size_t i = 0; i < action.arity(); ++i) {
      const Term& a = action.arg(i);
      if (!a.is_var()) {
        args.push_back(ground_arb(a));
        continue;
      }
      if (action.is_app("translate")) args.push_back(pt());
      else if (action.is_app("scale")) args.push_back(i == 1 ? pt() : Term::num(uni(-0.4, 2)));
      else args.push_back(i == 1 ? pt() : i == 2 ? Term::sym("AXIS_Z") : Term::num(uni(-M_PI, M_PI)));
    }
    return Term::app(action.name(), args);
  }
};

GeomState random_geom(GeomKind k, std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-5, 5), len(0.5, 3);
  if (k == GeomKind::Circle) return GeomState::circle("g", {pos(rng), pos(rng)}, len(rng));
  const Point2 a{pos(rng), pos(rng)};
  const double t = pos(rng), l = len(rng);
  return GeomState::segment("g", a, {a.x + l * std::cos(t), a.y + l * std::sin(t)});
}

// A ground invariant matching the rule's pattern.
Term instance(const ActionRule& rule, std::mt19937& rng) {
  std::uniform_real_distribution<double> len(0.5, 2);
  Subst s;
  const Term& p = rule.pattern;
  const auto fill = [&](const Term& v, const Term& value) {
    if (v.is_var() && !s.count(v.name())) s[v.name()] = value;
  };
  fill(p.arg(0), Term::sym("$g"));
  if (p.is_app("invariant-point") || p.is_app("1d-constrained-point")) {
    const Term acc = p.arg(1);
    if (acc.is_app() && acc.arg(1).is_var()) fill(acc.arg(1), Term::sym("center"));
    fill(p.arg(2), p.is_app("invariant-point") ? Term::sym("$P")
                                               : (rng() % 2 ? Term::sym("$L") : T("(make-circle-locus $P 3)")));
  } else if (p.is_app("fixed-distance-point")) {
    fill(p.arg(1), Term::sym("$P"));
    fill(p.arg(2), Term::num(len(rng)));
    fill(p.arg(3), Term::sym(rng() % 2 ? "BIAS_OUTSIDE" : "BIAS_INSIDE"));
  } else if (p.is_app("fixed-distance-line")) {
    fill(p.arg(1), Term::sym("$L"));
    fill(p.arg(2), Term::num(len(rng)));
    fill(p.arg(3), Term::sym(rng() % 2 ? "BIAS_COUNTERCLOCKWISE" : "BIAS_CLOCKWISE"));
  } else if (p.is_app("invariant-direction")) {
    fill(p.arg(1), T("(vec 0.6 0.8)"));
  } else if (p.is_app("invariant-dimension")) {
    fill(p.arg(1), Term::num(len(rng) + 0.5));
  } else {
    for (const auto& v : vars_of(p)) fill(Term::var(v), Term::sym("$P"));
  }
  return substitute(s, p);
}

double residual(const Scene& base, const GeomState& g, const Term& inv) {
  Scene s = base;
  s.geoms = {g};
  s.constraints = {{"g", inv}};
  const auto rep = verify_scene(s, 1e-9);
  REQUIRE(rep.rows.size() == 1);
  INFO(rep.rows[0].error);
  REQUIRE(rep.rows[0].error.empty());
  return rep.rows[0].residual;
}

}  // namespace

TEST_CASE("action rules achieve and preserve their invariants") {
  std::mt19937 rng(37);
  Scene base;
  base.entities = {scenes::point("P", {1, -2}), scenes::line("L", {-1, 1}, 0.3)};
  const RuleBase& rb = default_rule_base();
  for (const auto& rule : rb.actions) {
    if (!rule.kind || rule.pattern.is_app("2d-constrained-point")) continue;
    const GeomKind k = *rule.kind;
    int achieved = 0, preserved = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const Term inv = instance(rule, rng);
      int fresh = 0;
      const auto acts = actions_for(inv, k, rb, fresh);
      GeomState g = random_geom(k, rng);
      const auto ctx0 = context(base, g);
      // reach the invariant with one of this rule's own achieve actions
      // nothing to achieve: the invariant is implied for this kind
      bool holds = rule.achieve.empty();
      for (const auto& a0 : rule.achieve) {
        Subst s;
        REQUIRE(match(rule.pattern, inv, s));
        Grounder gr{rng, ctx0};
        try {
          const Term a = gr.ground(substitute(s, a0));
          const auto r = execute_body({Step::apply(a)}, base, g);
          INFO(rule.name << " " << a.str());
          CHECK(residual(base, r.state, inv) < 1e-8);
          ++achieved;
          g = r.state;
          holds = true;
          break;
        } catch (const Diagnostic&) {
        } catch (const NonPositiveDimension&) {
        } catch (const GeometryError&) {
        }
      }
      if (!holds) continue;
      const auto ctx = context(base, g);
      for (const auto& p : acts.preserve) {
        Grounder gr{rng, ctx};
        Term a;
        try {
          a = gr.ground(p);
          const auto r = execute_body({Step::apply(a)}, base, g);
          INFO(rule.name << " " << a.str());
          CHECK(residual(base, r.state, inv) < 1e-8);
          ++preserved;
        } catch (const NonPositiveDimension&) {
        }
      }
    }
    INFO(rule.name);
    if (!rule.achieve.empty()) CHECK(achieved > 10);
    if (!rule.preserve.empty()) CHECK(preserved > 10);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dofforge/phase2.hpp"
#include "dofforge/runtime.hpp"

using namespace dofforge;

namespace {

Term T(const std::string& s) { return parse_term(s); }

const std::string kBis =
    "(angular-bisector (make-displaced-line $L1 BIAS_LEFT $dist1) (make-displaced-line $L2 BIAS_RIGHT $dist2) "
    "BIAS_COUNTERCLOCKWISE BIAS_CLOCKWISE)";

PlanSpec two_lines() {
  PlanSpec s;
  s.geom = "$c";
  s.preserved = {T("(fixed-distance-line $c $L1 $dist1 BIAS_COUNTERCLOCKWISE)")};
  s.tba = {T("(fixed-distance-line $c $L2 $dist2 BIAS_CLOCKWISE)")};
  return s;
}

std::vector<Term> reduce(const std::vector<Term>& steps) {
  return eliminate_redundant(steps, GeomKind::Circle, "$c", two_lines().preserved, default_rule_base());
}

}  // namespace

TEST_CASE("redundancy elimination on the two-line plans") {
  const auto r = synthesize_skeletal(two_lines(), default_rule_base());
  REQUIRE(r.plans.size() == 4);
  const auto p1 = reduce(r.plans[0].steps);
  CHECK(p1 == r.plans[0].steps);                 // single action: unchanged
  CHECK(reduce(r.plans[1].steps) == p1);         // translate then translate collapses
  CHECK(reduce(r.plans[2].steps).size() == 2);   // translate then scale is kept
  CHECK(reduce(r.plans[3].steps) == p1);         // locus move then intersection
}

TEST_CASE("redundancy elimination is idempotent") {
  for (auto k : {GeomKind::Circle, GeomKind::LineSegment}) {
    for (const auto& sig : derive_signature_scheme(k, default_rule_base()).canonical) {
      const auto out = synthesize_fragment(sig, default_rule_base());
      for (const auto& plan : out.ranked) {
        CHECK(eliminate_redundant(plan, k, "$g", {}, default_rule_base()) == plan);
      }
    }
  }
}

TEST_CASE("scale followed by an absolute scale drops the first") {
  const std::vector<Term> steps{T("(scale $c (>> $c center) 3)"),
                                T("(scale $c (>> $c center) (minus 2 (>> $c radius)))")};
  const auto out = eliminate_redundant(steps, GeomKind::Circle, "$c", {}, default_rule_base());
  REQUIRE(out.size() == 1);
  CHECK(out[0] == steps[1]);
}

TEST_CASE("a translate reading the position keeps the earlier translate") {
  const std::vector<Term> steps{T("(translate $c (v- $P (>> $c center)))"),
                                T("(translate $c (v- (>> (make-line-locus (>> $c center) (>> $L1 direction)) "
                                  "arbitrary-point) (>> $c center)))")};
  CHECK(eliminate_redundant(steps, GeomKind::Circle, "$c", {}, default_rule_base()).size() == 2);
}

TEST_CASE("plan weights") {
  const std::vector<Term> ts{T("(translate $c (v- (>> " + kBis + " arbitrary-point) (>> $c center)))"),
                             T("(scale $c (>> $c center) 1)")};
  CHECK(free_param_count(ts) == 1);
  CHECK(plan_weight(ts) == PlanWeight{2, 1, 0, -2});
  CHECK(free_param_count({T("(scale $c (>> $c center) ?a)"), T("(translate $c ?v)")}) == 2);
  CHECK(free_param_count({T("(scale $c (>> $c center) ?a)"), T("(scale $c (>> $c center) ?a)")}) == 1);
  const std::vector<Term> meet{T("(translate $c (v- (0d-intersection $a $b) (>> $c center)))")};
  CHECK(plan_weight(meet) == PlanWeight{1, 0, -1, -1});
}

TEST_CASE("translate then scale is preferred for the two-line case") {
  const auto rep = synthesize_spec(two_lines(), default_rule_base());
  REQUIRE(rep.reduced.size() == 2);
  REQUIRE(rep.reduced[0].size() == 2);
  CHECK(rep.reduced[0][0].is_app("translate"));
  CHECK(rep.reduced[0][1].is_app("scale"));
  REQUIRE(rep.reduced[1].size() == 1);
  CHECK(rep.reduced[1][0].str().find("0d-intersection") != std::string::npos);
}

TEST_CASE("subsumption") {
  const std::vector<Term> general{T("(translate $c ?v)"), T("(scale $c (>> $c center) ?a)")};
  const std::vector<Term> specific{T("(translate $c (v- $P (>> $c center)))"), T("(scale $c (>> $c center) 2)")};
  CHECK(subsumes(general, specific, default_rule_base()));
  CHECK_FALSE(subsumes(specific, general, default_rule_base()));
  const auto order = prioritize({specific, general}, default_rule_base());
  REQUIRE(order.size() == 2);
  CHECK(order[0] == general);
  CHECK(prioritize({specific}, default_rule_base()) == std::vector<std::vector<Term>>{specific});
}

TEST_CASE("prioritize orders each layer by weight") {
  std::mt19937 rng(23);
  const std::vector<std::vector<Term>> pool{
      {T("(translate $c (v- $P (>> $c center)))")},
      {T("(scale $c (>> $c center) 1)")},
      {T("(translate $c (v- (>> $l arbitrary-point) (>> $c center)))"), T("(scale $c (>> $c center) 1)")},
      {T("(translate $c (v- (0d-intersection $a $b) (>> $c center)))")},
      {T("(rotate $c (>> $c center) AXIS_Z 1)"), T("(scale $c (>> $c center) 2)")}};
  for (int i = 0; i < 20; ++i) {
    auto plans = pool;
    std::shuffle(plans.begin(), plans.end(), rng);
    const auto out = prioritize(plans, default_rule_base());
    CHECK(out.size() == pool.size());
    CHECK(out == prioritize(pool, default_rule_base()));
    // peel off layers of plans nothing else subsumes; weights descend inside each
    std::vector<std::vector<Term>> left = out;
    size_t pos = 0;
    while (!left.empty()) {
      std::vector<std::vector<Term>> layer, rest;
      for (const auto& b : left) {
        bool dominated = false;
        for (const auto& a : left) dominated = dominated || (&a != &b && subsumes(a, b, default_rule_base()));
        (dominated ? rest : layer).push_back(b);
      }
      if (layer.empty()) break;
      for (size_t k = 0; k < layer.size(); ++k, ++pos) {
        CHECK(std::find(layer.begin(), layer.end(), out[pos]) != layer.end());
        if (k + 1 < layer.size()) CHECK(plan_weight(out[pos]) >= plan_weight(out[pos + 1]));
      }
      left = rest;
    }
  }
}

TEST_CASE("elaboration") {
  const auto rep = synthesize_spec(two_lines(), default_rule_base());
  REQUIRE(rep.bodies.size() == 2);
  const auto& preferred = rep.bodies[0];
  REQUIRE(preferred.size() == 1);
  CHECK(preferred[0].kind == Step::Kind::ForMin);
  CHECK(preferred[0].domain == Step::Domain::Points);
  REQUIRE(preferred[0].body.size() == 2);
  CHECK(preferred[0].body[1].kind == Step::Kind::Apply);
  CHECK(preferred[0].body[1].expr.is_app("scale"));

  const auto& single = rep.bodies[1];
  REQUIRE(single.size() == 2);
  CHECK(single[0].kind == Step::Kind::Bind);
  CHECK(single[1].kind == Step::Kind::Case);
  REQUIRE(single[1].empty.size() == 1);
  CHECK(single[1].empty[0].kind == Step::Kind::Abort);
  CHECK(single[1].empty[0].message.find("loci do not intersect") == 0);

  for (const auto& b : rep.bodies) CHECK(unbound_locals(b).empty());
  CHECK(pretty(preferred).find("minimizing motion") != std::string::npos);
}

TEST_CASE("ground plans elaborate to a plain list") {
  const std::vector<Term> steps{T("(translate $c (v- $P (>> $c center)))"), T("(scale $c (>> $c center) 1)")};
  const auto body = elaborate(steps);
  REQUIRE(body.size() == 2);
  for (const auto& s : body) CHECK(s.kind == Step::Kind::Apply);
}

TEST_CASE("free amounts and angles get their own domains") {
  const auto body = elaborate({T("(scale $c (>> $c center) ?a)")});
  REQUIRE(body.size() == 1);
  CHECK(body[0].domain == Step::Domain::Amount);
  const auto rot = elaborate({T("(rotate $s (>> $s end1) AXIS_Z ?t)")});
  REQUIRE(rot.size() == 1);
  CHECK(rot[0].domain == Step::Domain::Angle);
  CHECK(unbound_locals(body).empty());
  CHECK(unbound_locals({Step::apply(T("(translate $c ?v)"))}) == std::vector<std::string>{"v"});
}

TEST_CASE("library bodies are closed") {
  for (auto k : {GeomKind::Circle, GeomKind::LineSegment}) {
    const auto lib = synthesize_library({k}, default_rule_base());
    for (const auto& f : lib.library.fragments) CHECK(unbound_locals(f.body).empty());
  }
}

TEST_CASE("least motion search") {
  SECTION("one dimension finds the grid point") {
    const auto best = least_motion_search({11}, [](const std::vector<size_t>& i) {
      const double t = static_cast<double>(i[0]) - 7;
      return t * t;
    });
    CHECK(best == std::vector<size_t>{7});
  }
  SECTION("separable objective in one pass") {
    int calls = 0;
    const auto best = least_motion_search(
        {10, 10},
        [&](const std::vector<size_t>& i) {
          ++calls;
          return std::abs(static_cast<double>(i[0]) - 3) + std::abs(static_cast<double>(i[1]) - 8);
        },
        1);
    CHECK(best == std::vector<size_t>{3, 8});
    CHECK(calls <= 1 + 9 + 9);
  }
  SECTION("ties keep the earlier candidate") {
    CHECK(least_motion_search({5}, [](const std::vector<size_t>&) { return 1.0; }) == std::vector<size_t>{0});
  }
}

TEST_CASE("total motion") {
  const MotionSpec m = MotionSpec::standard();
  const auto c0 = GeomState::circle("c", {0, 0}, 1);
  const auto t = GroundAction::translate({3, 4});
  const auto c1 = apply_action(c0, t);
  CHECK(total_motion({}, m) == 0);
  CHECK(total_motion({{c0, t, c1}}, m) == Catch::Approx(25));
  const auto s = GroundAction::scale(c1.center, 2);
  const auto c2 = apply_action(c1, s);
  CHECK(total_motion({{c0, t, c1}, {c1, s, c2}}, m) == Catch::Approx(29));
}

#include <catch2/catch_amalgamated.hpp>

#include "dofforge/planner.hpp"

using namespace dofforge;

namespace {

Term T(const std::string& s) { return parse_term(s); }

const std::string kBis =
    "(angular-bisector (make-displaced-line $L1 BIAS_LEFT $dist1) (make-displaced-line $L2 BIAS_RIGHT $dist2) "
    "BIAS_COUNTERCLOCKWISE BIAS_CLOCKWISE)";
const std::string kLineLocus = "(make-line-locus (>> $c center) (>> $L1 direction))";

PlanSpec two_lines() {
  PlanSpec s;
  s.kind = GeomKind::Circle;
  s.geom = "$c";
  s.preserved = {T("(fixed-distance-line $c $L1 $dist1 BIAS_COUNTERCLOCKWISE)")};
  s.tba = {T("(fixed-distance-line $c $L2 $dist2 BIAS_CLOCKWISE)")};
  return s;
}

std::vector<std::string> texts(const SkeletalPlan& p) {
  std::vector<std::string> out;
  for (const auto& t : p.steps) out.push_back(t.str());
  return out;
}

}  // namespace

TEST_CASE("the two-line specification yields exactly four skeletal plans") {
  const auto r = synthesize_skeletal(two_lines(), default_rule_base());
  REQUIRE(r.plans.size() == 4);
  const std::string inter = "(0d-intersection " + kBis + " " + kLineLocus + ")";
  const std::string arb = "(translate $c (v- (>> " + kBis + " arbitrary-point) (>> $c center)))";

  CHECK(texts(r.plans[0]) == std::vector<std::string>{"(translate $c (v- " + inter + " (>> $c center)))"});
  CHECK(texts(r.plans[1]) ==
        std::vector<std::string>{arb, "(translate $c (v- (0d-intersection " + kBis +
                                          " (make-displaced-line $L1 BIAS_COUNTERCLOCKWISE (plus $dist1 (>> $c "
                                          "radius)))) (>> $c center)))"});
  CHECK(texts(r.plans[2]) ==
        std::vector<std::string>{arb, "(scale $c (>> $c center) (minus (minus (line-distance $L1 (>> $c center) "
                                      "BIAS_COUNTERCLOCKWISE) $dist1) (>> $c radius)))"});
  CHECK(texts(r.plans[3]) ==
        std::vector<std::string>{"(translate $c (v- (>> " + kLineLocus + " arbitrary-point) (>> $c center)))",
                                 "(translate $c (v- " + inter + " (>> $c center)))"});
}

TEST_CASE("the root reformulates the combined invariants") {
  const auto r = synthesize_skeletal(two_lines(), default_rule_base());
  REQUIRE(r.root_preserved.size() == 1);
  CHECK(r.root_preserved[0].is_app("fixed-distance-line"));
  REQUIRE(r.root_tba.size() == 1);
  CHECK(r.root_tba[0].is_app("1d-constrained-point"));
  CHECK(r.nodes.size() == 10);
  CHECK(r.nodes[0].move == Move::Root);
  CHECK(r.nodes[0].status == NodeStatus::Open);
}

TEST_CASE("combined children come from geometric matching of preserve and achieve") {
  const auto r = synthesize_skeletal(two_lines(), default_rule_base());
  bool found = false;
  for (const auto& n : r.nodes) {
    if (n.move != Move::Combined) continue;
    found = true;
    // a translate onto both loci, or a scale that keeps the center fixed
    const bool meet = n.action.str().find("0d-intersection") != std::string::npos;
    CHECK((meet || n.action.is_app("scale")));
    CHECK(n.status == NodeStatus::Solution);
  }
  CHECK(found);
}

TEST_CASE("an achieve that clobbers the prior invariant still terminates") {
  const auto r = synthesize_skeletal(two_lines(), default_rule_base());
  for (const auto& n : r.nodes) {
    if (n.status == NodeStatus::Solution) CHECK(n.tba.empty());
    if (n.move == Move::Achieve && !n.clobbered.empty()) CHECK(n.any_clobbered);
  }
}

TEST_CASE("dimension only") {
  PlanSpec s;
  s.geom = "$c";
  s.tba = {T("(invariant-dimension $c 2)")};
  const auto r = synthesize_skeletal(s, default_rule_base());
  REQUIRE_FALSE(r.plans.empty());
  REQUIRE(r.plans[0].steps.size() == 1);
  CHECK(r.plans[0].steps[0].str() == "(scale $c (>> $c center) (minus 2 (>> $c radius)))");
}

TEST_CASE("nothing to achieve gives the empty plan") {
  PlanSpec s;
  s.geom = "$c";
  s.preserved = {T("(invariant-dimension $c 2)")};
  const auto r = synthesize_skeletal(s, default_rule_base());
  REQUIRE(r.plans.size() == 1);
  CHECK(r.plans[0].steps.empty());
}

TEST_CASE("depth zero runs out") {
  SearchConfig cfg;
  cfg.max_depth = 0;
  CHECK_THROWS_AS(synthesize_skeletal(two_lines(), default_rule_base(), cfg), DepthExceeded);
}

TEST_CASE("without RR-1 only translations onto line pairs remain") {
  const RuleBase r = default_rule_base().without("RR-1");
  SearchConfig cfg;
  cfg.max_depth = 4;
  const auto res = synthesize_skeletal(two_lines(), r, cfg);
  REQUIRE_FALSE(res.plans.empty());
  for (const auto& p : res.plans) {
    CHECK(p.steps.back().is_app("translate"));
    CHECK(p.steps.back().str().find("0d-intersection") != std::string::npos);
  }
}

TEST_CASE("explain lists every node") {
  const auto r = synthesize_skeletal(two_lines(), default_rule_base());
  const std::string e = explain(r);
  CHECK(e.find("RR-1") != std::string::npos);
  for (const auto& p : r.plans) CHECK(e.find(p.steps.back().str()) != std::string::npos);
}

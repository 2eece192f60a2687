#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dofforge/reformulate.hpp"
#include "dofforge/rules.hpp"

using namespace dofforge;

namespace {

Term T(const char* s) { return parse_term(s); }

const RuleBase& rb() { return default_rule_base(); }

int count_kind(const RuleBase& r, GeomKind k) {
  int n = 0;
  for (const auto& a : r.actions) n += a.kind == k;
  return n;
}

const char* kBisector =
    "(angular-bisector (make-displaced-line $L1 BIAS_LEFT $d1) (make-displaced-line $L2 BIAS_RIGHT $d2) "
    "BIAS_COUNTERCLOCKWISE BIAS_CLOCKWISE)";

}  // namespace

TEST_CASE("default rule base parses with the expected families") {
  CHECK(count_kind(rb(), GeomKind::Circle) == 8);
  CHECK(count_kind(rb(), GeomKind::LineSegment) == 12);
  CHECK(rb().matches.size() == 5);
  CHECK_FALSE(rb().reforms.empty());
  CHECK(rb().hash().size() == 16);
  CHECK(parse_rule_base(default_rule_text()).hash() == rb().hash());
}

TEST_CASE("rule base errors report a position") {
  CHECK_THROWS_AS(parse_rule_base("ACTION-RULES\n(rule broken circle (pattern (bogus-head ?c)))"), ParseError);
  CHECK_THROWS_AS(parse_rule_base("ACTION-RULES\n(rule x circle (pattern"), ParseError);
  CHECK_THROWS_AS(parse_rule_base("NOT-A-SECTION\n"), ParseError);
}

TEST_CASE("without drops a rule and its family") {
  const RuleBase r = rb().without("RR-1");
  CHECK(r.reforms.size() + 2 == rb().reforms.size());
  for (const auto& f : r.reforms) CHECK(f.name.rfind("RR-1", 0) != 0);
  CHECK(rb().without("no-such-rule").reforms.size() == rb().reforms.size());
}

TEST_CASE("actions_for picks the matching rules") {
  int fresh = 0;
  const auto a = actions_for(T("(1d-constrained-point $c (>> $c center) $l)"), GeomKind::Circle, rb(), fresh);
  CHECK(a.preserve.size() == 2);
  CHECK(a.achieve.size() == 1);

  const auto f = actions_for(T("(fixed-distance-line $c $L1 $d1 BIAS_COUNTERCLOCKWISE)"), GeomKind::Circle, rb(), fresh);
  REQUIRE(f.preserve.size() == 1);
  CHECK(f.preserve[0].str() ==
        "(translate $c (v- (>> (make-line-locus (>> $c center) (>> $L1 direction)) arbitrary-point) (>> $c center)))");
  REQUIRE(f.achieve.size() == 2);
  CHECK(f.achieve[0].str() ==
        "(translate $c (v- (>> (make-displaced-line $L1 BIAS_COUNTERCLOCKWISE (plus $d1 (>> $c radius))) "
        "arbitrary-point) (>> $c center)))");

  // rule-local variables come back renamed apart
  const auto d = actions_for(T("(invariant-dimension $c 2)"), GeomKind::Circle, rb(), fresh);
  REQUIRE(d.preserve.size() == 1);
  const auto d2 = actions_for(T("(invariant-dimension $c 2)"), GeomKind::Circle, rb(), fresh);
  CHECK(d.preserve[0] != d2.preserve[0]);
}

TEST_CASE("plain unification fails on rotations about different points") {
  Subst s;
  CHECK_FALSE(unify(T("(rotate $g $pt1 ?vec1 ?amt1)"), T("(rotate $g $pt2 ?vec2 ?amt2)"), s));
}

TEST_CASE("geometric matching of two rotations gives the axis through both points") {
  const auto m = geo_match(T("(rotate $g $pt1 ?vec1 ?amt1)"), T("(rotate $g $pt2 ?vec2 ?amt2)"), rb().matches);
  REQUIRE(m);
  CHECK(m->term.str() == "(rotate $g $pt1 (v- $pt2 $pt1) ?amt1)");
}

TEST_CASE("geometric matching of two locus points gives their intersection") {
  const auto m = geo_match(T("(v- (>> $locus1 arbitrary-point) $to)"), T("(v- (>> $locus2 arbitrary-point) $to)"),
                           rb().matches);
  REQUIRE(m);
  CHECK(m->term.str() == "(v- (0d-intersection $locus1 $locus2) $to)");
}

TEST_CASE("geometric matching reaches inside actions") {
  const auto m = geo_match(T("(translate $c (v- (>> $a arbitrary-point) (>> $c center)))"),
                           T("(translate $c (v- (>> $b arbitrary-point) (>> $c center)))"), rb().matches);
  REQUIRE(m);
  CHECK(m->term.str() == "(translate $c (v- (0d-intersection $a $b) (>> $c center)))");
}

TEST_CASE("identical ground terms match to themselves") {
  const Term t = T(kBisector);
  const auto m = geo_match(t, t, rb().matches);
  REQUIRE(m);
  CHECK(m->term == t);
  CHECK_FALSE(geo_match(T("(plus 1 2)"), T("(plus 1 3)"), rb().matches));
}

TEST_CASE("instance_of") {
  CHECK(instance_of(T("(0d-intersection $a $b)"), T("(>> $a arbitrary-point)"), rb().matches));
  CHECK(instance_of(T("(scale $c (>> $c center) 2)"), T("(scale $c (>> $c center) ?x)"), rb().matches));
  CHECK_FALSE(instance_of(T("(scale $c (>> $c center) ?x)"), T("(scale $c (>> $c center) 2)"), rb().matches));
}

TEST_CASE("0d-intersection arguments are put in a canonical order") {
  CHECK(canonical_term(T("(0d-intersection $b $a)")) == canonical_term(T("(0d-intersection $a $b)")));
}

TEST_CASE("RR-1 rewrites the tangency pair to a bisector locus") {
  const std::vector<Term> in{T("(fixed-distance-line $c $L1 $d1 BIAS_COUNTERCLOCKWISE)"),
                             T("(fixed-distance-line $c $L2 $d2 BIAS_CLOCKWISE)")};
  const auto r = reformulate(GeomKind::Circle, in, rb());
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].rule == "RR-1");
  REQUIRE(r.invariants.size() == 2);
  const Term locus = T((std::string("(1d-constrained-point $c (>> $c center) ") + kBisector + ")").c_str());
  CHECK(std::find(r.invariants.begin(), r.invariants.end(), locus) != r.invariants.end());
  CHECK(std::find(r.invariants.begin(), r.invariants.end(), in[0]) != r.invariants.end());
  CHECK(to_string(signature_of(GeomKind::Circle, r.invariants)) == "<Center-L1,Radius-Free, FixedPts-0,FixedLines-1>");
}

TEST_CASE("reformulation edge cases") {
  CHECK(reformulate(GeomKind::Circle, {}, rb()).invariants.empty());
  CHECK(reformulate(GeomKind::Circle, {}, rb()).trace.empty());
  const std::vector<Term> one{T("(fixed-distance-line $c $L1 1 BIAS_CLOCKWISE)")};
  const auto r = reformulate(GeomKind::Circle, one, rb());
  CHECK(r.invariants == one);
  CHECK(r.trace.empty());
  // rewriting a canonical form changes nothing
  const std::vector<Term> two{T("(fixed-distance-line $c $L1 $d1 BIAS_COUNTERCLOCKWISE)"),
                              T("(fixed-distance-line $c $L2 $d2 BIAS_CLOCKWISE)")};
  const auto once = reformulate(GeomKind::Circle, two, rb());
  CHECK(reformulate(GeomKind::Circle, once.invariants, rb()).invariants == once.invariants);
}

TEST_CASE("every reformulation step lowers the complexity") {
  for (auto k : {GeomKind::Circle, GeomKind::LineSegment}) {
    for (const auto& e : derive_signature_scheme(k, rb()).entries) {
      if (e.over_constrained) continue;
      const auto start = representative(e.raw, "$g", false);
      const auto r = reformulate(k, start, rb());
      std::vector<Term> cur = start;
      Complexity last = complexity(k, cur);
      for (const auto& st : r.trace) {
        for (const auto& t : st.removed) cur.erase(std::find(cur.begin(), cur.end(), t));
        cur.insert(cur.end(), st.added.begin(), st.added.end());
        const Complexity now = complexity(k, cur);
        CHECK(now < last);
        last = now;
      }
    }
  }
}

TEST_CASE("signature schemes") {
  const auto circle = derive_signature_scheme(GeomKind::Circle, rb());
  CHECK(circle.entries.size() == 54);
  REQUIRE(circle.canonical.size() == 10);
  const std::vector<std::string> expected{
      "<Center-Free,Radius-Free, FixedPts-0,FixedLines-0>", "<Center-Free,Radius-Free, FixedPts-0,FixedLines-1>",
      "<Center-Free,Radius-Free, FixedPts-1,FixedLines-0>", "<Center-Free,Radius-Fixed, FixedPts-0,FixedLines-0>",
      "<Center-L1,Radius-Free, FixedPts-0,FixedLines-0>",   "<Center-L1,Radius-Free, FixedPts-0,FixedLines-1>",
      "<Center-L1,Radius-Free, FixedPts-1,FixedLines-0>",   "<Center-L1,Radius-Fixed, FixedPts-0,FixedLines-0>",
      "<Center-Fixed,Radius-Free, FixedPts-0,FixedLines-0>", "<Center-Fixed,Radius-Fixed, FixedPts-0,FixedLines-0>"};
  std::vector<std::string> got;
  for (const auto& s : circle.canonical) got.push_back(to_string(s));
  std::sort(got.begin(), got.end());
  auto want = expected;
  std::sort(want.begin(), want.end());
  CHECK(got == want);

  const auto seg = derive_signature_scheme(GeomKind::LineSegment, rb());
  CHECK(seg.entries.size() == 108);
  CHECK(seg.canonical.size() == 19);
}

TEST_CASE("with no reform rules the scheme keeps every admissible raw signature") {
  RuleBase bare = rb();
  bare.reforms.clear();
  const auto s = derive_signature_scheme(GeomKind::Circle, bare);
  int admissible = 0;
  for (const auto& e : s.entries) {
    if (e.over_constrained) continue;
    ++admissible;
    CHECK(e.canonical == e.raw);
  }
  CHECK(static_cast<int>(s.canonical.size()) == admissible);
}

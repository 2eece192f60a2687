#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dofforge/geometry.hpp"
#include "support/oracle.hpp"

using namespace dofforge;
using Catch::Matchers::WithinAbs;

namespace {

Locus1d L(double x, double y, double dx, double dy) { return make_line_locus({x, y}, Direction2::from(dx, dy)); }

oracle::Line O(const Locus1d& l) { return oracle::line({l.origin.x, l.origin.y}, l.dir.dx(), l.dir.dy()); }

}  // namespace

TEST_CASE("direction normalizes and rejects zero") {
  const auto d = Direction2::from(3, 4);
  CHECK_THAT(d.dx(), WithinAbs(0.6, 1e-15));
  CHECK_THAT(d.dy(), WithinAbs(0.8, 1e-15));
  CHECK_THROWS_AS(Direction2::from(0, 0), GeometryError);
  CHECK_THAT(angle_between(Direction2::from(1, 0), Direction2::from(0, 1)), WithinAbs(M_PI / 2, 1e-15));
  CHECK_THAT(angle_between(Direction2::from(0, 1), Direction2::from(1, 0)), WithinAbs(-M_PI / 2, 1e-15));
}

TEST_CASE("signed distance is positive on the left") {
  const auto x = L(0, 0, 1, 0);
  CHECK(signed_distance(x, {5, 2}) == 2.0);
  CHECK(signed_distance(x, {-1, -3}) == -3.0);
  const auto up = make_displaced_line(x, Side::Left, 1.5);
  CHECK_THAT(signed_distance(up, {0, 1.5}), WithinAbs(0, 1e-15));
  const auto down = make_displaced_line(x, Side::Right, 1.5);
  CHECK_THAT(signed_distance(x, down.origin), WithinAbs(-1.5, 1e-15));
}

TEST_CASE("line-line intersection") {
  SECTION("crossing") {
    const auto r = intersect_0d(L(0, 0, 1, 0), L(2, -1, 0, 1));
    REQUIRE(r.tag == IntersectionResult::Tag::Points);
    REQUIRE(r.points.size() == 1);
    CHECK_THAT(r.points[0].x, WithinAbs(2, 1e-12));
    CHECK_THAT(r.points[0].y, WithinAbs(0, 1e-12));
  }
  SECTION("parallel distinct is empty") {
    CHECK(intersect_0d(L(0, 0, 1, 0), L(0, 1, 1, 0)).tag == IntersectionResult::Tag::Empty);
  }
  SECTION("coincident returns one of the loci") {
    const auto a = L(0, 0, 1, 1), b = L(3, 3, -1, -1);
    const auto r = intersect_0d(a, b);
    REQUIRE(r.tag == IntersectionResult::Tag::Coincident);
    CHECK_THAT(locus_residual(r.locus, {7, 7}), WithinAbs(0, 1e-12));
  }
}

TEST_CASE("circle intersections") {
  SECTION("line through circle, two points") {
    const auto r = intersect_0d(L(-5, 0, 1, 0), make_circle_locus({0, 0}, 2));
    REQUIRE(r.tag == IntersectionResult::Tag::Points);
    CHECK(r.points.size() == 2);
  }
  SECTION("tangent line, one point") {
    const auto r = intersect_0d(L(-5, 2, 1, 0), make_circle_locus({0, 0}, 2));
    REQUIRE(r.tag == IntersectionResult::Tag::Points);
    REQUIRE(r.points.size() == 1);
    CHECK_THAT(r.points[0].x, WithinAbs(0, 1e-9));
    CHECK_THAT(r.points[0].y, WithinAbs(2, 1e-9));
  }
  SECTION("miss") { CHECK(intersect_0d(L(-5, 3, 1, 0), make_circle_locus({0, 0}, 2)).tag == IntersectionResult::Tag::Empty); }
  SECTION("same circle is coincident") {
    const auto c = make_circle_locus({1, 1}, 2);
    CHECK(intersect_0d(c, c).tag == IntersectionResult::Tag::Coincident);
  }
  SECTION("concentric distinct is empty") {
    CHECK(intersect_0d(make_circle_locus({0, 0}, 1), make_circle_locus({0, 0}, 2)).tag ==
          IntersectionResult::Tag::Empty);
  }
  SECTION("ray keeps only forward points") {
    const auto ray = make_ray_locus({0, 0}, Direction2::from(1, 0));
    const auto r = intersect_0d(ray, make_circle_locus({0, 0}, 1));
    REQUIRE(r.tag == IntersectionResult::Tag::Points);
    REQUIRE(r.points.size() == 1);
    CHECK_THAT(r.points[0].x, WithinAbs(1, 1e-12));
  }
}

TEST_CASE("intersections agree with the closed-form oracle on random inputs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-10, 10), ang(0, 2 * M_PI), rad(0.5, 6);
  for (int i = 0; i < 500; ++i) {
    const double a1 = ang(rng), a2 = ang(rng);
    const auto l1 = L(u(rng), u(rng), std::cos(a1), std::sin(a1));
    const auto l2 = L(u(rng), u(rng), std::cos(a2), std::sin(a2));
    const auto want = oracle::meet(O(l1), O(l2));
    const auto got = intersect_0d(l1, l2);
    if (std::abs(std::sin(a1 - a2)) < 1e-3) continue;  // near-parallel: tolerance territory
    REQUIRE(want);
    REQUIRE(got.tag == IntersectionResult::Tag::Points);
    CHECK(oracle::dist({got.points[0].x, got.points[0].y}, *want) < 1e-7);

    const Point2 c{u(rng), u(rng)};
    const double r = rad(rng);
    const auto lc = intersect_0d(l1, make_circle_locus(c, r));
    const auto wc = oracle::line_circle(O(l1), {c.x, c.y}, r);
    if (wc.size() == 2 && oracle::dist(wc[0], wc[1]) > 1e-3) {
      REQUIRE(lc.tag == IntersectionResult::Tag::Points);
      REQUIRE(lc.points.size() == 2);
      for (const auto& p : lc.points) {
        CHECK(std::min(oracle::dist({p.x, p.y}, wc[0]), oracle::dist({p.x, p.y}, wc[1])) < 1e-7);
      }
    }
    if (wc.empty()) CHECK(lc.tag == IntersectionResult::Tag::Empty);

    const Point2 c2{u(rng), u(rng)};
    const double r2 = rad(rng);
    const auto cc = intersect_0d(make_circle_locus(c, r), make_circle_locus(c2, r2));
    const auto wcc = oracle::circle_circle({c.x, c.y}, r, {c2.x, c2.y}, r2);
    if (wcc.size() == 2 && oracle::dist(wcc[0], wcc[1]) > 1e-3) {
      REQUIRE(cc.tag == IntersectionResult::Tag::Points);
      for (const auto& p : cc.points) {
        CHECK(std::min(oracle::dist({p.x, p.y}, wcc[0]), oracle::dist({p.x, p.y}, wcc[1])) < 1e-7);
      }
    }
  }
}

TEST_CASE("angular bisector of the axes") {
  // x-axis and y-axis, counterclockwise side of the first, clockwise of the second
  const auto b = angular_bisector(L(0, 0, 1, 0), L(0, 0, 0, 1), +1, -1);
  REQUIRE(b.kind == LocusKind::Ray);
  CHECK_THAT(b.dir.dx(), WithinAbs(std::sqrt(0.5), 1e-12));
  CHECK_THAT(b.dir.dy(), WithinAbs(std::sqrt(0.5), 1e-12));
}

TEST_CASE("angular bisector points are equidistant on the biased sides") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-10, 10), ang(0, 2 * M_PI), t(0, 20);
  for (int i = 0; i < 300; ++i) {
    const double a1 = ang(rng), a2 = ang(rng);
    if (std::abs(std::sin(a1 - a2)) < 0.05) continue;
    const auto l1 = L(u(rng), u(rng), std::cos(a1), std::sin(a1));
    const auto l2 = L(u(rng), u(rng), std::cos(a2), std::sin(a2));
    const int s1 = i % 2 ? 1 : -1, s2 = i % 3 ? 1 : -1;
    const auto b = angular_bisector(l1, l2, s1, s2);
    const Point2 p = b.point_at(t(rng));
    const double d1 = s1 * oracle::sd(O(l1), {p.x, p.y}), d2 = s2 * oracle::sd(O(l2), {p.x, p.y});
    CHECK_THAT(d1 - d2, WithinAbs(0, 1e-8));
    CHECK(d1 >= -1e-9);
  }
}

TEST_CASE("angular bisector of parallel lines is the midline") {
  const auto b = angular_bisector(L(0, 0, 1, 0), L(0, 4, 1, 0), +1, -1);
  CHECK(b.kind == LocusKind::Line);
  CHECK_THAT(b.origin.y, WithinAbs(2, 1e-12));
}

TEST_CASE("closest point and residual") {
  const auto ray = make_ray_locus({0, 0}, Direction2::from(1, 0));
  CHECK_THAT(locus_residual(ray, {-3, 4}), WithinAbs(5, 1e-12));
  CHECK_THAT(locus_residual(ray, {3, 4}), WithinAbs(4, 1e-12));
  const auto [t, q] = closest_point(make_circle_locus({0, 0}, 2), {0, 5});
  CHECK_THAT(q.y, WithinAbs(2, 1e-12));
  CHECK_THAT(t, WithinAbs(M_PI / 2, 1e-12));
}

TEST_CASE("discretize stays inside the box") {
  const BBox box{-1, -1, 1, 1};
  const auto ts = discretize(L(0, 0, 1, 1), box, 64);
  REQUIRE(ts.size() == 64);
  for (double tt : ts) {
    const Point2 p = L(0, 0, 1, 1).point_at(tt);
    CHECK(p.x >= -1 - 1e-12);
    CHECK(p.x <= 1 + 1e-12);
  }
  CHECK(std::is_sorted(ts.begin(), ts.end()));
}

TEST_CASE("reserved conic loci refuse evaluation") {
  CHECK_THROWS_AS(Locus1d::reserved(LocusKind::Parabola), GeometryError);
  CHECK_THROWS_AS(Locus1d::reserved(LocusKind::Hyperbola), GeometryError);
}

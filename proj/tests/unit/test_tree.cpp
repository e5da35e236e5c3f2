#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "treelike/tree.hpp"

using namespace treelike;

namespace {

TreePoint S(long p, long q) { return TreePoint::spine(Rational(p, q)); }
TreePoint L(long p, long q, int i, long tp, long tq) { return TreePoint::on_leg(Rational(p, q), i, Rational(tp, tq)); }

TreePoint random_point(const TreeLevel& level, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, level.edge_count() - 1);
  const Edge& e = level.edge(pick(rng));
  const long k = std::uniform_int_distribution<long>(0, 720)(rng);
  return level.point_on_edge(static_cast<std::size_t>(&e - level.edges().data()), e.lo + (e.hi - e.lo) * Rational(k, 720));
}

}  // namespace

TEST_SUITE("tree_model") {
  TEST_CASE("attachment sets") {
    CHECK(attachment_points(0) == std::vector<Rational>{Rational(0), Rational(2, 3)});
    CHECK(attachment_points(1) == std::vector<Rational>{Rational(0), Rational(1, 3), Rational(2, 3), Rational(1)});
    CHECK(attachment_points(2) == std::vector<Rational>{Rational(0), Rational(1, 6), Rational(1, 3), Rational(1, 2),
                                                        Rational(2, 3), Rational(5, 6), Rational(1)});
    const TreeLevel t2(2);
    CHECK(t2.has_attachment(Rational(5, 6)));
    CHECK_FALSE(t2.has_attachment(Rational(1, 12)));
    CHECK(t2.edge_count() == t2.spine_edge_count() + 3 * 7);
  }

  TEST_CASE("triod counts match brute force") {
    for (int n = 0; n <= 8; ++n) {
      INFO("n = " << n);
      CHECK(triod_count(n) == oracle::triod_count(n));
    }
    CHECK(triod_count(0) == 2);
    CHECK(triod_count(1) == 4);
    CHECK(triod_count(2) == 7);
  }

  TEST_CASE("levels nest") {
    for (int n = 0; n < 6; ++n) {
      const auto lo = attachment_points(n);
      const TreeLevel hi(n + 1);
      for (const auto& p : lo) {
        CHECK(hi.has_attachment(p));
        CHECK(hi.leg_length(p) == TreeLevel(n).leg_length(p));
      }
    }
  }

  TEST_CASE("leg lengths") {
    const TreeLevel t3(3);
    CHECK(t3.leg_length(Rational(0)) == Rational(1));
    CHECK(t3.leg_length(Rational(2, 3)) == Rational(1));
    CHECK(t3.leg_length(Rational(1, 3)) == Rational(1, 2));
    CHECK(t3.leg_length(Rational(1)) == Rational(1, 2));
    CHECK(t3.leg_length(Rational(1, 6)) == Rational(1, 4));
    CHECK(t3.leg_length(Rational(1, 12)) == Rational(1, 8));
    CHECK_THROWS_AS(t3.leg_length(Rational(1, 24)), InvalidPointError);
  }

  TEST_CASE("point text format") {
    CHECK(S(1, 3).str() == "S:1/3");
    CHECK(L(2, 3, 1, 1, 2).str() == "L:2/3:1:1/2");
    CHECK(TreePoint::parse("L:2/3:1:1/2") == L(2, 3, 1, 1, 2));
    CHECK(TreePoint::parse("S:0/1") == S(0, 1));
    CHECK(L(1, 3, 2, 0, 1) == S(1, 3));
    CHECK_THROWS(TreePoint::parse("Q:1/2"));
    CHECK_THROWS(TreePoint::parse("L:1/2:3:1/2"));
  }

  TEST_CASE("canonicalize validates and folds") {
    const TreeLevel t1(1);
    CHECK(canonicalize(TreePoint::raw_leg(Rational(1, 3), 0, Rational(0)), t1) == S(1, 3));
    CHECK(canonicalize(L(1, 1, 2, 1, 1), t1) == L(1, 1, 2, 1, 1));
    CHECK_THROWS_AS(canonicalize(L(1, 6, 0, 1, 2), t1), InvalidPointError);
    CHECK_THROWS_AS(canonicalize(S(3, 2), t1), InvalidPointError);
    CHECK_THROWS_AS(canonicalize(TreePoint::raw_leg(Rational(1, 3), 0, Rational(2)), t1), InvalidPointError);
    CHECK_THROWS_AS(canonicalize(TreePoint::raw_leg(Rational(1, 3), 5, Rational(1, 2)), t1), InvalidPointError);
  }

  TEST_CASE("geodesics and distances") {
    const TreeLevel t1(1);
    const TreePoint a = L(1, 3, 0, 1, 2), b = L(2, 3, 1, 1, 4);
    CHECK(geodesic(a, b, t1) == std::vector<TreePoint>{a, S(1, 3), S(2, 3), b});
    CHECK(distance(a, b, t1) == Rational(1, 4) + Rational(1, 3) + Rational(1, 4));
    CHECK(distance(L(0, 1, 0, 1, 1), L(0, 1, 1, 1, 1), t1) == Rational(2));
    CHECK(distance(L(1, 1, 2, 1, 4), L(1, 1, 2, 3, 4), t1) == Rational(1, 4));
    CHECK(distance(S(1, 5), S(4, 5), t1) == Rational(3, 5));
    CHECK(geodesic(L(0, 1, 0, 1, 1), L(0, 1, 1, 1, 1), t1) ==
          std::vector<TreePoint>{L(0, 1, 0, 1, 1), S(0, 1), L(0, 1, 1, 1, 1)});
    CHECK(geodesic_pieces(a, a, t1).empty());

    CHECK(point_along(a, b, Rational(1, 8), t1) == L(1, 3, 0, 1, 4));
    CHECK(point_along(a, b, Rational(1, 4), t1) == S(1, 3));
    CHECK(point_along(a, b, Rational(5, 12), t1) == S(1, 2));
    CHECK(point_along(a, b, Rational(5), t1) == b);
    CHECK(on_geodesic(S(1, 2), a, b, t1));
    CHECK_FALSE(on_geodesic(L(0, 1, 0, 1, 2), a, b, t1));
  }

  TEST_CASE("retraction collapses legs") {
    CHECK(retract(L(2, 3, 2, 1, 1)) == Rational(2, 3));
    CHECK(retract(S(1, 7)) == Rational(1, 7));
  }

  TEST_CASE("metric axioms on random triples") {
    const TreeLevel t3(3);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 500; ++k) {
      const TreePoint x = random_point(t3, rng), y = random_point(t3, rng), z = random_point(t3, rng);
      const Rational dxy = distance(x, y, t3);
      CHECK(dxy == distance(y, x, t3));
      CHECK((dxy == Rational(0)) == (x == y));
      CHECK(distance(x, z, t3) <= dxy + distance(y, z, t3));
      auto fwd = geodesic(x, y, t3), back = geodesic(y, x, t3);
      std::reverse(back.begin(), back.end());
      CHECK(fwd == back);
      const TreePoint mid = point_along(x, y, dxy / Rational(3), t3);
      CHECK(distance(x, mid, t3) == dxy / Rational(3));
      CHECK(on_geodesic(mid, x, y, t3));
    }
  }
}

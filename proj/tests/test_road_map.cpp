#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "manet/road_map.hpp"

using namespace manet;

TEST_CASE("manhattan map lane and intersection counts") {
  const LaneGraph small = build_manhattan_map(2, 2, {1000.0, 1000.0});
  CHECK(small.lanes.size() == 8);
  CHECK(small.intersections.size() == 4);

  const LaneGraph grid = build_manhattan_map(5, 5, {1000.0, 1000.0});
  CHECK(grid.lanes.size() == 20);
  CHECK(grid.intersections.size() == 25);
}

TEST_CASE("manhattan map rejects degenerate grids") {
  CHECK_THROWS_AS(build_manhattan_map(1, 5, {1000.0, 1000.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_manhattan_map(5, 1, {1000.0, 1000.0}), std::invalid_argument);
}

TEST_CASE("freeway map lane counts and no intersections") {
  const LaneGraph f = build_freeway_map(3, 2, {1000.0, 1000.0});
  CHECK(f.lanes.size() == 12);
  CHECK(f.intersections.empty());

  const LaneGraph minimal = build_freeway_map(1, 1, {1000.0, 1000.0});
  CHECK(minimal.lanes.size() == 2);
}

TEST_CASE("freeway map rejects empty configurations") {
  CHECK_THROWS_AS(build_freeway_map(0, 2, {1000.0, 1000.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_freeway_map(3, 0, {1000.0, 1000.0}), std::invalid_argument);
}

TEST_CASE("all lanes lie inside the area") {
  for (const LaneGraph& g : {build_manhattan_map(5, 7, {800.0, 600.0}),
                             build_freeway_map(4, 3, {1200.0, 900.0})}) {
    for (const Lane& lane : g.lanes) {
      CHECK(g.area.contains(lane.start));
      CHECK(g.area.contains(lane.end));
      CHECK(g.area.contains(lane.point_at(lane.length / 2)));
      CHECK(lane.length > 0.0);
    }
  }
}

TEST_CASE("manhattan lanes have two directions per street") {
  const LaneGraph g = build_manhattan_map(3, 3, {900.0, 900.0});
  int east = 0, west = 0, north = 0, south = 0;
  for (const Lane& lane : g.lanes) {
    const double h = lane.heading;
    if (std::fabs(h) < 1e-9) ++east;
    else if (std::fabs(h - std::numbers::pi) < 1e-9) ++west;
    else if (std::fabs(h - std::numbers::pi / 2) < 1e-9) ++north;
    else ++south;
  }
  CHECK(east == 3);
  CHECK(west == 3);
  CHECK(north == 3);
  CHECK(south == 3);
}

TEST_CASE("next_leg goes straight on a draw below one half") {
  const LaneGraph g = build_manhattan_map(3, 3, {900.0, 900.0});
  // Eastbound lane of the middle street; middle crossing is interior.
  const LaneCrossing* c = g.crossing_at(2, g.lanes[2].length / 2);
  REQUIRE(c != nullptr);
  REQUIRE(c->has_straight);
  // Find a seed whose first draw is below 0.5: straight is forced.
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng probe(seed);
    if (probe.uniform() >= 0.5) continue;
    Rng rng(seed);
    const LanePosition next = next_leg(g, {2, c->offset}, rng);
    CHECK(next.lane_id == 2);
    CHECK(next.offset == doctest::Approx(c->offset));
    return;
  }
  FAIL("no suitable seed found");
}

TEST_CASE("next_leg turn frequencies match the configured probabilities") {
  const LaneGraph g = build_manhattan_map(3, 3, {900.0, 900.0});
  const LaneCrossing* c = g.crossing_at(2, g.lanes[2].length / 2);
  REQUIRE(c != nullptr);
  REQUIRE(c->left.lane_id >= 0);
  REQUIRE(c->right.lane_id >= 0);
  Rng rng(1234);
  const int draws = 100000;
  int straight = 0, left = 0, right = 0;
  for (int k = 0; k < draws; ++k) {
    const LanePosition next = next_leg(g, {2, c->offset}, rng);
    if (next.lane_id == 2) ++straight;
    else if (next.lane_id == c->left.lane_id) ++left;
    else if (next.lane_id == c->right.lane_id) ++right;
    else FAIL("turn landed on an unrelated lane");
  }
  CHECK(std::fabs(straight / double(draws) - 0.5) <= 0.01);
  CHECK(std::fabs(left / double(draws) - 0.25) <= 0.01);
  CHECK(std::fabs(right / double(draws) - 0.25) <= 0.01);
}

TEST_CASE("next_leg renormalizes over the options present at the border") {
  const LaneGraph g = build_manhattan_map(3, 3, {900.0, 900.0});
  // Eastbound middle lane at its final crossing: no straight option.
  const Lane& lane = g.lanes[2];
  const LaneCrossing* c = g.crossing_at(2, lane.length);
  REQUIRE(c != nullptr);
  CHECK(!c->has_straight);
  const int options = (c->left.lane_id >= 0) + (c->right.lane_id >= 0);
  REQUIRE(options == 2);
  Rng rng(77);
  const int draws = 100000;
  int left = 0, right = 0;
  for (int k = 0; k < draws; ++k) {
    const LanePosition next = next_leg(g, {2, lane.length}, rng);
    if (next.lane_id == c->left.lane_id) ++left;
    else if (next.lane_id == c->right.lane_id) ++right;
    else FAIL("invalid option drawn");
  }
  // Renormalized {0.25, 0.25} -> {0.5, 0.5}.
  CHECK(std::fabs(left / double(draws) - 0.5) <= 0.01);
  CHECK(std::fabs(right / double(draws) - 0.5) <= 0.01);
}

TEST_CASE("freeway next_leg wraps at the lane end and idles elsewhere") {
  const LaneGraph g = build_freeway_map(2, 1, {1000.0, 1000.0});
  Rng rng(1);
  const LanePosition wrapped = next_leg(g, {0, g.lanes[0].length}, rng);
  CHECK(wrapped.lane_id == 0);
  CHECK(wrapped.offset == 0.0);
  const LanePosition same = next_leg(g, {0, 300.0}, rng);
  CHECK(same.lane_id == 0);
  CHECK(same.offset == doctest::Approx(300.0));
}

TEST_CASE("next_leg away from a crossing is a structural error") {
  const LaneGraph g = build_manhattan_map(3, 3, {900.0, 900.0});
  Rng rng(1);
  CHECK_THROWS_AS(next_leg(g, {0, 13.0}, rng), std::logic_error);
}

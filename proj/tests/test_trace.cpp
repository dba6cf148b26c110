#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "manet/mobility.hpp"
#include "manet/road_map.hpp"
#include "manet/rng.hpp"
#include "manet/trace.hpp"

using namespace manet;

namespace {
constexpr double kPi = std::numbers::pi;

MobilityTrace linear_motion_trace() {
  // One node moving (0,0) -> (10,0) over one second, then turning.
  MobilityTrace t = make_trace(1, 3.0, 1.0, {100.0, 100.0});
  t.state_at(0, 0) = {{0.0, 0.0}, 10.0, 0.0};
  t.state_at(1, 0) = {{10.0, 0.0}, 5.0, kPi / 2};
  t.state_at(2, 0) = {{10.0, 5.0}, 2.0, 0.0};
  t.state_at(3, 0) = {{12.0, 5.0}, 0.0, 0.0};
  return t;
}
}  // namespace

TEST_CASE("heading_to_velocity axis cases") {
  const Vec2 east = heading_to_velocity(10.0, 0.0);
  CHECK(east.x == doctest::Approx(10.0));
  CHECK(east.y == doctest::Approx(0.0));

  const Vec2 still = heading_to_velocity(0.0, 1.234);
  CHECK(still.x == 0.0);
  CHECK(still.y == 0.0);

  const Vec2 north = heading_to_velocity(5.0, kPi / 2);
  CHECK(std::fabs(north.x) < 1e-9);
  CHECK(north.y == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("heading_to_velocity rejects bad input") {
  CHECK_THROWS_AS(heading_to_velocity(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(heading_to_velocity(1.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("heading_to_velocity magnitude equals speed") {
  Rng rng(99);
  for (int k = 0; k < 2000; ++k) {
    const double speed = rng.uniform(0.0, 80.0);
    const double heading = rng.uniform(-20.0, 20.0);
    const double mag = heading_to_velocity(speed, heading).norm();
    CHECK(std::fabs(mag - speed) <= 1e-9 * std::max(1.0, speed));
  }
}

TEST_CASE("wrap_heading and angular_distance") {
  CHECK(wrap_heading(2 * kPi) == doctest::Approx(0.0));
  CHECK(wrap_heading(-kPi / 2) == doctest::Approx(3 * kPi / 2));
  CHECK(angular_distance(0.1, 2 * kPi - 0.1) == doctest::Approx(0.2));
  CHECK(angular_distance(kPi, 0.0) == doctest::Approx(kPi));
}

TEST_CASE("position_at midpoint and sample times") {
  MobilityTrace t = make_trace(1, 1.0, 1.0, {100.0, 100.0});
  t.state_at(0, 0).position = {0.0, 0.0};
  t.state_at(1, 0).position = {10.0, 0.0};
  const Vec2 mid = position_at(t, 0, 0.5);
  CHECK(mid.x == doctest::Approx(5.0));
  CHECK(mid.y == doctest::Approx(0.0));
  CHECK(position_at(t, 0, 1.0).x == doctest::Approx(10.0));
  CHECK(position_at(t, 0, 0.0).x == doctest::Approx(0.0));
}

TEST_CASE("position_at three-segment path matches independent interpolation") {
  const MobilityTrace t = linear_motion_trace();
  // Brute-force oracle: scan the raw sample list for the bracketing pair.
  auto oracle = [&t](double when) {
    const TraceSample* lo = nullptr;
    const TraceSample* hi = nullptr;
    for (const TraceSample& s : t.samples) {
      if (s.time <= when && (!lo || s.time > lo->time)) lo = &s;
      if (s.time >= when && (!hi || s.time < hi->time)) hi = &s;
    }
    if (lo->time == hi->time) return lo->state.position;
    const double f = (when - lo->time) / (hi->time - lo->time);
    return lo->state.position + (hi->state.position - lo->state.position) * f;
  };
  for (double when : {0.25, 1.0, 1.3, 1.9, 2.5, 3.0}) {
    const Vec2 got = position_at(t, 0, when);
    const Vec2 want = oracle(when);
    CHECK(got.x == doctest::Approx(want.x).epsilon(1e-12));
    CHECK(got.y == doctest::Approx(want.y).epsilon(1e-12));
  }
}

TEST_CASE("position_at rejects out-of-range queries") {
  const MobilityTrace t = linear_motion_trace();
  CHECK_THROWS_AS(position_at(t, 0, -0.5), std::domain_error);
  CHECK_THROWS_AS(position_at(t, 0, 3.5), std::domain_error);
  CHECK_THROWS_AS(position_at(t, 5, 1.0), std::invalid_argument);
}

TEST_CASE("position_at is continuous within v_max per step") {
  const LaneGraph map = build_manhattan_map(4, 4, {500.0, 500.0});
  GvmmParams params;
  params.num_nodes = 8;
  params.num_groups = 2;
  params.duration = 60.0;
  params.max_speed = 15.0;
  const MobilityTrace t = generate_gvmm(params, map, 11);
  Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const int node = rng.uniform_int(t.node_count);
    const double time = rng.uniform(0.0, t.duration - 0.2);
    const double eps = rng.uniform(0.0, 0.2);
    const double moved = distance(position_at(t, node, time),
                                  position_at(t, node, time + eps));
    CHECK(moved <= params.max_speed * eps + 1e-9);
  }
}

TEST_CASE("validate_trace accepts well-formed traces") {
  MobilityTrace t = make_trace(2, 2.0, 1.0, {50.0, 50.0});
  for (int s = 0; s <= 2; ++s)
    for (int n = 0; n < 2; ++n) t.state_at(s, n).position = {10.0 + n, 20.0};
  CHECK(validate_trace(t).ok());
}

TEST_CASE("validate_trace reports a deleted sample") {
  MobilityTrace t = make_trace(2, 2.0, 1.0, {50.0, 50.0});
  t.samples.erase(t.samples.begin() + 3);  // node 1 at t=1
  const TraceValidation v = validate_trace(t);
  REQUIRE(v.findings.size() == 1);
  CHECK(v.findings[0].kind == TraceFinding::Kind::missing_sample);
  CHECK(v.findings[0].node == 1);
  CHECK(v.findings[0].time == doctest::Approx(1.0));
}

TEST_CASE("validate_trace reports out-of-area positions") {
  MobilityTrace t = make_trace(1, 1.0, 1.0, {50.0, 50.0});
  t.state_at(1, 0).position = {51.0, 10.0};
  const TraceValidation v = validate_trace(t);
  REQUIRE(v.findings.size() == 1);
  CHECK(v.findings[0].kind == TraceFinding::Kind::out_of_area);
}

TEST_CASE("validate_trace reports disorder and duplicates") {
  MobilityTrace t = make_trace(2, 1.0, 1.0, {50.0, 50.0});
  std::swap(t.samples[0], t.samples[1]);
  CHECK(!validate_trace(t).ok());

  MobilityTrace u = make_trace(2, 1.0, 1.0, {50.0, 50.0});
  u.samples.push_back(u.samples.back());
  bool saw_duplicate = false;
  for (const TraceFinding& f : validate_trace(u).findings)
    saw_duplicate |= f.kind == TraceFinding::Kind::duplicate_sample;
  CHECK(saw_duplicate);
}

TEST_CASE("validate_trace reports bad values") {
  MobilityTrace t = make_trace(1, 1.0, 1.0, {50.0, 50.0});
  t.state_at(0, 0).speed = -1.0;
  t.state_at(1, 0).heading = 7.0;  // >= 2*pi
  CHECK(validate_trace(t).findings.size() == 2);
}

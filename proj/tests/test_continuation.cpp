#include <doctest.h>

#include <algorithm>
#include <optional>

#include "ptsym/continuation.hpp"

using namespace ptsym;

namespace {

SweepOptions downward(int levels, double to) {
  SweepOptions o;
  o.alpha_from = 2.0;
  o.alpha_to = to;
  o.alpha_step = 0.01;
  o.levels = levels;
  o.grid = GridPolicy{8.0, 1000, std::nullopt};
  return o;
}

const TrackEvent* first_event(const LevelTrack& t, EventKind kind) {
  for (const auto& e : t.events)
    if (e.kind == kind) return &e;
  return nullptr;
}

// Root count on either side of an event alpha in a downward sweep.
std::pair<std::size_t, std::size_t> counts_around(const SweepResult& s, double alpha) {
  std::optional<std::size_t> before, after;
  for (const auto& c : s.counts) {
    if (c.alpha > alpha) before = c.count;
    if (c.alpha < alpha && !after) after = c.count;
  }
  return {before.value_or(0), after.value_or(0)};
}

}  // namespace

TEST_SUITE("continuation") {
  TEST_CASE("levels 4 and 5 merge and return near alpha = 1") {
    const auto s = continuation_sweep({2, 1}, {2.0, 0.0}, downward(7, 1.0));
    REQUIRE(s.tracks.size() == 7);
    const auto* m4 = first_event(s.tracks[3], EventKind::merge);
    const auto* m5 = first_event(s.tracks[4], EventKind::merge);
    REQUIRE(m4);
    REQUIRE(m5);
    CHECK(m4->partner == 5);
    CHECK(m5->partner == 4);
    CHECK(m4->alpha == m5->alpha);
    CHECK(m4->alpha >= 1.05);
    CHECK(m4->alpha <= 1.30);
    const auto* r4 = first_event(s.tracks[3], EventKind::reappear);
    REQUIRE(r4);
    CHECK(r4->alpha >= 1.00);
    CHECK(r4->alpha <= 1.10);

    for (const auto& t : s.tracks) {
      for (const auto& e : t.events) {
        CHECK(e.kind != EventKind::step_collapse);
        const auto [before, after] = counts_around(s, e.alpha);
        CAPTURE(e.alpha);
        if (e.kind == EventKind::merge) CHECK(before == after + 2);
        if (e.kind == EventKind::reappear) CHECK(after == before + 2);
      }
    }
    CHECK(special_level(s) == 3);
    for (const auto* i : {&s.tracks[0], &s.tracks[1], &s.tracks[2]}) CHECK(i->events.empty());
  }

  TEST_CASE("the special level moves with beta") {
    CHECK(special_level(continuation_sweep({2, 1}, {2.0, -0.25}, downward(7, 1.05))) == 1);
    CHECK(special_level(continuation_sweep({2, 1}, {2.0, 0.25}, downward(7, 1.05))) == 5);
  }

  TEST_CASE("upward sweep through alpha = 4 stays smooth and monotone") {
    SweepOptions o = downward(3, 4.5);
    o.alpha_step = 0.05;
    const auto s = continuation_sweep({2, 1}, {2.0, 0.0}, o);
    for (const auto& t : s.tracks) {
      CHECK(t.events.empty());
      CHECK(t.points.back().alpha == doctest::Approx(4.5));
      for (std::size_t i = 1; i < t.points.size(); ++i) CHECK(t.points[i].energy > t.points[i - 1].energy);
    }
  }

  TEST_CASE("serial and parallel sweeps agree") {
    SweepOptions o = downward(4, 1.5);
    o.alpha_step = 0.05;
    o.scan.execution = Execution::serial;
    const auto a = continuation_sweep({2, 1}, {2.0, 0.0}, o);
    o.scan.execution = Execution::parallel;
    const auto b = continuation_sweep({2, 1}, {2.0, 0.0}, o);
    REQUIRE(a.tracks.size() == b.tracks.size());
    for (std::size_t i = 0; i < a.tracks.size(); ++i) {
      REQUIRE(a.tracks[i].points.size() == b.tracks[i].points.size());
      for (std::size_t k = 0; k < a.tracks[i].points.size(); ++k)
        CHECK(a.tracks[i].points[k].energy == b.tracks[i].points[k].energy);
    }
  }

  TEST_CASE("event names") {
    CHECK(to_string(EventKind::merge) == "merge");
    CHECK(to_string(EventKind::reappear) == "reappear");
    CHECK(to_string(EventKind::step_collapse) == "step_collapse");
  }
}

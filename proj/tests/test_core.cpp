#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aoisim/core.hpp"

using namespace aoisim;

namespace {

ScenarioConfig basic(std::uint32_t n, double rate, Mode mode = Mode::Normal,
                     BufferKind buffer = BufferKind::OnePacket) {
  ScenarioConfig cfg;
  cfg.n_terminals = n;
  cfg.arrival_rates.assign(n, rate);
  cfg.buffer = buffer;
  cfg.mode = mode;
  cfg.horizon = 1000;
  cfg.warmup = 0;
  cfg.seed = 5;
  return cfg;
}

SlotOutcome step(SystemState& sys, std::vector<std::uint32_t> decision) {
  SlotOutcome out;
  sys.advance(decision, out);
  return out;
}

}  // namespace

TEST_CASE("configuration validation rejects malformed scenarios") {
  CHECK_THROWS_AS(basic(0, 0.5).validate(), std::invalid_argument);

  ScenarioConfig cfg = basic(3, 0.5);
  cfg.arrival_rates.pop_back();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = basic(2, 0.5);
  cfg.arrival_rates[1] = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.arrival_rates[1] = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = basic(2, 0.5);
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = basic(2, 0.5);
  cfg.warmup = cfg.horizon;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = basic(2, 0.5);
  cfg.warmup = -1;
  CHECK(cfg.effective_warmup() == cfg.horizon / 10);
  cfg.warmup = 17;
  CHECK(cfg.effective_warmup() == 17);
}

TEST_CASE("a served saturated terminal stays at age one") {
  SystemState sys(basic(1, 1.0));
  for (int t = 0; t < 20; ++t) {
    const SlotOutcome out = step(sys, {0});
    REQUIRE(out.delivered.size() == 1);
    CHECK(out.delivered[0].age == 1);  // arrived this slot, delivered this slot
    CHECK(out.delivered[0].peak == 2);
    CHECK(sys.terminals()[0].aoi == 1);
  }
}

TEST_CASE("age grows by one per slot until a delivery rebases it") {
  SystemState sys(basic(1, 1.0));
  for (int t = 0; t < 5; ++t) step(sys, {});  // idle, buffer keeps refreshing
  CHECK(sys.terminals()[0].aoi == 6);
  // The one-packet buffer holds only the newest arrival (last slot, age 1).
  CHECK(sys.terminals()[0].queue.size() == 1);
  const SlotOutcome out = step(sys, {0});
  REQUIRE(out.delivered.size() == 1);
  CHECK(out.delivered[0].age == 1);
  CHECK(out.delivered[0].peak == 7);  // 6 + the slot the delivery rode on
  CHECK(sys.terminals()[0].aoi == 1);
}

TEST_CASE("fcfs buffers deliver oldest first and keep the backlog") {
  SystemState sys(basic(1, 1.0, Mode::Normal, BufferKind::FcfsInfinite));
  for (int t = 0; t < 4; ++t) step(sys, {});
  CHECK(sys.terminals()[0].queue.size() == 4);
  SlotOutcome out = step(sys, {0});
  REQUIRE(out.delivered.size() == 1);
  CHECK(out.delivered[0].age == 5);  // the slot-0 packet is 5 slots old now
  CHECK(sys.terminals()[0].aoi == 5);
  out = step(sys, {0});
  CHECK(out.delivered[0].age == 5);  // slot-1 packet, one slot later
  CHECK(sys.terminals()[0].aoi == 5);
}

TEST_CASE("two transmitters collide and deliver nothing") {
  SystemState sys(basic(2, 1.0));
  const SlotOutcome out = step(sys, {0, 1});
  CHECK(out.collided);
  CHECK(out.delivered.empty());
  CHECK(sys.terminals()[0].aoi == 2);
  CHECK(sys.terminals()[1].aoi == 2);
  // Buffers are untouched by the collision.
  CHECK(sys.terminals()[0].has_packet());
  CHECK(sys.terminals()[1].has_packet());
}

TEST_CASE("a scheduled empty buffer is a blank slot") {
  SystemState sys(basic(1, 0.0));
  const SlotOutcome out = step(sys, {0});
  CHECK(out.blank);
  CHECK(out.delivered.empty());
  CHECK(sys.terminals()[0].aoi == 2);
}

TEST_CASE("free-update channel refreshes even an empty terminal") {
  SystemState sys(basic(2, 0.0, Mode::A0));
  step(sys, {});
  const SlotOutcome out = step(sys, {1});
  REQUIRE(out.delivered.size() == 1);
  CHECK(out.delivered[0].terminal == 1);
  CHECK(out.delivered[0].age == 1);
  CHECK(out.delivered[0].peak == 3);
  CHECK(sys.terminals()[1].aoi == 1);
  CHECK(sys.terminals()[0].aoi == 3);  // unscheduled terminal just ages

  // Collisions still collide on this channel.
  const SlotOutcome both = step(sys, {0, 1});
  CHECK(both.collided);
  CHECK(both.delivered.empty());
}

TEST_CASE("interference-free channel delivers every scheduled packet") {
  SystemState sys(basic(3, 1.0, Mode::A1));
  const SlotOutcome out = step(sys, {0, 1, 2});
  CHECK(out.delivered.size() == 3);
  CHECK_FALSE(out.collided);
  for (const auto& t : sys.terminals()) CHECK(t.aoi == 1);
}

TEST_CASE("scheduling resets the idle counter even without a delivery") {
  SystemState sys(basic(4, 0.0));
  step(sys, {2});  // blank, but terminal 2 was scheduled
  CHECK(sys.terminals()[2].since_service == 0);
  CHECK(sys.terminals()[0].since_service == 1);
  step(sys, {});
  CHECK(sys.terminals()[2].since_service == 1);
  CHECK(sys.terminals()[0].since_service == 2);
}

TEST_CASE("arrival draws are consumed identically whatever gets scheduled") {
  // One draw per terminal per slot: an idle run and a busy run from the
  // same seed must see the same arrivals.  FCFS queues record them all, so
  // arrivals = backlog + deliveries, comparable run to run.
  ScenarioConfig cfg = basic(3, 0.5, Mode::Normal, BufferKind::FcfsInfinite);
  SystemState idle(cfg), busy(cfg);
  std::vector<std::int64_t> delivered(3, 0);
  for (int t = 0; t < 200; ++t) {
    step(idle, {});
    const SlotOutcome out = step(busy, {static_cast<std::uint32_t>(t % 3)});
    for (const Delivery& d : out.delivered) ++delivered[d.terminal];
  }
  for (int n = 0; n < 3; ++n) {
    const auto backlog = static_cast<std::int64_t>(busy.terminals()[n].queue.size());
    const auto all = static_cast<std::int64_t>(idle.terminals()[n].queue.size());
    CHECK(backlog + delivered[n] == all);
  }
}

TEST_CASE("runaway fcfs queues abort with a diagnosis instead of growing") {
  ScenarioConfig cfg = basic(1, 1.0, Mode::Normal, BufferKind::FcfsInfinite);
  cfg.horizon = kQueueGuard + 10;
  SystemState sys(cfg);
  SlotOutcome out;
  const std::vector<std::uint32_t> none;
  std::int64_t t = 0;
  CHECK_THROWS_AS(
      [&] {
        for (; t < cfg.horizon; ++t) sys.advance(none, out);
      }(),
      std::runtime_error);
  CHECK(t == kQueueGuard);  // the guard trips on the first packet past the cap
}

#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "aoisim/rng.hpp"

namespace aoisim {

enum class BufferKind { OnePacket, FcfsInfinite };

// Channel/reset variants used by the bound experiments:
//   Normal  collision channel; a delivered packet sets the terminal's AoI to
//           the packet's age.
//   A0      collision channel, but any uncontended transmission resets the
//           terminal's AoI to 1 regardless of buffer contents.
//   A1      no collisions; every scheduled terminal with a packet delivers
//           in the same slot.
enum class Mode { Normal, A0, A1 };

// Hard cap on FCFS queue growth; crossing it aborts the run with a
// diagnosis instead of exhausting memory on an unstable configuration.
inline constexpr std::int64_t kQueueGuard = 1'000'000;

struct ScenarioConfig {
  std::uint32_t n_terminals = 0;
  std::vector<double> arrival_rates;  // per-terminal Bernoulli rate in [0, 1]
  BufferKind buffer = BufferKind::OnePacket;
  Mode mode = Mode::Normal;
  std::int64_t horizon = 100'000;  // simulated slots
  std::int64_t warmup = -1;        // slots discarded from metrics; -1 = horizon/10
  std::uint64_t seed = 1;

  std::int64_t effective_warmup() const { return warmup < 0 ? horizon / 10 : warmup; }
  void validate() const;  // throws std::invalid_argument
};

struct TerminalState {
  std::int64_t aoi = 1;            // end-of-slot age of the newest delivered update
  std::int64_t since_service = 0;  // slots since this terminal was last scheduled
  std::deque<std::int64_t> queue;  // buffered packets as arrival slots, oldest first;
                                   // one-packet buffers keep at most one entry

  bool has_packet() const { return !queue.empty(); }
  // End-of-slot age of the packet a transmission would carry (0 when empty).
  std::int64_t head_age(std::int64_t now) const {
    return queue.empty() ? 0 : now - queue.front() + 1;
  }
};

struct Delivery {
  std::uint32_t terminal;
  std::int64_t age;   // delivered packet age == the terminal's new AoI
  std::int64_t peak;  // age reached in the delivery slot just before the
                      // reset: previous end-of-slot AoI + 1 (PAoI sample)
};

struct SlotOutcome {
  std::int64_t slot = 0;
  std::vector<std::uint32_t> scheduled;  // sorted copy of the decision set
  std::vector<Delivery> delivered;       // at most one entry outside mode A1
  bool collided = false;                 // >= 2 scheduled on a collision channel
  bool blank = false;                    // some scheduled terminal had nothing to send
};

// Slot-indexed system state.  One call to advance() runs one slot in the
// fixed order: arrivals, transmission of the given decision set, then the
// global AoI/ageing step, with every age read as an end-of-slot value (a
// packet arriving in slot t has age 1 at the end of t and is deliverable in
// t).  Decisions are made by the caller before the slot's arrivals are
// drawn, so schedulers never see the current slot's arrivals.
class SystemState {
 public:
  explicit SystemState(ScenarioConfig cfg);

  // decision: strictly increasing terminal indices (possibly empty = idle)
  void advance(std::span<const std::uint32_t> decision, SlotOutcome& out);

  const ScenarioConfig& config() const { return cfg_; }
  std::uint32_t n() const { return cfg_.n_terminals; }
  std::int64_t now() const { return slot_; }  // completed slots
  const std::vector<TerminalState>& terminals() const { return term_; }
  RngStream& scheduler_rng() { return sched_rng_; }

 private:
  ScenarioConfig cfg_;
  std::vector<TerminalState> term_;
  std::vector<RngStream> arrival_rng_;  // one substream per terminal
  RngStream sched_rng_;
  std::int64_t slot_ = 0;
};

}  // namespace aoisim

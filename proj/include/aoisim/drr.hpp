#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoisim/rng.hpp"

namespace aoisim {

// Decentralized rotation protocol: each terminal keeps a private countdown
// and transmits exactly when it hits zero (a keepalive if its buffer is
// empty), reloading to its belief of the frame length.  The base station
// cannot address terminals; it only broadcasts what it observed (update,
// empty-handed transmission, silence, or collision) plus its membership
// count, and every terminal updates from that common signal.  A joining
// terminal transmits immediately, collides with the current slot owner
// exactly once, and the collision feedback re-spaces everyone into a clean
// N+1 rotation; a leaver is detected from a single silent slot.

enum class Observed : std::uint8_t { Update, Blank, Nothing, Collision };

struct FeedbackMsg {
  Observed kind = Observed::Nothing;
  std::uint32_t terminal_count = 0;  // BS belief after its own update
  std::uint32_t spot = 0;            // BS rotation pointer before stepping
};

struct TerminalProtoState {
  std::uint64_t id = 0;
  std::int64_t countdown = 0;       // transmit when 0
  std::uint32_t frame = 0;          // believed rotation length
  bool fresh = true;                // cleared by the first collision feedback
  std::int64_t packet_slot = -1;    // arrival slot of the buffered packet, -1 = empty
  std::int64_t aoi = 1;
};

struct BsProtoState {
  std::uint32_t terminal_count = 1;
  std::uint32_t spot = 1;  // steps down (mod terminal_count) each slot
};

bool terminal_transmits(const TerminalProtoState& t);

// One slot at the base station: classify the slot from the number of
// transmitters, update the membership belief, and emit the broadcast.
FeedbackMsg bs_slot(BsProtoState& bs, std::uint32_t transmitter_count,
                    bool delivered_nonempty);

// One terminal's reaction to the broadcast.  `transmitted` says whether this
// terminal was on air in the slot the message describes; a transmitter has
// already reloaded its countdown from its pre-feedback frame belief.
void terminal_feedback(TerminalProtoState& t, const FeedbackMsg& msg,
                       bool transmitted);

struct ChurnEvent {
  std::int64_t slot = 0;
  bool join = true;
  std::uint64_t id = 0;  // joining id, or the id that leaves
};

struct DrrTraceRow {
  std::int64_t slot = 0;
  std::vector<std::uint64_t> transmitters;  // ids on air this slot
  Observed feedback = Observed::Nothing;
  std::uint32_t bs_count = 0;  // after the slot
  std::uint32_t bs_spot = 0;   // after the slot
};

struct DrrResult {
  std::vector<DrrTraceRow> trace;
  std::int64_t collisions = 0;
  std::int64_t updates = 0;
  std::int64_t blanks = 0;
  double avg_aoi = 0.0;           // mean over post-warmup slots of the members' mean AoI
  std::int64_t warmup_slots = 0;
};

struct DrrConfig {
  std::uint32_t n_initial = 0;
  double arrival_rate = 1.0;  // shared Bernoulli rate feeding one-packet buffers
  std::int64_t horizon = 0;
  std::int64_t warmup = 0;
  std::uint64_t seed = 1;
  std::vector<ChurnEvent> churn;  // strictly increasing slots, well separated
  bool keep_trace = true;

  void validate() const;  // throws std::invalid_argument
};

DrrResult run_drr(const DrrConfig& cfg);

const char* observed_name(Observed o);

}  // namespace aoisim

#include "aoisim/drr.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace aoisim {

bool terminal_transmits(const TerminalProtoState& t) { return t.countdown == 0; }

FeedbackMsg bs_slot(BsProtoState& bs, std::uint32_t transmitter_count,
                    bool delivered_nonempty) {
  FeedbackMsg msg;
  if (transmitter_count >= 2) {
    // Two signals can only mean a newcomer announced itself on top of the
    // slot owner: grow the census before broadcasting so everyone learns
    // the new frame length from this one message.
    bs.terminal_count += 1;
    msg.kind = Observed::Collision;
  } else if (transmitter_count == 1) {
    msg.kind = delivered_nonempty ? Observed::Update : Observed::Blank;
  } else {
    // A silent slot had an owner; that owner is gone.
    msg.kind = Observed::Nothing;
    if (bs.terminal_count > 1) bs.terminal_count -= 1;
  }
  msg.terminal_count = bs.terminal_count;
  msg.spot = bs.spot;
  bs.spot = (bs.spot + bs.terminal_count - 1) % bs.terminal_count;
  return msg;
}

void terminal_feedback(TerminalProtoState& t, const FeedbackMsg& msg,
                       bool transmitted) {
  switch (msg.kind) {
    case Observed::Collision:
      if (t.fresh) {
        // The collision the newcomer caused: adopt the announced frame and
        // fall in at the end of the current rotation.
        t.frame = msg.terminal_count;
        t.countdown = msg.terminal_count;
        t.fresh = false;
      } else {
        // Incumbents (the slot owner included) keep their cadence and only
        // stretch future reloads to the larger frame.
        t.frame = msg.terminal_count;
      }
      break;
    case Observed::Nothing:
      // One member left; every future rotation is one slot shorter.
      if (t.frame > 1) t.frame -= 1;
      break;
    case Observed::Update:
    case Observed::Blank:
      break;
  }
  (void)transmitted;
  t.countdown -= 1;
}

const char* observed_name(Observed o) {
  switch (o) {
    case Observed::Update: return "update";
    case Observed::Blank: return "blank";
    case Observed::Nothing: return "nothing";
    case Observed::Collision: return "collision";
  }
  return "?";
}

void DrrConfig::validate() const {
  if (n_initial == 0) throw std::invalid_argument("need at least one initial terminal");
  if (!(arrival_rate > 0.0 && arrival_rate <= 1.0))
    throw std::invalid_argument("arrival rate must lie in (0, 1]");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (warmup < 0 || warmup >= horizon)
    throw std::invalid_argument("warmup must lie in [0, horizon)");

  std::set<std::uint64_t> members, ever;
  for (std::uint64_t id = 1; id <= n_initial; ++id) {
    members.insert(id);
    ever.insert(id);
  }
  std::int64_t prev_slot = 0;
  std::size_t prev_count = members.size();
  for (const ChurnEvent& ev : churn) {
    if (ev.slot < 1 || ev.slot > horizon)
      throw std::invalid_argument("churn slot " + std::to_string(ev.slot) +
                                  " outside [1, horizon]");
    // Events need breathing room: the previous change must fully settle
    // (one collision plus one rotation, doubled for slack) first.
    const std::int64_t gap = 2 * static_cast<std::int64_t>(prev_count + 1);
    if (prev_slot != 0 && ev.slot - prev_slot < gap)
      throw std::invalid_argument("churn events at slots " + std::to_string(prev_slot) +
                                  " and " + std::to_string(ev.slot) +
                                  " are closer than " + std::to_string(gap) + " slots");
    if (ev.join) {
      if (ever.count(ev.id))
        throw std::invalid_argument("terminal id " + std::to_string(ev.id) +
                                    " joins more than once");
      members.insert(ev.id);
      ever.insert(ev.id);
    } else {
      if (!members.count(ev.id))
        throw std::invalid_argument("terminal id " + std::to_string(ev.id) +
                                    " leaves without being a member");
      if (members.size() == 1)
        throw std::invalid_argument("the last member cannot leave");
      members.erase(ev.id);
    }
    prev_slot = ev.slot;
    prev_count = members.size();
  }
}

DrrResult run_drr(const DrrConfig& cfg) {
  cfg.validate();

  struct Member {
    TerminalProtoState state;
    RngStream arrivals;
  };
  std::vector<Member> members;
  members.reserve(cfg.n_initial);
  for (std::uint64_t id = 1; id <= cfg.n_initial; ++id) {
    Member m;
    m.state.id = id;
    m.state.countdown = static_cast<std::int64_t>(id % cfg.n_initial);
    m.state.frame = cfg.n_initial;
    m.state.fresh = false;  // the initial population starts converged
    m.arrivals = RngStream(cfg.seed, id);
    members.push_back(std::move(m));
  }
  BsProtoState bs;
  bs.terminal_count = cfg.n_initial;
  bs.spot = 1;

  DrrResult out;
  out.warmup_slots = cfg.warmup;
  std::size_t churn_pos = 0;
  double aoi_sum = 0.0;
  std::int64_t aoi_slots = 0;
  std::vector<std::size_t> on_air;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    while (churn_pos < cfg.churn.size() && cfg.churn[churn_pos].slot == t) {
      const ChurnEvent& ev = cfg.churn[churn_pos++];
      if (ev.join) {
        Member m;
        m.state.id = ev.id;
        m.state.countdown = 0;  // announce immediately
        m.state.frame = 1;
        m.state.fresh = true;
        m.arrivals = RngStream(cfg.seed, ev.id);
        members.push_back(std::move(m));
      } else {
        members.erase(std::find_if(members.begin(), members.end(),
                                   [&](const Member& m) { return m.state.id == ev.id; }));
      }
    }

    for (Member& m : members)
      if (m.arrivals.bernoulli(cfg.arrival_rate)) m.state.packet_slot = t;

    on_air.clear();
    for (std::size_t i = 0; i < members.size(); ++i)
      if (terminal_transmits(members[i].state)) on_air.push_back(i);

    const bool sole_nonempty =
        on_air.size() == 1 && members[on_air.front()].state.packet_slot >= 0;
    // A transmitter commits to its next turn from its current belief; a
    // collision message may still re-seat a newcomer below.
    for (std::size_t i : on_air)
      members[i].state.countdown = members[i].state.frame;

    const FeedbackMsg msg = bs_slot(bs, static_cast<std::uint32_t>(on_air.size()),
                                    sole_nonempty);

    std::size_t delivered_index = members.size();
    if (msg.kind == Observed::Update) {
      delivered_index = on_air.front();
      TerminalProtoState& ts = members[delivered_index].state;
      ts.aoi = t - ts.packet_slot;  // +1 applied with everyone below
      ts.packet_slot = -1;
    }

    for (std::size_t i = 0; i < members.size(); ++i) {
      const bool transmitted = std::find(on_air.begin(), on_air.end(), i) != on_air.end();
      terminal_feedback(members[i].state, msg, transmitted);
      if (i != delivered_index) members[i].state.aoi += 1;
    }
    if (delivered_index < members.size()) members[delivered_index].state.aoi += 1;

    switch (msg.kind) {
      case Observed::Update: out.updates += 1; break;
      case Observed::Blank: out.blanks += 1; break;
      case Observed::Collision: out.collisions += 1; break;
      case Observed::Nothing: break;
    }

    if (cfg.keep_trace) {
      DrrTraceRow row;
      row.slot = t;
      for (std::size_t i : on_air) row.transmitters.push_back(members[i].state.id);
      std::sort(row.transmitters.begin(), row.transmitters.end());
      row.feedback = msg.kind;
      row.bs_count = bs.terminal_count;
      row.bs_spot = bs.spot;
      out.trace.push_back(std::move(row));
    }

    if (t > cfg.warmup && !members.empty()) {
      double slot_sum = 0.0;
      for (const Member& m : members) slot_sum += static_cast<double>(m.state.aoi);
      aoi_sum += slot_sum / static_cast<double>(members.size());
      aoi_slots += 1;
    }
  }

  out.avg_aoi = aoi_slots > 0 ? aoi_sum / static_cast<double>(aoi_slots) : 0.0;
  return out;
}

}  // namespace aoisim

#include "aoisim/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aoisim {

void ScenarioConfig::validate() const {
  if (n_terminals == 0) throw std::invalid_argument("n_terminals must be >= 1");
  if (arrival_rates.size() != n_terminals)
    throw std::invalid_argument("arrival_rates must list one rate per terminal (got " +
                                std::to_string(arrival_rates.size()) + " for " +
                                std::to_string(n_terminals) + " terminals)");
  for (double r : arrival_rates)
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("arrival rates must lie in [0, 1]");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (effective_warmup() < 0 || effective_warmup() >= horizon)
    throw std::invalid_argument("warmup must lie in [0, horizon)");
}

SystemState::SystemState(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  term_.resize(cfg_.n_terminals);
  arrival_rng_.reserve(cfg_.n_terminals);
  for (std::uint32_t n = 0; n < cfg_.n_terminals; ++n)
    arrival_rng_.emplace_back(cfg_.seed, n);
  sched_rng_ = RngStream(cfg_.seed, cfg_.n_terminals);
}

void SystemState::advance(std::span<const std::uint32_t> decision, SlotOutcome& out) {
  const std::int64_t t = slot_;
  out.slot = t;
  out.scheduled.assign(decision.begin(), decision.end());
  out.delivered.clear();
  out.collided = false;
  out.blank = false;

  // Arrivals.  Every terminal consumes exactly one draw per slot so that
  // runs with different channel modes or replayed decisions stay coupled.
  for (std::uint32_t n = 0; n < cfg_.n_terminals; ++n) {
    if (!arrival_rng_[n].bernoulli(cfg_.arrival_rates[n])) continue;
    auto& q = term_[n].queue;
    if (cfg_.buffer == BufferKind::OnePacket) q.clear();  // keep the freshest
    q.push_back(t);
    if (static_cast<std::int64_t>(q.size()) > kQueueGuard)
      throw std::runtime_error("terminal " + std::to_string(n) + " queue exceeded " +
                               std::to_string(kQueueGuard) + " packets at slot " +
                               std::to_string(t) + "; arrival rate outpaces service");
  }

  // Transmission.  A delivered terminal's age is set to one below the
  // packet's end-of-slot age here; the uniform +1 below lands it exactly.
  auto deliver = [&](std::uint32_t k) {
    TerminalState& term = term_[k];
    const std::int64_t age = term.head_age(t);
    out.delivered.push_back({k, age, term.aoi + 1});
    term.queue.pop_front();
    term.aoi = age - 1;
  };

  if (cfg_.mode == Mode::A1) {
    // Interference-free channel: every scheduled terminal with a packet
    // delivers this slot.
    for (std::uint32_t k : decision) {
      if (term_[k].has_packet())
        deliver(k);
      else
        out.blank = true;
    }
  } else if (decision.size() >= 2) {
    out.collided = true;  // nothing gets through, buffers are untouched
  } else if (decision.size() == 1) {
    const std::uint32_t k = decision.front();
    TerminalState& term = term_[k];
    if (cfg_.mode == Mode::A0) {
      // Free-update channel: an uncontended transmission refreshes the
      // terminal regardless of its buffer, consuming the head if present.
      out.delivered.push_back({k, 1, term.aoi + 1});
      if (term.has_packet()) term.queue.pop_front();
      term.aoi = 0;
    } else if (term.has_packet()) {
      deliver(k);
    } else {
      out.blank = true;
    }
  }

  // Ageing: every terminal's end-of-slot age is one above its previous
  // value except where a delivery just rebased it.  Scheduling resets the
  // idle counter even for collided or empty transmissions.
  for (auto& term : term_) {
    term.aoi += 1;
    term.since_service += 1;
  }
  for (std::uint32_t k : decision) term_[k].since_service = 0;

  slot_ = t + 1;
}

}  // namespace aoisim

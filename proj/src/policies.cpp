#include "aoisim/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aoisim {

void PolicySpec::validate(std::uint32_t n_terminals) const {
  if (kind == PolicyKind::RrLambda) {
    if (beta.size() != n_terminals)
      throw std::invalid_argument("rr_lambda needs one beta share per terminal");
    double total = 0.0;
    for (double b : beta) {
      if (!(b >= 0.0 && b <= 1.0))
        throw std::invalid_argument("beta shares must lie in [0, 1]");
      total += b;
    }
    if (total > 1.0 + 1e-9)
      throw std::invalid_argument("beta shares must sum to at most 1");
  } else if (!beta.empty()) {
    throw std::invalid_argument("beta is only meaningful for rr_lambda");
  }
  if (kind == PolicyKind::FixedSequence) {
    if (sequence.empty())
      throw std::invalid_argument("fixed_sequence needs a nonempty schedule");
    for (std::uint32_t k : sequence)
      if (k >= n_terminals)
        throw std::invalid_argument("fixed_sequence entry " + std::to_string(k) +
                                    " is out of range");
  } else if (!sequence.empty()) {
    throw std::invalid_argument("sequence is only meaningful for fixed_sequence");
  }
}

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "rr_one") return PolicyKind::RrOne;
  if (name == "un_one") return PolicyKind::UnOne;
  if (name == "age_greedy") return PolicyKind::AgeGreedy;
  if (name == "myopic_gsi") return PolicyKind::MyopicGsi;
  if (name == "rr_lambda") return PolicyKind::RrLambda;
  if (name == "fixed_sequence") return PolicyKind::FixedSequence;
  throw std::invalid_argument("unknown policy '" + name + "'");
}

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::RrOne: return "rr_one";
    case PolicyKind::UnOne: return "un_one";
    case PolicyKind::AgeGreedy: return "age_greedy";
    case PolicyKind::MyopicGsi: return "myopic_gsi";
    case PolicyKind::RrLambda: return "rr_lambda";
    case PolicyKind::FixedSequence: return "fixed_sequence";
  }
  return "?";
}

std::uint32_t rr_one_pick(std::span<const std::int64_t> since_service) {
  std::uint32_t best = 0;
  for (std::uint32_t n = 1; n < since_service.size(); ++n)
    if (since_service[n] > since_service[best]) best = n;
  return best;
}

std::uint32_t un_one_pick(std::uint32_t n, RngStream& rng) {
  return static_cast<std::uint32_t>(rng.below(n));
}

std::uint32_t age_greedy_pick(std::span<const std::int64_t> aoi) {
  std::uint32_t best = 0;
  for (std::uint32_t n = 1; n < aoi.size(); ++n)
    if (aoi[n] > aoi[best]) best = n;
  return best;
}

std::uint32_t myopic_gsi_pick(std::span<const std::int64_t> aoi,
                              std::span<const std::int64_t> head_age,
                              std::span<const double> arrival_rates,
                              BufferKind buffer) {
  // Expected end-of-slot age of terminal n if it alone is scheduled, minus
  // the age it reaches unserved (aoi[n] + 1).  A buffered one-packet
  // terminal delivers a same-slot arrival (age 1) when one lands, else its
  // stored packet one slot older; an FCFS head cannot be displaced.  Empty
  // terminals only profit from a same-slot arrival, either way.
  std::uint32_t best = 0;
  double best_gain = -1.0;
  for (std::uint32_t n = 0; n < aoi.size(); ++n) {
    const double lam = arrival_rates[n];
    const double unserved = static_cast<double>(aoi[n]) + 1.0;
    double served;
    if (head_age[n] == 0) {
      served = lam * 1.0 + (1.0 - lam) * unserved;
    } else if (buffer == BufferKind::FcfsInfinite) {
      served = static_cast<double>(head_age[n]) + 1.0;
    } else {
      served = lam * 1.0 + (1.0 - lam) * (static_cast<double>(head_age[n]) + 1.0);
    }
    const double gain = unserved - served;
    if (gain > best_gain) {
      best_gain = gain;
      best = n;
    }
  }
  return best;
}

RrLambdaState::RrLambdaState(std::vector<double> beta) : beta_(std::move(beta)) {
  deficit_.assign(beta_.size(), 0.0);
}

std::uint32_t RrLambdaState::step() {
  std::uint32_t best = 0;
  for (std::uint32_t n = 0; n < beta_.size(); ++n) {
    deficit_[n] += beta_[n];
    if (deficit_[n] > deficit_[best]) best = n;
  }
  if (deficit_[best] <= 0.0) return npos;  // every share is ahead of target
  deficit_[best] -= 1.0;
  return best;
}

Scheduler::Scheduler(PolicySpec spec, std::uint32_t n_terminals)
    : spec_(std::move(spec)), n_(n_terminals) {
  spec_.validate(n_);
  if (spec_.kind == PolicyKind::RrLambda) drr_.emplace_back(spec_.beta);
  scratch_age_.resize(n_);
  scratch_head_.resize(n_);
}

void Scheduler::decide(SystemState& sys, std::vector<std::uint32_t>& decision) {
  switch (spec_.kind) {
    case PolicyKind::RrOne: {
      for (std::uint32_t n = 0; n < n_; ++n)
        scratch_age_[n] = sys.terminals()[n].since_service;
      decision.push_back(rr_one_pick(scratch_age_));
      break;
    }
    case PolicyKind::UnOne:
      decision.push_back(un_one_pick(n_, sys.scheduler_rng()));
      break;
    case PolicyKind::AgeGreedy: {
      for (std::uint32_t n = 0; n < n_; ++n)
        scratch_age_[n] = sys.terminals()[n].aoi;
      decision.push_back(age_greedy_pick(scratch_age_));
      break;
    }
    case PolicyKind::MyopicGsi: {
      // Ages as of the end of the previous slot; this slot's arrivals have
      // not been drawn yet.
      const std::int64_t prev = sys.now() - 1;
      for (std::uint32_t n = 0; n < n_; ++n) {
        scratch_age_[n] = sys.terminals()[n].aoi;
        scratch_head_[n] = sys.terminals()[n].head_age(prev);
      }
      decision.push_back(myopic_gsi_pick(scratch_age_, scratch_head_,
                                         sys.config().arrival_rates,
                                         sys.config().buffer));
      break;
    }
    case PolicyKind::RrLambda: {
      const std::uint32_t pick = drr_.front().step();
      if (pick != RrLambdaState::npos) decision.push_back(pick);
      break;
    }
    case PolicyKind::FixedSequence: {
      decision.push_back(spec_.sequence[seq_pos_]);
      seq_pos_ = (seq_pos_ + 1) % spec_.sequence.size();
      break;
    }
  }
}

}  // namespace aoisim

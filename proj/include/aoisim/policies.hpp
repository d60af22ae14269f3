#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aoisim/core.hpp"

namespace aoisim {

enum class PolicyKind {
  RrOne,          // round robin: schedule the terminal idle the longest
  UnOne,          // uniform random single pick
  AgeGreedy,      // schedule the terminal with the largest AoI
  MyopicGsi,      // maximize the expected one-slot AoI drop
  RrLambda,       // deficit round robin with target rates beta
  FixedSequence,  // cycle through an explicit schedule
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::RrOne;
  std::vector<double> beta;             // RrLambda share per terminal
  std::vector<std::uint32_t> sequence;  // FixedSequence entries

  void validate(std::uint32_t n_terminals) const;  // throws std::invalid_argument
};

PolicyKind policy_kind_from_name(const std::string& name);
const char* policy_name(PolicyKind kind);

// Single-slot pick rules.  Each returns the chosen terminal index; ties break
// toward the lowest index so runs are reproducible.
std::uint32_t rr_one_pick(std::span<const std::int64_t> since_service);
std::uint32_t un_one_pick(std::uint32_t n, RngStream& rng);
std::uint32_t age_greedy_pick(std::span<const std::int64_t> aoi);

// Expected one-slot AoI reduction maximizer.  head_age[n] is the end-of-slot
// age of terminal n's transmittable packet (0 when its buffer is empty).
// With one-packet buffers a fresh arrival can displace the buffered packet,
// so empty terminals still carry value lambda * h; under FCFS the head is
// fixed and empty terminals gain nothing this slot.
std::uint32_t myopic_gsi_pick(std::span<const std::int64_t> aoi,
                              std::span<const std::int64_t> head_age,
                              std::span<const double> arrival_rates,
                              BufferKind buffer);

// Deficit round robin: each slot every deficit grows by beta[n]; if the
// largest deficit is positive that terminal is scheduled and pays 1, else
// the slot idles.  Guarantees |served(T)/T - beta[n]| <= 1/T for all T.
class RrLambdaState {
 public:
  explicit RrLambdaState(std::vector<double> beta);

  // Returns the scheduled terminal or npos for an idle slot.
  static constexpr std::uint32_t npos = static_cast<std::uint32_t>(-1);
  std::uint32_t step();

  std::span<const double> deficits() const { return deficit_; }

 private:
  std::vector<double> beta_;
  std::vector<double> deficit_;
};

// Stateful wrapper turning a PolicySpec into per-slot decision sets over a
// SystemState.  Only reads the observables each policy is defined on.
class Scheduler {
 public:
  Scheduler(PolicySpec spec, std::uint32_t n_terminals);

  // Appends the slot's decision (0 or 1 terminals) to `decision`.  Takes the
  // system mutably only for the scheduler's random stream.
  void decide(SystemState& sys, std::vector<std::uint32_t>& decision);

  const PolicySpec& spec() const { return spec_; }

 private:
  PolicySpec spec_;
  std::uint32_t n_;
  std::size_t seq_pos_ = 0;
  std::vector<RrLambdaState> drr_;  // 0 or 1 entries
  std::vector<std::int64_t> scratch_age_;
  std::vector<std::int64_t> scratch_head_;
};

}  // namespace aoisim

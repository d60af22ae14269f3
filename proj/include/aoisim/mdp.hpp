#pragma once

#include <cstdint>
#include <vector>

namespace aoisim {

struct MdpOptions {
  std::int64_t h_max = 0;        // AoI truncation (ages cap here); 0 = automatic
  double span_tol = 1e-9;        // stop when max-min of the update gap closes
  int max_iterations = 200000;
  double damping = 0.9;          // weight kept on real transitions; the rest
                                 // becomes a self-loop, breaking periodicity
};

struct RviResult {
  double gain = 0.0;  // optimal long-run average AoI (mean of two terminals)
  double span = 0.0;  // final span of the value update (convergence witness)
  int iterations = 0;
  std::vector<std::uint8_t> policy;  // greedy action per state: 0/1 = terminal
  std::vector<double> bias;          // relative values, bias[ref] == 0
};

// Average-cost model of two terminals with one-packet buffers sharing one
// collision-free slot per step; the controller sees each terminal's AoI h
// and buffered-packet age a (a == 0 when empty, else 1 <= a < h).  States
// are the reachable pairs packed per terminal as k = h(h-1)/2 + a and
// combined as s = k1 * K + k2.
class TwoTerminalMdp {
 public:
  TwoTerminalMdp(double lambda1, double lambda2, std::int64_t h_max);

  std::size_t state_count() const { return k_count_ * k_count_; }
  std::int64_t h_max() const { return h_max_; }

  // Relative value iteration with a damping transform that keeps the gain
  // and greedy policy while breaking periodicity (needed at lambda == 1).
  // Throws std::runtime_error when the span bracket fails to close.
  RviResult solve(const MdpOptions& opts) const;

  // Average AoI of a fixed stationary policy, from the same transition
  // model, via power iteration on the lazy chain (I + P)/2.  Used to
  // cross-check the RVI gain and to measure truncation spill.
  struct PolicyEvaluation {
    double average_cost = 0.0;
    double boundary_mass = 0.0;  // stationary probability of a capped age
    int iterations = 0;
  };
  PolicyEvaluation evaluate(const std::vector<std::uint8_t>& policy,
                            double tol, int max_iterations) const;

  // State packing helpers (exposed for tests).
  std::size_t pack(std::int64_t h1, std::int64_t a1, std::int64_t h2,
                   std::int64_t a2) const;
  void unpack(std::size_t s, std::int64_t& h1, std::int64_t& a1,
              std::int64_t& h2, std::int64_t& a2) const;

 private:
  double lambda_[2];
  std::int64_t h_max_;
  std::size_t k_count_;  // reachable (h, a) pairs per terminal

  // Per-terminal successor tables indexed by k:
  //   unserved, no arrival / unserved, arrival / served, no arrival /
  //   served, arrival.  Serving with a == 0 is a blank slot (age keeps
  //   growing); the arrival branch of a served terminal lands on k == 0
  //   because the fresh packet goes out in the same slot.
  std::vector<std::uint32_t> grow0_, grow1_, serve0_, serve1_;
  std::vector<double> cost_served_;    // expected next age of the served terminal
  std::vector<double> cost_unserved_;  // next age of an unserved terminal
  void build_tables();
};

struct TruncationAudit {
  bool passed = false;
  double boundary_mass = 0.0;
  double policy_gain = 0.0;  // evaluation of the greedy policy; near the RVI gain
};

// h_max heuristic: geometric age tails thin at rate (1 - lambda_min), so
// pick the depth where the tail drops below 1e-7, clamped to [12, 120].
std::int64_t suggested_h_max(double lambda1, double lambda2);

struct AutoSolveResult {
  RviResult rvi;
  TruncationAudit audit;
  std::int64_t h_max_used = 0;
};

// Solves at suggested_h_max, audits the truncation, and doubles the cap
// (within the 120 ceiling) until the boundary mass is negligible.
AutoSolveResult solve_two_terminal_auto(double lambda1, double lambda2,
                                        const MdpOptions& base = {});

}  // namespace aoisim

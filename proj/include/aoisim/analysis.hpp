#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aoisim {

// Exact time-average AoI of single-terminal-per-slot round robin with
// one-packet buffers: (1/N) * sum_n 1/lambda_n + (N-1)/2.
// Returns +inf if any rate is zero.
double rr_one_avg_aoi(std::span<const double> arrival_rates);

struct LowerBounds {
  double collision_floor;  // (N+1)/2: no policy on a collision channel beats this
  double arrival_floor;    // (1/N) * sum 1/lambda_n: sampling-limited floor
};
LowerBounds aoi_lower_bounds(std::span<const double> arrival_rates);

// Uniform random single scheduling cannot average below N (symmetric rates).
double un_one_floor(std::uint32_t n_terminals);

// Stationary law of one terminal's AoI under round robin with rate lambda:
//   mu(j) = (1 - (1-lambda)^j) / N                     for 1 <= j <= N
//   mu(j) = (1-lambda)^(j-N) * (1 - (1-lambda)^N) / N  for j >= N+1
// pmf stores 1..j_max; the geometric tail beyond j_max is kept in closed
// form so mean() and total() are exact, not truncated.
struct StationaryDistribution {
  std::uint32_t n = 0;
  double rate = 0.0;
  std::int64_t j_max = 0;
  std::vector<double> pmf;  // pmf[j-1] = mu(j), j = 1..j_max
  double tail_mass = 0.0;   // sum_{j > j_max} mu(j)

  double mass(std::int64_t j) const;
  double mean() const;   // exact first moment including the analytic tail
  double total() const;  // pmf sum + tail_mass (== 1 up to rounding)
};

StationaryDistribution rr_one_stationary(double rate, std::uint32_t n_terminals,
                                         std::int64_t j_max);

// Age of the packet a terminal transmits when served every N-th slot:
// geometric, result[j-1] = P(age = j) = lambda * (1-lambda)^(j-1) for
// 1 <= j <= N, and result[N] = (1-lambda)^N is the empty-buffer mass.
std::vector<double> terminal_age_pmf(double rate, std::uint32_t n_terminals);

// Mean peak age of an FCFS terminal sampled at Bernoulli(lambda) and served
// as a deterministic once-per-1/beta rotation: 1/lambda + (1/(beta-lambda)
// + 1/beta) / 2.  Requires beta > lambda.
double paoi_deterministic_service(double lambda, double beta);

// Sum over terminals of the expression above; the objective the rate solver
// minimizes subject to sum beta = 1.
double rate_objective(std::span<const double> lambda, std::span<const double> beta);

// Closed-form near-saturation allocation beta_n = eps/N + lambda_n with
// eps = 1 - sum lambda, and the bound it certifies.
std::vector<double> heavy_traffic_beta(std::span<const double> lambda);
double heavy_traffic_bound(std::span<const double> lambda);

// Two-slot, two-terminal scheduling instance on which the one-step greedy
// rule is strictly beaten by serving the other terminal first.  Terminal 1
// holds a packet whose delivery cuts its age by g1, terminal 2 one worth
// g2; h1, h2 are the starting ages; terminal 1 receives a fresh packet each
// slot with probability delta and terminal 2 with probability 1 - delta.  A
// fresh packet replaces the held one and is worth the owner's age at the
// end of its arrival slot.  Value is the expected mean of the two
// terminals' ages at the ends of the two slots.
struct TwoSlotCase {
  double delta;
  double g1, g2;
  double h1, h2;

  // Constraints under which the closed forms below equal exhaustive
  // enumeration: g2/2 < g1 < g2, h2 - g2 > h1, 0 < delta < 1, and the
  // slot-2 greedy comparisons must stay put: h2 + 1 - g2 >= g1 and
  // g2 >= h1 + 1.
  void validate() const;  // throws std::invalid_argument
};

struct TwoSlotComparison {
  double myopic;       // value of the greedy schedule (serve 2 first)
  double alternative;  // value of serving 1 first
  double gap;          // alternative advantage: myopic - alternative > 0
};

TwoSlotComparison myopic_two_slot_comparison(const TwoSlotCase& c);

}  // namespace aoisim

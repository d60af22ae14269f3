#include "aoisim/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoisim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double rr_one_avg_aoi(std::span<const double> arrival_rates) {
  const double n = static_cast<double>(arrival_rates.size());
  if (arrival_rates.empty()) throw std::invalid_argument("need at least one rate");
  double inv_sum = 0.0;
  for (double r : arrival_rates) {
    if (r <= 0.0) return kInf;
    inv_sum += 1.0 / r;
  }
  return inv_sum / n + (n - 1.0) / 2.0;
}

LowerBounds aoi_lower_bounds(std::span<const double> arrival_rates) {
  const double n = static_cast<double>(arrival_rates.size());
  if (arrival_rates.empty()) throw std::invalid_argument("need at least one rate");
  double inv_sum = 0.0;
  bool infinite = false;
  for (double r : arrival_rates) {
    if (r <= 0.0)
      infinite = true;
    else
      inv_sum += 1.0 / r;
  }
  return {(n + 1.0) / 2.0, infinite ? kInf : inv_sum / n};
}

double un_one_floor(std::uint32_t n_terminals) {
  return static_cast<double>(n_terminals);
}

double StationaryDistribution::mass(std::int64_t j) const {
  if (j < 1) return 0.0;
  const double q = 1.0 - rate;
  const double nn = static_cast<double>(n);
  if (j <= static_cast<std::int64_t>(n))
    return (1.0 - std::pow(q, static_cast<double>(j))) / nn;
  return std::pow(q, static_cast<double>(j - n)) * (1.0 - std::pow(q, nn)) / nn;
}

double StationaryDistribution::mean() const {
  double m = 0.0;
  for (std::int64_t j = 1; j <= j_max; ++j)
    m += static_cast<double>(j) * pmf[static_cast<std::size_t>(j - 1)];
  const double q = 1.0 - rate;
  if (q > 0.0) {
    // sum_{j > j_max} j * q^(j-n) * (1-q^n) / n, via
    // sum_{j >= m} j q^j = q^m (m(1-q) + q) / (1-q)^2.
    const double c = (1.0 - std::pow(q, static_cast<double>(n))) / static_cast<double>(n);
    const double m0 = static_cast<double>(j_max + 1);
    m += c * std::pow(q, m0 - static_cast<double>(n)) *
         (m0 * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q));
  }
  return m;
}

double StationaryDistribution::total() const {
  double t = tail_mass;
  for (double p : pmf) t += p;
  return t;
}

StationaryDistribution rr_one_stationary(double rate, std::uint32_t n_terminals,
                                         std::int64_t j_max) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw std::invalid_argument("stationary age law needs a rate in (0, 1]");
  if (n_terminals == 0) throw std::invalid_argument("need at least one terminal");
  if (j_max < static_cast<std::int64_t>(n_terminals))
    throw std::invalid_argument("j_max must be at least the terminal count");

  StationaryDistribution d;
  d.n = n_terminals;
  d.rate = rate;
  d.j_max = j_max;
  d.pmf.resize(static_cast<std::size_t>(j_max));
  for (std::int64_t j = 1; j <= j_max; ++j)
    d.pmf[static_cast<std::size_t>(j - 1)] = d.mass(j);

  const double q = 1.0 - rate;
  if (q > 0.0) {
    const double nn = static_cast<double>(n_terminals);
    d.tail_mass = (1.0 - std::pow(q, nn)) / nn *
                  std::pow(q, static_cast<double>(j_max + 1 - n_terminals)) / (1.0 - q);
  }
  return d;
}

std::vector<double> terminal_age_pmf(double rate, std::uint32_t n_terminals) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw std::invalid_argument("age law needs a rate in (0, 1]");
  std::vector<double> p(n_terminals + 1, 0.0);
  const double q = 1.0 - rate;
  for (std::uint32_t j = 1; j <= n_terminals; ++j)
    p[j - 1] = rate * std::pow(q, static_cast<double>(j - 1));
  p[n_terminals] = std::pow(q, static_cast<double>(n_terminals));
  return p;
}

double paoi_deterministic_service(double lambda, double beta) {
  if (!(lambda > 0.0)) throw std::invalid_argument("arrival rate must be positive");
  if (!(beta > lambda))
    throw std::invalid_argument("service share must exceed the arrival rate");
  return 1.0 / lambda + 0.5 * (1.0 / (beta - lambda) + 1.0 / beta);
}

double rate_objective(std::span<const double> lambda, std::span<const double> beta) {
  if (lambda.size() != beta.size())
    throw std::invalid_argument("rate and share vectors must have equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    total += paoi_deterministic_service(lambda[i], beta[i]);
  return total;
}

std::vector<double> heavy_traffic_beta(std::span<const double> lambda) {
  double sum = 0.0;
  for (double l : lambda) {
    if (!(l > 0.0)) throw std::invalid_argument("arrival rates must be positive");
    sum += l;
  }
  const double eps = 1.0 - sum;
  if (!(eps > 0.0))
    throw std::invalid_argument("arrival rates must leave spare capacity (sum < 1)");
  std::vector<double> beta(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    beta[i] = eps / static_cast<double>(lambda.size()) + lambda[i];
  return beta;
}

double heavy_traffic_bound(std::span<const double> lambda) {
  const std::vector<double> beta = heavy_traffic_beta(lambda);
  return rate_objective(lambda, beta);
}

void TwoSlotCase::validate() const {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie strictly inside (0, 1)");
  if (!(g2 > 0.0 && h1 > 0.0 && h2 > 0.0))
    throw std::invalid_argument("ages and gains must be positive");
  if (!(g2 / 2.0 < g1 && g1 < g2))
    throw std::invalid_argument("need g2/2 < g1 < g2");
  if (!(h2 - g2 > h1)) throw std::invalid_argument("need h2 - g2 > h1");
  // Pin the slot-2 argmax in every branch of the two-slot tree so the
  // closed forms below track the realized greedy choice exactly (at
  // equality the contending gains coincide, so either choice scores the
  // same).
  if (!(h2 + 1.0 - g2 >= g1)) throw std::invalid_argument("need h2 + 1 - g2 >= g1");
  if (!(g2 >= h1 + 1.0)) throw std::invalid_argument("need g2 >= h1 + 1");
}

TwoSlotComparison myopic_two_slot_comparison(const TwoSlotCase& c) {
  c.validate();
  const double d = c.delta, g1 = c.g1, g2 = c.g2, h1 = c.h1, h2 = c.h2;
  const double dd = d * (1.0 - d);

  // Total expected age reduction over both slots, split by the second
  // slot's arrival pattern, when the first slot serves the bigger gain g2.
  const double r_myopic = g2 + dd * (h2 + 1.0) + d * d * (g2 + h1 + 1.0) +
                          dd * (g1 + g2) + (1.0 - d) * (1.0 - d) * (h2 + 1.0);
  // Same when the first slot serves terminal 1, leaving g2 in play.
  const double r_alt = g1 + dd * (g1 + h2 + 1.0) + d * d * (g1 + g2) +
                       dd * (g1 + g2) + (1.0 - d) * (1.0 - d) * (g1 + h2 + 1.0);

  const double base = (h1 + h2) / 2.0 + 1.5;
  TwoSlotComparison out;
  out.myopic = base - r_myopic / 4.0;
  out.alternative = base - r_alt / 4.0;
  out.gap = out.myopic - out.alternative;
  return out;
}

}  // namespace aoisim

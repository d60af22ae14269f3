#include "aoisim/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "aoisim/analysis.hpp"

namespace aoisim {

namespace {

// Marginal cost slope magnitude: g(beta) = (beta-lambda)^-2 + beta^-2,
// strictly decreasing on beta > lambda from +inf to 0.
double slope(double beta, double lambda) {
  const double d = beta - lambda;
  return 1.0 / (d * d) + 1.0 / (beta * beta);
}

// Unique beta > lambda with slope(beta) == 2 nu.  The root lies in
// [lambda + 1/sqrt(2 nu), lambda + 1/sqrt(nu)]: the first term of g alone
// forces the lower end, and at the upper end g <= nu + nu.
double beta_for_multiplier(double lambda, double nu, int max_inner) {
  double lo = lambda + 1.0 / std::sqrt(2.0 * nu);
  double hi = lambda + 1.0 / std::sqrt(nu);
  for (int i = 0; i < max_inner && hi - lo > 1e-16 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid, lambda) > 2.0 * nu)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RateSolution solve_rates(std::span<const double> lambda, const RateSolveOptions& opts) {
  if (lambda.empty()) throw std::invalid_argument("need at least one terminal");
  double sum_lambda = 0.0;
  for (double l : lambda) {
    if (!(l > 0.0)) throw std::invalid_argument("arrival rates must be positive");
    sum_lambda += l;
  }
  if (!(sum_lambda <= 1.0 - 1e-9))
    throw std::invalid_argument("arrival rates admit no stable shares (sum >= 1)");

  const std::size_t n = lambda.size();
  const auto share_sum = [&](double nu, std::vector<double>& beta) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      beta[i] = beta_for_multiplier(lambda[i], nu, opts.max_inner);
      s += beta[i];
    }
    return s;
  };

  std::vector<double> beta(n);
  RateSolution out;

  // The total share sum is strictly decreasing in the multiplier, from
  // +inf at nu -> 0 down to sum(lambda) < 1, so one sign change brackets
  // the budget.  Seed near the saturation guess (beta - lambda ~ eps/N).
  const double eps = 1.0 - sum_lambda;
  double nu_seed = 0.5 * (static_cast<double>(n) / eps) * (static_cast<double>(n) / eps);
  double nu_lo = nu_seed, nu_hi = nu_seed;  // lo: sum >= 1; hi: sum <= 1
  int used = 0;
  while (share_sum(nu_lo, beta) < 1.0) {
    nu_lo *= 0.5;
    if (++used > opts.max_outer)
      throw std::runtime_error("share solver failed to bracket the budget from below");
  }
  while (share_sum(nu_hi, beta) > 1.0) {
    nu_hi *= 2.0;
    if (++used > opts.max_outer)
      throw std::runtime_error("share solver failed to bracket the budget from above");
  }

  double nu = nu_seed, gap = 0.0;
  bool converged = false;
  for (int i = 0; i < opts.max_outer; ++i) {
    nu = 0.5 * (nu_lo + nu_hi);
    const double s = share_sum(nu, beta);
    gap = s - 1.0;
    ++used;
    if (std::fabs(gap) <= opts.tol) {
      converged = true;
      break;
    }
    if (s > 1.0)
      nu_lo = nu;
    else
      nu_hi = nu;
  }
  if (!converged)
    throw std::runtime_error("share solver: budget residual " + std::to_string(gap) +
                             " after " + std::to_string(used) + " iterations");

  out.beta = beta;
  out.objective = rate_objective(lambda, beta);
  out.multiplier = nu;
  out.iterations = used;
  out.sum_gap = std::fabs(gap);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::fabs(slope(beta[i], lambda[i]) - 2.0 * nu) / (2.0 * nu);
    if (r > worst) worst = r;
  }
  out.kkt_residual = worst;
  return out;
}

}  // namespace aoisim

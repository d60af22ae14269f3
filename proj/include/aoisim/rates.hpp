#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aoisim {

struct RateSolveOptions {
  double tol = 1e-10;     // on |sum beta - 1|
  int max_outer = 200;    // bisection steps on the multiplier
  int max_inner = 200;    // bisection steps per per-terminal stationarity solve
};

struct RateSolution {
  std::vector<double> beta;
  double objective = 0.0;      // sum of per-terminal mean peak ages
  double multiplier = 0.0;     // shared dual variable at the optimum
  int iterations = 0;          // outer bisection steps used
  double kkt_residual = 0.0;   // max_n |d/dbeta_n - 2 nu| / (2 nu)
  double sum_gap = 0.0;        // |sum beta - 1| actually achieved
};

// Minimizes sum_n [ 1/lambda_n + (1/(beta_n - lambda_n) + 1/beta_n) / 2 ]
// over beta > lambda with sum beta = 1.  Strictly convex, so the
// stationarity system  (beta_n - lambda_n)^-2 + beta_n^-2 = 2 nu  with a
// scalar nu picked to satisfy the budget has a unique root; both levels are
// solved by bisection on monotone brackets.  Throws std::invalid_argument
// when sum lambda >= 1 (no feasible allocation) and std::runtime_error if
// the bracket logic fails to converge inside the iteration caps.
RateSolution solve_rates(std::span<const double> lambda,
                         const RateSolveOptions& opts = {});

}  // namespace aoisim

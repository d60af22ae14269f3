#include "aoisim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoisim {

namespace {
// Expected slots for a geometric age tail to drop below 1e-7, padded; keeps
// the truncated model's boundary states effectively unreachable.
constexpr double kTailMass = 1e-7;
constexpr std::int64_t kMinH = 12;
constexpr std::int64_t kMaxH = 120;
}  // namespace

std::int64_t suggested_h_max(double lambda1, double lambda2) {
  const double q = 1.0 - std::min(lambda1, lambda2);
  std::int64_t h = kMinH;
  if (q > 0.0 && q < 1.0)
    h = static_cast<std::int64_t>(std::ceil(std::log(kTailMass) / std::log(q))) + 3;
  return std::clamp(h, kMinH, kMaxH);
}

TwoTerminalMdp::TwoTerminalMdp(double lambda1, double lambda2, std::int64_t h_max)
    : lambda_{lambda1, lambda2}, h_max_(h_max) {
  for (double l : lambda_)
    if (!(l > 0.0 && l <= 1.0))
      throw std::invalid_argument("arrival rates must lie in (0, 1]");
  if (h_max_ < 2 || h_max_ > kMaxH)
    throw std::invalid_argument("h_max must lie in [2, " + std::to_string(kMaxH) + "]");
  k_count_ = static_cast<std::size_t>(h_max_ * (h_max_ + 1) / 2);
  build_tables();
}

std::size_t TwoTerminalMdp::pack(std::int64_t h1, std::int64_t a1, std::int64_t h2,
                                 std::int64_t a2) const {
  const auto k = [](std::int64_t h, std::int64_t a) {
    return static_cast<std::size_t>(h * (h - 1) / 2 + a);
  };
  return k(h1, a1) * k_count_ + k(h2, a2);
}

void TwoTerminalMdp::unpack(std::size_t s, std::int64_t& h1, std::int64_t& a1,
                            std::int64_t& h2, std::int64_t& a2) const {
  const auto split = [](std::size_t k, std::int64_t& h, std::int64_t& a) {
    h = static_cast<std::int64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
    while (h * (h - 1) / 2 > static_cast<std::int64_t>(k)) --h;
    while ((h + 1) * h / 2 <= static_cast<std::int64_t>(k)) ++h;
    a = static_cast<std::int64_t>(k) - h * (h - 1) / 2;
  };
  split(s / k_count_, h1, a1);
  split(s % k_count_, h2, a2);
}

void TwoTerminalMdp::build_tables() {
  const std::size_t K = k_count_;
  grow0_.resize(K);
  grow1_.resize(K);
  serve0_.resize(K);
  serve1_.assign(K, 0);  // a same-slot arrival is delivered fresh: (h, a) -> (1, 0)
  cost_served_.resize(2 * K);
  cost_unserved_.resize(K);

  const auto k_of = [](std::int64_t h, std::int64_t a) {
    return static_cast<std::uint32_t>(h * (h - 1) / 2 + a);
  };
  for (std::int64_t h = 1; h <= h_max_; ++h) {
    for (std::int64_t a = 0; a < h; ++a) {
      const std::uint32_t k = k_of(h, a);
      const std::int64_t h_up = std::min(h + 1, h_max_);
      // Unserved: the age grows; a held packet ages with it (a fresh
      // arrival replaces it at age 1).  The cap keeps a < h intact.
      grow0_[k] = k_of(h_up, a >= 1 ? std::min(a + 1, h_up - 1) : 0);
      grow1_[k] = k_of(h_up, 1);
      // Served without an arrival: deliver the held packet (one slot older
      // by delivery time) or blank if the buffer is empty.
      const std::int64_t h_served = a >= 1 ? a + 1 : h_up;
      serve0_[k] = k_of(h_served, 0);
      for (int i = 0; i < 2; ++i)
        cost_served_[static_cast<std::size_t>(i) * K + k] =
            lambda_[i] * 1.0 + (1.0 - lambda_[i]) * static_cast<double>(h_served);
      cost_unserved_[k] = static_cast<double>(h_up);
    }
  }
}

RviResult TwoTerminalMdp::solve(const MdpOptions& opts) const {
  const std::size_t K = k_count_;
  const std::size_t S = K * K;
  const double l1 = lambda_[0], l2 = lambda_[1];
  const double tau = opts.damping;
  if (!(tau > 0.0 && tau <= 1.0))
    throw std::invalid_argument("damping must lie in (0, 1]");

  std::vector<double> v(S, 0.0), w(S, 0.0);
  // Next-age when served and no arrival lands, per packed terminal state.
  std::vector<std::uint32_t> s0h(K);
  std::vector<std::size_t> row_of_h(static_cast<std::size_t>(h_max_) + 1);
  for (std::int64_t h = 1; h <= h_max_; ++h)
    row_of_h[static_cast<std::size_t>(h)] = static_cast<std::size_t>(h * (h - 1) / 2);
  for (std::int64_t h = 1; h <= h_max_; ++h)
    for (std::int64_t a = 0; a < h; ++a)
      s0h[row_of_h[static_cast<std::size_t>(h)] + static_cast<std::size_t>(a)] =
          static_cast<std::uint32_t>(a >= 1 ? a + 1 : std::min(h + 1, h_max_));

  // Scratch: for the serve-terminal-1 action, the next-state value seen
  // from each landing row pack(h',0), pre-mixed over terminal 2's arrival.
  std::vector<double> mixed(static_cast<std::size_t>(h_max_) * K);
  std::vector<double> rg0(static_cast<std::size_t>(h_max_)), rg1(rg0.size());

  double gain = 0.0, span = 0.0;
  int iter = 0;
  bool closed = false;
  for (iter = 1; iter <= opts.max_iterations; ++iter) {
    for (std::int64_t h = 1; h <= h_max_; ++h) {
      const double* row = v.data() + row_of_h[static_cast<std::size_t>(h)] * K;
      double* out = mixed.data() + static_cast<std::size_t>(h - 1) * K;
      for (std::size_t k2 = 0; k2 < K; ++k2)
        out[k2] = l2 * row[grow1_[k2]] + (1.0 - l2) * row[grow0_[k2]];
    }

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      const double* fresh = mixed.data();  // landing row h' == 1
      const double* held = mixed.data() + (static_cast<std::size_t>(s0h[k1]) - 1) * K;
      const double* vg0 = v.data() + grow0_[k1] * K;
      const double* vg1 = v.data() + grow1_[k1] * K;
      for (std::int64_t h = 1; h <= h_max_; ++h) {
        rg0[static_cast<std::size_t>(h - 1)] = vg0[row_of_h[static_cast<std::size_t>(h)]];
        rg1[static_cast<std::size_t>(h - 1)] = vg1[row_of_h[static_cast<std::size_t>(h)]];
      }
      const double serve2_fresh = l1 * rg1[0] + (1.0 - l1) * rg0[0];
      const double cs1 = cost_served_[k1];
      const double cu1 = cost_unserved_[k1];

      double* wrow = w.data() + k1 * K;
      const double* vrow = v.data() + k1 * K;
      for (std::size_t k2 = 0; k2 < K; ++k2) {
        const double e0 = l1 * fresh[k2] + (1.0 - l1) * held[k2];
        const std::size_t c2 = s0h[k2] - 1;
        const double e1 = l2 * serve2_fresh +
                          (1.0 - l2) * (l1 * rg1[c2] + (1.0 - l1) * rg0[c2]);
        const double q0 = 0.5 * (cs1 + cost_unserved_[k2]) + tau * e0;
        const double q1 = 0.5 * (cu1 + cost_served_[K + k2]) + tau * e1;
        const double value = std::min(q0, q1) + (1.0 - tau) * vrow[k2];
        wrow[k2] = value;
        const double delta = value - vrow[k2];
        if (first) {
          lo = hi = delta;
          first = false;
        } else {
          lo = std::min(lo, delta);
          hi = std::max(hi, delta);
        }
      }
    }

    span = hi - lo;
    gain = 0.5 * (lo + hi);
    const double shift = w[0];
    for (std::size_t s = 0; s < S; ++s) v[s] = w[s] - shift;
    if (span <= opts.span_tol) {
      closed = true;
      break;
    }
  }
  if (!closed)
    throw std::runtime_error("value iteration span " + std::to_string(span) +
                             " after " + std::to_string(iter - 1) +
                             " iterations (tol " + std::to_string(opts.span_tol) + ")");

  RviResult res;
  res.gain = gain;
  res.span = span;
  res.iterations = iter;
  res.bias = v;
  res.policy.assign(S, 0);
  // One more sweep to record the greedy action (ties prefer terminal 1).
  for (std::int64_t h = 1; h <= h_max_; ++h) {
    const double* row = v.data() + row_of_h[static_cast<std::size_t>(h)] * K;
    double* out = mixed.data() + static_cast<std::size_t>(h - 1) * K;
    for (std::size_t k2 = 0; k2 < K; ++k2)
      out[k2] = l2 * row[grow1_[k2]] + (1.0 - l2) * row[grow0_[k2]];
  }
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    const double* fresh = mixed.data();
    const double* held = mixed.data() + (static_cast<std::size_t>(s0h[k1]) - 1) * K;
    const double* vg0 = v.data() + grow0_[k1] * K;
    const double* vg1 = v.data() + grow1_[k1] * K;
    for (std::int64_t h = 1; h <= h_max_; ++h) {
      rg0[static_cast<std::size_t>(h - 1)] = vg0[row_of_h[static_cast<std::size_t>(h)]];
      rg1[static_cast<std::size_t>(h - 1)] = vg1[row_of_h[static_cast<std::size_t>(h)]];
    }
    const double serve2_fresh = l1 * rg1[0] + (1.0 - l1) * rg0[0];
    const double cs1 = cost_served_[k1];
    const double cu1 = cost_unserved_[k1];
    for (std::size_t k2 = 0; k2 < K; ++k2) {
      const double e0 = l1 * fresh[k2] + (1.0 - l1) * held[k2];
      const std::size_t c2 = s0h[k2] - 1;
      const double e1 =
          l2 * serve2_fresh + (1.0 - l2) * (l1 * rg1[c2] + (1.0 - l1) * rg0[c2]);
      const double q0 = 0.5 * (cs1 + cost_unserved_[k2]) + tau * e0;
      const double q1 = 0.5 * (cu1 + cost_served_[K + k2]) + tau * e1;
      res.policy[k1 * K + k2] = q1 < q0 ? 1 : 0;
    }
  }
  return res;
}

TwoTerminalMdp::PolicyEvaluation TwoTerminalMdp::evaluate(
    const std::vector<std::uint8_t>& policy, double tol, int max_iterations) const {
  const std::size_t K = k_count_;
  const std::size_t S = K * K;
  if (policy.size() != S)
    throw std::invalid_argument("policy table does not match the state space");
  const double l1 = lambda_[0], l2 = lambda_[1];

  std::vector<double> mu(S, 1.0 / static_cast<double>(S)), nxt(S);
  PolicyEvaluation out;
  for (int it = 1; it <= max_iterations; ++it) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t k1 = 0; k1 < K; ++k1) {
      const double* murow = mu.data() + k1 * K;
      const std::uint8_t* polrow = policy.data() + k1 * K;
      for (std::size_t k2 = 0; k2 < K; ++k2) {
        const double m = murow[k2];
        if (m == 0.0) continue;
        std::size_t r_arr, r_no;
        std::size_t c_arr, c_no;
        if (polrow[k2] == 0) {
          r_arr = 0;
          r_no = serve0_[k1];
          c_arr = grow1_[k2];
          c_no = grow0_[k2];
        } else {
          r_arr = grow1_[k1];
          r_no = grow0_[k1];
          c_arr = 0;
          c_no = serve0_[k2];
        }
        nxt[r_arr * K + c_arr] += m * l1 * l2;
        nxt[r_arr * K + c_no] += m * l1 * (1.0 - l2);
        nxt[r_no * K + c_arr] += m * (1.0 - l1) * l2;
        nxt[r_no * K + c_no] += m * (1.0 - l1) * (1.0 - l2);
      }
    }
    // Lazy mixing keeps the iteration convergent on periodic chains while
    // preserving the stationary law.
    double diff = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double updated = 0.5 * mu[s] + 0.5 * nxt[s];
      diff += std::fabs(updated - mu[s]);
      mu[s] = updated;
    }
    out.iterations = it;
    if (diff < tol) break;
  }

  double cost = 0.0, boundary = 0.0;
  const std::size_t row_h_max = static_cast<std::size_t>(h_max_ * (h_max_ - 1) / 2);
  for (std::size_t k1 = 0; k1 < K; ++k1) {
    for (std::size_t k2 = 0; k2 < K; ++k2) {
      const double m = mu[k1 * K + k2];
      if (m == 0.0) continue;
      const std::uint8_t u = policy[k1 * K + k2];
      cost += m * (u == 0 ? 0.5 * (cost_served_[k1] + cost_unserved_[k2])
                          : 0.5 * (cost_unserved_[k1] + cost_served_[K + k2]));
      if (k1 >= row_h_max || k2 >= row_h_max) boundary += m;
    }
  }
  out.average_cost = cost;
  out.boundary_mass = boundary;
  return out;
}

AutoSolveResult solve_two_terminal_auto(double lambda1, double lambda2,
                                        const MdpOptions& base) {
  std::int64_t h = base.h_max > 0 ? base.h_max : suggested_h_max(lambda1, lambda2);
  AutoSolveResult result;
  for (int attempt = 0; attempt < 3; ++attempt) {
    TwoTerminalMdp mdp(lambda1, lambda2, h);
    MdpOptions opts = base;
    opts.h_max = h;
    result.rvi = mdp.solve(opts);
    const auto eval = mdp.evaluate(result.rvi.policy, 1e-8, 5000);
    result.h_max_used = h;
    result.audit.boundary_mass = eval.boundary_mass;
    result.audit.policy_gain = eval.average_cost;
    result.audit.passed = eval.boundary_mass < 1e-6 &&
                          std::fabs(eval.average_cost - result.rvi.gain) < 1e-3;
    if (result.audit.passed || h >= kMaxH) break;
    h = std::min(h * 2, kMaxH);
  }
  return result;
}

}  // namespace aoisim

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoisim/core.hpp"
#include "aoisim/policies.hpp"

namespace aoisim {

// Invalid user input (files, flags, values); the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Doubles are rendered with %.12g everywhere (configs, manifests, CSV) so a
// written value parses back to the same double and reruns are byte-stable.
std::string format_g12(double v);

// Flat `key = value` run description; `#` starts a comment, blank lines are
// skipped, unknown keys are errors.  List values are comma-separated; a
// single number given for arrival_rates is broadcast to every terminal.
struct RunConfig {
  std::uint32_t n_terminals = 2;
  std::vector<double> arrival_rates;  // empty = 1.0 for each terminal
  PolicyKind policy = PolicyKind::RrOne;
  std::vector<double> beta;
  std::vector<std::uint32_t> sequence;
  BufferKind buffer = BufferKind::OnePacket;
  Mode mode = Mode::Normal;
  std::int64_t horizon = 100'000;
  std::int64_t warmup = -1;
  std::uint64_t seed = 1;
  std::uint32_t replications = 1;
  std::int64_t j_max = 64;       // distribution table depth
  double p2_tol = 1e-10;         // rate-solver budget tolerance
  std::int64_t mdp_h_max = 0;    // 0 = pick automatically
  double mdp_tol = 1e-9;         // value-iteration span tolerance
  std::string churn_file;        // slot,join|leave,id rows for protocol demos

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text, const std::string& origin);

  // Applies one --set key=value override (same grammar as a file line).
  void apply_override(const std::string& key, const std::string& value);

  // Canonical round-trippable echo of every key, in fixed order.
  std::string canonical_text() const;

  ScenarioConfig scenario() const;  // throws ConfigError on bad combinations
  PolicySpec policy_spec() const;

  std::vector<double> rates_or_default() const;
};

// Deterministic run manifest: canonical config, seed, and library version.
// No timestamps or host data, so identical runs produce identical bytes.
std::string manifest_text(const RunConfig& cfg);

}  // namespace aoisim

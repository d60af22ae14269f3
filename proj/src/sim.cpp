#include "aoisim/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "aoisim/rng.hpp"

namespace aoisim {

Metrics run_scenario(const ScenarioConfig& cfg, const PolicySpec& spec,
                     const RunOptions& opts) {
  cfg.validate();
  SystemState sys(cfg);
  Scheduler scheduler(spec, cfg.n_terminals);
  const std::int64_t warmup = cfg.effective_warmup();

  if (opts.replay &&
      static_cast<std::int64_t>(opts.replay->size()) < cfg.horizon)
    throw std::invalid_argument("replay log is shorter than the horizon");

  Metrics m;
  m.per_terminal.resize(cfg.n_terminals);
  std::vector<std::int64_t> aoi_sum(cfg.n_terminals, 0);
  std::vector<std::int64_t> peak_sum(cfg.n_terminals, 0);

  if (spec.kind == PolicyKind::RrLambda && cfg.buffer == BufferKind::FcfsInfinite) {
    for (std::uint32_t n = 0; n < cfg.n_terminals; ++n)
      if (spec.beta[n] <= cfg.arrival_rates[n]) m.unstable_rates = true;
  }

  std::vector<std::uint32_t> decision;
  SlotOutcome out;
  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    decision.clear();
    if (opts.replay) {
      const auto& d = (*opts.replay)[static_cast<std::size_t>(t)];
      decision.assign(d.begin(), d.end());
    } else {
      scheduler.decide(sys, decision);
    }
    if (opts.record) opts.record->push_back(decision);

    sys.advance(decision, out);

    if (opts.slot_mean_aoi) {
      std::int64_t s = 0;
      for (const auto& term : sys.terminals()) s += term.aoi;
      opts.slot_mean_aoi->push_back(static_cast<double>(s) /
                                    static_cast<double>(cfg.n_terminals));
    }

    if (t < warmup) continue;
    for (std::uint32_t n = 0; n < cfg.n_terminals; ++n) {
      aoi_sum[n] += sys.terminals()[n].aoi;
      if (opts.keep_histograms) m.per_terminal[n].aoi_histogram[sys.terminals()[n].aoi] += 1;
    }
    for (std::uint32_t k : out.scheduled) m.per_terminal[k].scheduled += 1;
    for (const Delivery& d : out.delivered) {
      m.per_terminal[d.terminal].updates += 1;
      peak_sum[d.terminal] += d.peak;
    }
    if (out.collided) m.collisions += 1;
    if (out.blank) m.blanks += 1;
    if (out.scheduled.empty()) m.idle_slots += 1;
  }

  m.slots_measured = cfg.horizon - warmup;
  double aggregate = 0.0;
  std::int64_t peaks_total = 0, updates_total = 0;
  for (std::uint32_t n = 0; n < cfg.n_terminals; ++n) {
    TerminalMetrics& tm = m.per_terminal[n];
    tm.avg_aoi = static_cast<double>(aoi_sum[n]) / static_cast<double>(m.slots_measured);
    tm.avg_paoi = tm.updates > 0
                      ? static_cast<double>(peak_sum[n]) / static_cast<double>(tm.updates)
                      : 0.0;
    aggregate += tm.avg_aoi;
    peaks_total += peak_sum[n];
    updates_total += tm.updates;
  }
  m.avg_aoi = aggregate / static_cast<double>(cfg.n_terminals);
  m.avg_paoi = updates_total > 0
                   ? static_cast<double>(peaks_total) / static_cast<double>(updates_total)
                   : 0.0;
  return m;
}

ReplicatedMetrics run_replicated(const ScenarioConfig& cfg, const PolicySpec& spec,
                                 std::uint32_t replications, const RunOptions& opts) {
  if (replications == 0) throw std::invalid_argument("need at least one replication");
  ReplicatedMetrics rep;
  rep.replications = replications;
  rep.runs.reserve(replications);
  for (std::uint32_t i = 0; i < replications; ++i) {
    ScenarioConfig c = cfg;
    c.seed = mix64(cfg.seed ^ (0x5aa5a55a00ff00ffULL + i));
    rep.runs.push_back(run_scenario(c, spec, opts));
  }

  const auto summarize = [&](auto pick, double& mean, double& sd, double& se) {
    double sum = 0.0;
    for (const Metrics& r : rep.runs) sum += pick(r);
    mean = sum / static_cast<double>(replications);
    double ss = 0.0;
    for (const Metrics& r : rep.runs) {
      const double d = pick(r) - mean;
      ss += d * d;
    }
    sd = replications > 1 ? std::sqrt(ss / static_cast<double>(replications - 1)) : 0.0;
    se = sd / std::sqrt(static_cast<double>(replications));
  };
  summarize([](const Metrics& r) { return r.avg_aoi; }, rep.mean_avg_aoi,
            rep.sd_avg_aoi, rep.stderr_avg_aoi);
  summarize([](const Metrics& r) { return r.avg_paoi; }, rep.mean_avg_paoi,
            rep.sd_avg_paoi, rep.stderr_avg_paoi);
  return rep;
}

}  // namespace aoisim

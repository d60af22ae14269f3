#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoisim/analysis.hpp"
#include "aoisim/config.hpp"
#include "aoisim/csvio.hpp"
#include "aoisim/drr.hpp"
#include "aoisim/mdp.hpp"
#include "aoisim/rates.hpp"
#include "aoisim/recipes.hpp"
#include "aoisim/sim.hpp"
#include "aoisim/version.hpp"

namespace {

using namespace aoisim;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value run description")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory (created if missing)");
    seed_opt = cmd->add_option("--seed", seed, "override the configured seed");
    cmd->add_option("--set", sets, "override one key, e.g. --set horizon=50000")
        ->expected(-1)
        ->allow_extra_args(false);
  }

  RunConfig load() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::parse_file(config_path);
    for (const std::string& kv : sets) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_opt && seed_opt->count() > 0) cfg.seed = seed;
    return cfg;
  }

  std::string prepare_out() const {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " +
                              ec.message());
    return out_dir;
  }

  std::string path(const std::string& name) const { return out_dir + "/" + name; }
};

std::string kv(const std::string& key, const std::string& value) {
  return key + " = " + value + "\n";
}
std::string kv(const std::string& key, double value) {
  return kv(key, format_g12(value));
}
std::string kv(const std::string& key, std::int64_t value) {
  return kv(key, std::to_string(value));
}

// ------------------------------------------------------------- simulate ---

int cmd_simulate(const CommonArgs& args) {
  const RunConfig cfg = args.load();
  args.prepare_out();

  const ScenarioConfig scen = cfg.scenario();
  const PolicySpec spec = cfg.policy_spec();
  const ReplicatedMetrics rep = run_replicated(scen, spec, cfg.replications);

  double collisions = 0, blanks = 0, idle = 0;
  bool unstable = false;
  for (const Metrics& m : rep.runs) {
    collisions += static_cast<double>(m.collisions);
    blanks += static_cast<double>(m.blanks);
    idle += static_cast<double>(m.idle_slots);
    unstable = unstable || m.unstable_rates;
  }
  const double nr = static_cast<double>(rep.runs.size());

  std::ostringstream metrics;
  metrics << kv("avg_aoi", rep.mean_avg_aoi)
          << kv("avg_aoi_stderr", rep.stderr_avg_aoi)
          << kv("avg_paoi", rep.mean_avg_paoi)
          << kv("avg_paoi_stderr", rep.stderr_avg_paoi)
          << kv("replications", static_cast<std::int64_t>(rep.replications))
          << kv("slots_measured", rep.runs.front().slots_measured)
          << kv("collisions_per_run", collisions / nr)
          << kv("blanks_per_run", blanks / nr)
          << kv("idle_slots_per_run", idle / nr)
          << kv("unstable_rates", static_cast<std::int64_t>(unstable ? 1 : 0));
  write_text_file(args.path("metrics.txt"), metrics.str());

  std::vector<SweepRow> rows;
  const std::size_t n = rep.runs.front().per_terminal.size();
  for (std::size_t t = 0; t < n; ++t) {
    double sum_a = 0, sum_p = 0, sq_a = 0, sq_p = 0;
    for (const Metrics& m : rep.runs) {
      sum_a += m.per_terminal[t].avg_aoi;
      sum_p += m.per_terminal[t].avg_paoi;
    }
    const double ma = sum_a / nr, mp = sum_p / nr;
    for (const Metrics& m : rep.runs) {
      sq_a += (m.per_terminal[t].avg_aoi - ma) * (m.per_terminal[t].avg_aoi - ma);
      sq_p += (m.per_terminal[t].avg_paoi - mp) * (m.per_terminal[t].avg_paoi - mp);
    }
    const double se_a = nr > 1 ? std::sqrt(sq_a / (nr - 1) / nr) : 0.0;
    const double se_p = nr > 1 ? std::sqrt(sq_p / (nr - 1) / nr) : 0.0;
    rows.push_back({static_cast<double>(t), "avg_aoi", ma, se_a});
    rows.push_back({static_cast<double>(t), "avg_paoi", mp, se_p});
  }
  write_text_file(args.path("per_terminal.csv"), sweep_csv(rows));
  write_text_file(args.path("manifest.txt"), manifest_text(cfg));

  std::cout << "avg_aoi = " << format_g12(rep.mean_avg_aoi) << " +/- "
            << format_g12(rep.stderr_avg_aoi) << " over " << rep.replications
            << " runs\n"
            << "wrote metrics.txt, per_terminal.csv, manifest.txt to " << args.out_dir
            << '\n';
  return 0;
}

// -------------------------------------------------------------- analyze ---

int cmd_analyze(const CommonArgs& args) {
  const RunConfig cfg = args.load();
  args.prepare_out();

  const std::vector<double> rates = cfg.rates_or_default();
  for (double r : rates)
    if (!(r >= 0.0) || r > 1.0)
      throw ConfigError("arrival rates must lie in [0, 1]");

  const std::uint32_t n = cfg.n_terminals;
  const LowerBounds lb = aoi_lower_bounds(rates);
  double rate_sum = 0.0;
  for (double r : rates) rate_sum += r;

  std::vector<SweepRow> rows;
  const double x = static_cast<double>(n);
  rows.push_back({x, "rr_one", rr_one_avg_aoi(rates), 0.0});
  rows.push_back({x, "lb_collision", lb.collision_floor, 0.0});
  rows.push_back({x, "lb_arrival", lb.arrival_floor, 0.0});
  rows.push_back({x, "un_one_floor", un_one_floor(n), 0.0});
  if (rate_sum < 1.0)
    rows.push_back({x, "heavy_traffic_paoi_bound", heavy_traffic_bound(rates), 0.0});
  write_text_file(args.path("analysis.csv"), sweep_csv(rows));

  const std::int64_t j_eff = std::max<std::int64_t>(cfg.j_max, n);
  std::vector<DistributionRow> pmf_rows;
  for (std::uint32_t t = 0; t < n; ++t) {
    const StationaryDistribution d = rr_one_stationary(rates[t], n, j_eff);
    for (std::int64_t j = 1; j <= j_eff; ++j)
      pmf_rows.push_back({t, j, d.pmf[static_cast<std::size_t>(j - 1)]});
  }
  write_text_file(args.path("age_pmf.csv"), distribution_csv(pmf_rows));

  if (rate_sum < 1.0) {
    const std::vector<double> shares = heavy_traffic_beta(rates);
    std::vector<SweepRow> share_rows;
    for (std::uint32_t t = 0; t < n; ++t)
      share_rows.push_back({static_cast<double>(t), "beta_ub", shares[t], 0.0});
    write_text_file(args.path("shares.csv"), sweep_csv(share_rows));
  }
  write_text_file(args.path("manifest.txt"), manifest_text(cfg));

  std::cout << "rr_one = " << format_g12(rr_one_avg_aoi(rates)) << ", lb_collision = "
            << format_g12(lb.collision_floor) << ", lb_arrival = "
            << format_g12(lb.arrival_floor) << '\n'
            << "wrote analysis.csv, age_pmf.csv to " << args.out_dir << '\n';
  return 0;
}

// ------------------------------------------------------------- solve-p2 ---

int cmd_solve_p2(const CommonArgs& args) {
  const RunConfig cfg = args.load();
  args.prepare_out();

  RateSolveOptions opts;
  opts.tol = cfg.p2_tol;
  const std::vector<double> rates = cfg.rates_or_default();
  RateSolution sol;
  try {
    sol = solve_rates(rates, opts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::vector<SweepRow> rows;
  for (std::size_t t = 0; t < sol.beta.size(); ++t)
    rows.push_back({static_cast<double>(t), "beta_opt", sol.beta[t], 0.0});
  write_text_file(args.path("shares.csv"), sweep_csv(rows));

  std::ostringstream sum;
  sum << kv("objective", sol.objective) << kv("multiplier", sol.multiplier)
      << kv("iterations", static_cast<std::int64_t>(sol.iterations))
      << kv("kkt_residual", sol.kkt_residual) << kv("sum_gap", sol.sum_gap);
  write_text_file(args.path("solution.txt"), sum.str());
  write_text_file(args.path("manifest.txt"), manifest_text(cfg));

  std::cout << "objective = " << format_g12(sol.objective) << " (mean peak age "
            << format_g12(sol.objective / static_cast<double>(sol.beta.size()))
            << " per terminal)\nwrote shares.csv, solution.txt to " << args.out_dir
            << '\n';
  return 0;
}

// ---------------------------------------------------------- mdp-optimal ---

int cmd_mdp(const CommonArgs& args) {
  const RunConfig cfg = args.load();
  args.prepare_out();

  if (cfg.n_terminals != 2)
    throw ConfigError("the dynamic-programming benchmark supports exactly 2 "
                      "terminals; got " + std::to_string(cfg.n_terminals));
  const std::vector<double> rates = cfg.rates_or_default();
  for (double r : rates)
    if (!(r > 0.0) || r > 1.0)
      throw ConfigError("benchmark arrival rates must lie in (0, 1]");

  MdpOptions opts;
  opts.span_tol = cfg.mdp_tol;

  AutoSolveResult res;
  if (cfg.mdp_h_max > 0) {
    opts.h_max = cfg.mdp_h_max;
    TwoTerminalMdp model(rates[0], rates[1], cfg.mdp_h_max);
    res.rvi = model.solve(opts);
    const auto eval = model.evaluate(res.rvi.policy, 1e-8, 5000);
    res.audit.boundary_mass = eval.boundary_mass;
    res.audit.policy_gain = eval.average_cost;
    res.audit.passed = eval.boundary_mass < 1e-6 &&
                       std::fabs(eval.average_cost - res.rvi.gain) < 1e-3;
    res.h_max_used = cfg.mdp_h_max;
  } else {
    res = solve_two_terminal_auto(rates[0], rates[1], opts);
  }

  std::size_t serve_second = 0;
  for (std::uint8_t a : res.rvi.policy) serve_second += a;
  const double share = res.rvi.policy.empty()
                           ? 0.0
                           : static_cast<double>(serve_second) /
                                 static_cast<double>(res.rvi.policy.size());

  std::vector<SweepRow> rows;
  rows.push_back({0.0, "gain", res.rvi.gain, 0.0});
  rows.push_back({0.0, "span", res.rvi.span, 0.0});
  rows.push_back({0.0, "iterations", static_cast<double>(res.rvi.iterations), 0.0});
  rows.push_back({0.0, "h_max", static_cast<double>(res.h_max_used), 0.0});
  rows.push_back({0.0, "boundary_mass", res.audit.boundary_mass, 0.0});
  rows.push_back({0.0, "policy_gain", res.audit.policy_gain, 0.0});
  rows.push_back({0.0, "audit_passed", res.audit.passed ? 1.0 : 0.0, 0.0});
  rows.push_back({0.0, "serve_terminal2_state_share", share, 0.0});
  write_text_file(args.path("mdp.csv"), sweep_csv(rows));
  write_text_file(args.path("manifest.txt"), manifest_text(cfg));

  std::cout << "gain = " << format_g12(res.rvi.gain) << " at age cap "
            << res.h_max_used << " (" << res.rvi.iterations << " iterations)\n"
            << "wrote mdp.csv to " << args.out_dir << '\n';
  if (!res.audit.passed) {
    std::cerr << "truncation audit FAILED: boundary mass "
              << format_g12(res.audit.boundary_mass) << ", policy gain "
              << format_g12(res.audit.policy_gain) << " vs rvi gain "
              << format_g12(res.rvi.gain) << '\n';
    return 3;
  }
  return 0;
}

// ------------------------------------------------------------- drr-demo ---

std::vector<ChurnEvent> parse_churn_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read churn file '" + path + "'");
  std::vector<ChurnEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (trimmed.empty()) continue;
    const std::size_t c1 = trimmed.find(',');
    const std::size_t c2 = c1 == std::string::npos ? c1 : trimmed.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected slot,join|leave,id");
    ChurnEvent ev;
    try {
      ev.slot = std::stoll(trimmed.substr(0, c1));
      ev.id = std::stoull(trimmed.substr(c2 + 1));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad number");
    }
    const std::string verb = trimmed.substr(c1 + 1, c2 - c1 - 1);
    if (verb == "join")
      ev.join = true;
    else if (verb == "leave")
      ev.join = false;
    else
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": action must be join or leave, got '" + verb + "'");
    events.push_back(ev);
  }
  return events;
}

int cmd_drr(const CommonArgs& args) {
  const RunConfig cfg = args.load();
  args.prepare_out();

  const std::vector<double> rates = cfg.rates_or_default();
  for (double r : rates)
    if (r != rates[0])
      throw ConfigError("the protocol demo uses one shared arrival rate");

  DrrConfig dc;
  dc.n_initial = cfg.n_terminals;
  dc.arrival_rate = rates[0];
  dc.horizon = cfg.horizon;
  dc.warmup = cfg.warmup < 0 ? cfg.horizon / 10 : cfg.warmup;
  dc.seed = cfg.seed;
  dc.keep_trace = true;
  if (!cfg.churn_file.empty()) dc.churn = parse_churn_file(cfg.churn_file);
  try {
    dc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const DrrResult res = run_drr(dc);
  write_text_file(args.path("trace.csv"), drr_trace_csv(res.trace));

  std::ostringstream sum;
  sum << kv("collisions", res.collisions) << kv("updates", res.updates)
      << kv("blanks", res.blanks) << kv("avg_aoi", res.avg_aoi)
      << kv("warmup_slots", res.warmup_slots) << kv("horizon", dc.horizon)
      << kv("n_initial", static_cast<std::int64_t>(dc.n_initial));
  write_text_file(args.path("summary.txt"), sum.str());
  write_text_file(args.path("manifest.txt"), manifest_text(cfg));

  std::cout << "collisions = " << res.collisions << ", updates = " << res.updates
            << ", avg_aoi = " << format_g12(res.avg_aoi) << '\n'
            << "wrote trace.csv, summary.txt to " << args.out_dir << '\n';
  return 0;
}

// ------------------------------------------------------------ reproduce ---

int cmd_reproduce(const CommonArgs& args, std::vector<std::string> ids) {
  args.prepare_out();
  if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) ids = known_recipes();

  DeskScale scale;
  if (args.seed_opt && args.seed_opt->count() > 0) scale.seed = args.seed;

  bool all_ok = true;
  for (const std::string& id : ids) {
    const RecipeResult res = run_recipe(id, args.out_dir, scale);
    for (const RecipeCheck& c : res.checks) {
      std::cout << id << ' ' << c.name << ": " << (c.passed ? "pass" : "FAIL")
                << " (" << c.detail << ")\n";
      all_ok = all_ok && c.passed;
    }
    std::cout << id << ": wrote";
    for (const std::string& f : res.files) std::cout << ' ' << f;
    std::cout << '\n';
  }
  if (!all_ok) {
    std::cerr << "one or more recipe checks failed\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slotted-uplink age-of-information toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonArgs sim_args, ana_args, p2_args, mdp_args, drr_args, rep_args;
  std::vector<std::string> recipe_ids;

  CLI::App* c_sim = app.add_subcommand("simulate", "run one scenario and report metrics");
  sim_args.attach(c_sim);
  CLI::App* c_ana = app.add_subcommand("analyze", "evaluate the closed forms for a config");
  ana_args.attach(c_ana);
  CLI::App* c_p2 = app.add_subcommand("solve-p2", "optimize long-run service shares");
  p2_args.attach(c_p2);
  CLI::App* c_mdp = app.add_subcommand("mdp-optimal",
                                       "two-terminal average-age optimum via value iteration");
  mdp_args.attach(c_mdp);
  CLI::App* c_drr = app.add_subcommand("drr-demo", "decentralized rotation protocol demo");
  drr_args.attach(c_drr);
  CLI::App* c_rep = app.add_subcommand("reproduce", "run the canned experiments");
  rep_args.attach(c_rep);
  c_rep->add_option("ids", recipe_ids, "fig3 fig5 fig6 fig7 fig8, or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim_args);
    if (c_ana->parsed()) return cmd_analyze(ana_args);
    if (c_p2->parsed()) return cmd_solve_p2(p2_args);
    if (c_mdp->parsed()) return cmd_mdp(mdp_args);
    if (c_drr->parsed()) return cmd_drr(drr_args);
    if (c_rep->parsed()) return cmd_reproduce(rep_args, recipe_ids);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

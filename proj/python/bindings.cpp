#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "aoisim/analysis.hpp"
#include "aoisim/config.hpp"
#include "aoisim/drr.hpp"
#include "aoisim/mdp.hpp"
#include "aoisim/rates.hpp"
#include "aoisim/sim.hpp"
#include "aoisim/version.hpp"

namespace py = pybind11;
using namespace aoisim;

namespace {

BufferKind buffer_from(const std::string& name) {
  if (name == "one_packet") return BufferKind::OnePacket;
  if (name == "fcfs") return BufferKind::FcfsInfinite;
  throw std::invalid_argument("buffer must be 'one_packet' or 'fcfs'");
}

Mode mode_from(const std::string& name) {
  if (name == "normal") return Mode::Normal;
  if (name == "a0") return Mode::A0;
  if (name == "a1") return Mode::A1;
  throw std::invalid_argument("mode must be 'normal', 'a0' or 'a1'");
}

py::dict simulate(std::uint32_t n, std::vector<double> rates, const std::string& policy,
                  std::int64_t horizon, std::uint64_t seed, std::uint32_t replications,
                  const std::string& buffer, const std::string& mode,
                  std::vector<double> beta) {
  ScenarioConfig cfg;
  cfg.n_terminals = n;
  if (rates.size() == 1 && n > 1) rates.assign(n, rates[0]);
  cfg.arrival_rates = std::move(rates);
  cfg.buffer = buffer_from(buffer);
  cfg.mode = mode_from(mode);
  cfg.horizon = horizon;
  cfg.seed = seed;

  PolicySpec spec;
  spec.kind = policy_kind_from_name(policy);
  spec.beta = std::move(beta);

  const ReplicatedMetrics rep = run_replicated(cfg, spec, replications);
  py::dict out;
  out["avg_aoi"] = rep.mean_avg_aoi;
  out["avg_aoi_stderr"] = rep.stderr_avg_aoi;
  out["avg_paoi"] = rep.mean_avg_paoi;
  out["avg_paoi_stderr"] = rep.stderr_avg_paoi;
  out["replications"] = rep.replications;
  std::vector<double> per_term;
  for (const TerminalMetrics& t : rep.runs.front().per_terminal)
    per_term.push_back(t.avg_aoi);
  out["per_terminal_avg_aoi_first_run"] = per_term;
  return out;
}

py::dict solve_shares(std::vector<double> rates, double tol) {
  RateSolveOptions opts;
  opts.tol = tol;
  const RateSolution sol = solve_rates(rates, opts);
  py::dict out;
  out["beta"] = sol.beta;
  out["objective"] = sol.objective;
  out["multiplier"] = sol.multiplier;
  out["kkt_residual"] = sol.kkt_residual;
  out["iterations"] = sol.iterations;
  return out;
}

py::dict mdp_gain(double lambda1, double lambda2, double span_tol) {
  MdpOptions opts;
  opts.span_tol = span_tol;
  const AutoSolveResult res = solve_two_terminal_auto(lambda1, lambda2, opts);
  py::dict out;
  out["gain"] = res.rvi.gain;
  out["iterations"] = res.rvi.iterations;
  out["h_max"] = res.h_max_used;
  out["audit_passed"] = res.audit.passed;
  out["boundary_mass"] = res.audit.boundary_mass;
  out["policy_gain"] = res.audit.policy_gain;
  return out;
}

py::dict bounds(std::vector<double> rates) {
  const LowerBounds lb = aoi_lower_bounds(rates);
  py::dict out;
  out["collision_floor"] = lb.collision_floor;
  out["arrival_floor"] = lb.arrival_floor;
  return out;
}

py::dict stationary(double rate, std::uint32_t n, std::int64_t j_max) {
  const StationaryDistribution d = rr_one_stationary(rate, n, j_max);
  py::dict out;
  out["pmf"] = d.pmf;
  out["tail_mass"] = d.tail_mass;
  out["mean"] = d.mean();
  return out;
}

py::dict drr_demo(std::uint32_t n, double rate, std::int64_t horizon,
                  std::uint64_t seed,
                  std::vector<std::tuple<std::int64_t, std::string, std::uint64_t>> churn) {
  DrrConfig cfg;
  cfg.n_initial = n;
  cfg.arrival_rate = rate;
  cfg.horizon = horizon;
  cfg.warmup = horizon / 10;
  cfg.seed = seed;
  cfg.keep_trace = false;
  for (const auto& [slot, verb, id] : churn) {
    if (verb != "join" && verb != "leave")
      throw std::invalid_argument("churn action must be 'join' or 'leave'");
    cfg.churn.push_back({slot, verb == "join", id});
  }
  cfg.validate();
  const DrrResult res = run_drr(cfg);
  py::dict out;
  out["collisions"] = res.collisions;
  out["updates"] = res.updates;
  out["blanks"] = res.blanks;
  out["avg_aoi"] = res.avg_aoi;
  return out;
}

py::dict two_slot(double delta, double g1, double g2, double h1, double h2) {
  TwoSlotCase c{delta, g1, g2, h1, h2};
  c.validate();
  const TwoSlotComparison r = myopic_two_slot_comparison(c);
  py::dict out;
  out["myopic"] = r.myopic;
  out["alternative"] = r.alternative;
  out["gap"] = r.gap;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "age-of-information scheduling on a slotted collision uplink";
  m.attr("__version__") = kVersion;

  m.def("rr_one_avg_aoi", [](std::vector<double> rates) { return rr_one_avg_aoi(rates); },
        py::arg("rates"),
        "closed-form time-average age of one-at-a-time round robin");
  m.def("lower_bounds", &bounds, py::arg("rates"),
        "collision floor (n+1)/2 and sampling floor mean(1/rate)");
  m.def("rr_one_stationary", &stationary, py::arg("rate"), py::arg("n"),
        py::arg("j_max") = 64, "stationary age law of a round-robin terminal");
  m.def("heavy_traffic_beta",
        [](std::vector<double> rates) { return heavy_traffic_beta(rates); },
        py::arg("rates"), "near-saturation share allocation rate + spare/n");
  m.def("simulate", &simulate, py::arg("n"), py::arg("rates"),
        py::arg("policy") = "rr_one", py::arg("horizon") = 100000,
        py::arg("seed") = 1, py::arg("replications") = 1,
        py::arg("buffer") = "one_packet", py::arg("mode") = "normal",
        py::arg("beta") = std::vector<double>{},
        "replicated slotted-uplink simulation; returns summary metrics");
  m.def("solve_rates", &solve_shares, py::arg("rates"), py::arg("tol") = 1e-10,
        "optimal long-run service shares for queued terminals");
  m.def("mdp_gain", &mdp_gain, py::arg("rate1"), py::arg("rate2"),
        py::arg("span_tol") = 1e-6,
        "two-terminal optimal average age via relative value iteration");
  m.def("drr_demo", &drr_demo, py::arg("n"), py::arg("rate") = 1.0,
        py::arg("horizon") = 10000, py::arg("seed") = 1,
        py::arg("churn") =
            std::vector<std::tuple<std::int64_t, std::string, std::uint64_t>>{},
        "decentralized rotation protocol run; returns slot-type counts");
  m.def("myopic_two_slot", &two_slot, py::arg("delta"), py::arg("g1"), py::arg("g2"),
        py::arg("h1"), py::arg("h2"),
        "two-slot instance where one-step greedy scheduling loses");
}

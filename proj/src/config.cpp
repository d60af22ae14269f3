#include "aoisim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "aoisim/version.hpp"

namespace aoisim {

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  std::istringstream in(value);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (cur.empty()) throw ConfigError("empty element in list '" + value + "'");
    items.push_back(cur);
  }
  return items;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not a number");
  }
  if (used != s.size()) throw ConfigError("'" + s + "' is not a number");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not an integer");
  }
  if (used != s.size()) throw ConfigError("'" + s + "' is not an integer");
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw ConfigError("negative");
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not a non-negative integer");
  }
  if (used != s.size()) throw ConfigError("'" + s + "' is not a non-negative integer");
  return v;
}

BufferKind parse_buffer(const std::string& s) {
  if (s == "one_packet") return BufferKind::OnePacket;
  if (s == "fcfs") return BufferKind::FcfsInfinite;
  throw ConfigError("buffer must be one_packet or fcfs, not '" + s + "'");
}

Mode parse_mode(const std::string& s) {
  if (s == "normal") return Mode::Normal;
  if (s == "a0") return Mode::A0;
  if (s == "a1") return Mode::A1;
  throw ConfigError("mode must be normal, a0 or a1, not '" + s + "'");
}

const char* buffer_name(BufferKind b) {
  return b == BufferKind::OnePacket ? "one_packet" : "fcfs";
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Normal: return "normal";
    case Mode::A0: return "a0";
    case Mode::A1: return "a1";
  }
  return "?";
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto need_value = [&] {
    if (value.empty()) throw ConfigError("key '" + key + "' needs a value");
  };
  if (key == "n_terminals") {
    need_value();
    const std::int64_t n = parse_int(value);
    if (n < 1 || n > 1'000'000) throw ConfigError("n_terminals out of range");
    cfg.n_terminals = static_cast<std::uint32_t>(n);
  } else if (key == "arrival_rates") {
    cfg.arrival_rates.clear();
    for (const auto& item : value.empty() ? std::vector<std::string>{} : split_list(value))
      cfg.arrival_rates.push_back(parse_double(item));
  } else if (key == "policy") {
    need_value();
    try {
      cfg.policy = policy_kind_from_name(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "beta") {
    cfg.beta.clear();
    for (const auto& item : value.empty() ? std::vector<std::string>{} : split_list(value))
      cfg.beta.push_back(parse_double(item));
  } else if (key == "sequence") {
    cfg.sequence.clear();
    for (const auto& item : value.empty() ? std::vector<std::string>{} : split_list(value)) {
      const std::uint64_t v = parse_uint(item);
      if (v > 0xffffffffULL) throw ConfigError("sequence entry out of range");
      cfg.sequence.push_back(static_cast<std::uint32_t>(v));
    }
  } else if (key == "buffer") {
    need_value();
    cfg.buffer = parse_buffer(value);
  } else if (key == "mode") {
    need_value();
    cfg.mode = parse_mode(value);
  } else if (key == "horizon") {
    need_value();
    cfg.horizon = parse_int(value);
  } else if (key == "warmup") {
    need_value();
    cfg.warmup = parse_int(value);
  } else if (key == "seed") {
    need_value();
    cfg.seed = parse_uint(value);
  } else if (key == "replications") {
    need_value();
    const std::uint64_t v = parse_uint(value);
    if (v < 1 || v > 100000) throw ConfigError("replications out of range");
    cfg.replications = static_cast<std::uint32_t>(v);
  } else if (key == "j_max") {
    need_value();
    cfg.j_max = parse_int(value);
  } else if (key == "p2_tol") {
    need_value();
    cfg.p2_tol = parse_double(value);
  } else if (key == "mdp_h_max") {
    need_value();
    cfg.mdp_h_max = parse_int(value);
  } else if (key == "mdp_tol") {
    need_value();
    cfg.mdp_tol = parse_double(value);
  } else if (key == "churn_file") {
    cfg.churn_file = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    try {
      set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_text(buf.str(), path);
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
  set_key(*this, trim(key), trim(value));
}

std::string RunConfig::canonical_text() const {
  std::ostringstream out;
  const auto join_doubles = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + format_g12(v[i]);
    return s;
  };
  out << "n_terminals = " << n_terminals << '\n';
  out << "arrival_rates = " << join_doubles(arrival_rates) << '\n';
  out << "policy = " << policy_name(policy) << '\n';
  out << "beta = " << join_doubles(beta) << '\n';
  out << "sequence = ";
  for (std::size_t i = 0; i < sequence.size(); ++i)
    out << (i ? "," : "") << sequence[i];
  out << '\n';
  out << "buffer = " << buffer_name(buffer) << '\n';
  out << "mode = " << mode_name(mode) << '\n';
  out << "horizon = " << horizon << '\n';
  out << "warmup = " << warmup << '\n';
  out << "seed = " << seed << '\n';
  out << "replications = " << replications << '\n';
  out << "j_max = " << j_max << '\n';
  out << "p2_tol = " << format_g12(p2_tol) << '\n';
  out << "mdp_h_max = " << mdp_h_max << '\n';
  out << "mdp_tol = " << format_g12(mdp_tol) << '\n';
  out << "churn_file = " << churn_file << '\n';
  return out.str();
}

std::vector<double> RunConfig::rates_or_default() const {
  if (arrival_rates.empty()) return std::vector<double>(n_terminals, 1.0);
  if (arrival_rates.size() == 1 && n_terminals > 1)
    return std::vector<double>(n_terminals, arrival_rates.front());
  if (arrival_rates.size() != n_terminals)
    throw ConfigError("arrival_rates lists " + std::to_string(arrival_rates.size()) +
                      " rates for " + std::to_string(n_terminals) + " terminals");
  return arrival_rates;
}

ScenarioConfig RunConfig::scenario() const {
  ScenarioConfig s;
  s.n_terminals = n_terminals;
  s.arrival_rates = rates_or_default();
  s.buffer = buffer;
  s.mode = mode;
  s.horizon = horizon;
  s.warmup = warmup;
  s.seed = seed;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

PolicySpec RunConfig::policy_spec() const {
  PolicySpec spec;
  spec.kind = policy;
  spec.beta = beta;
  spec.sequence = sequence;
  try {
    spec.validate(n_terminals);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

std::string manifest_text(const RunConfig& cfg) {
  std::string out = "# run manifest\nversion = ";
  out += kVersion;
  out += '\n';
  out += cfg.canonical_text();
  return out;
}

}  // namespace aoisim

#include "aoisim/csvio.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "aoisim/config.hpp"

namespace aoisim {

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "x,policy,value,stderr\n";
  for (const SweepRow& r : rows)
    out << format_g12(r.x) << ',' << r.policy << ',' << format_g12(r.value) << ','
        << format_g12(r.stderr_) << '\n';
  return out.str();
}

std::string distribution_csv(const std::vector<DistributionRow>& rows) {
  std::ostringstream out;
  out << "terminal,j,mu\n";
  for (const DistributionRow& r : rows)
    out << r.terminal << ',' << r.j << ',' << format_g12(r.mu) << '\n';
  return out.str();
}

std::string drr_trace_csv(const std::vector<DrrTraceRow>& rows) {
  std::ostringstream out;
  out << "slot,transmitters,feedback,n,w\n";
  for (const DrrTraceRow& r : rows) {
    out << r.slot << ',';
    for (std::size_t i = 0; i < r.transmitters.size(); ++i)
      out << (i ? ";" : "") << r.transmitters[i];
    out << ',' << observed_name(r.feedback) << ',' << r.bs_count << ',' << r.bs_spot
        << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("short write to '" + path + "'");
}

}  // namespace aoisim

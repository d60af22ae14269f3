#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoisim/drr.hpp"

namespace aoisim {

// CSV writers share one shape: a header row, then %.12g-formatted cells.

struct SweepRow {
  double x = 0.0;          // swept quantity (rate, terminal count, ...)
  std::string policy;      // or a closed-form label
  double value = 0.0;
  double stderr_ = 0.0;    // 0 for analytic rows
};

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct DistributionRow {
  std::uint32_t terminal = 0;
  std::int64_t j = 0;
  double mu = 0.0;
};

std::string distribution_csv(const std::vector<DistributionRow>& rows);

std::string drr_trace_csv(const std::vector<DrrTraceRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace aoisim

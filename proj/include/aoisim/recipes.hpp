#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aoisim {

// Canned desk-scale experiments behind the `reproduce` subcommand.  Each
// writes long-format CSV plus a plotting script into the output directory,
// runs deterministically from the given seed, and carries built-in sanity
// assertions (orderings, gaps, slopes) whose failure the CLI reports with a
// nonzero exit.

struct DeskScale {
  std::int64_t horizon = 100'000;  // slots per sweep point
  std::uint32_t replications = 5;
  std::uint64_t seed = 20260816;
};

struct RecipeCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // numbers behind the verdict
};

struct RecipeResult {
  std::string id;
  std::vector<std::string> files;  // paths written, relative to out_dir
  std::vector<RecipeCheck> checks;

  bool all_passed() const;
};

// Known ids: fig3 (round-robin age law, analytic vs empirical histograms),
// fig5 (two equal-rate terminals: bounds, dynamic-programming optimum, and
// single-pick policies vs arrival rate), fig6 (two terminals, one rate fixed
// at 0.5), fig7 (policy scaling in the terminal count with random rates),
// fig8 (queued terminals near saturation: peak-age of share-based rotation vs
// uniform random vs greedy).  Throws ConfigError for an unknown id.
RecipeResult run_recipe(const std::string& id, const std::string& out_dir,
                        const DeskScale& scale);

std::vector<std::string> known_recipes();

}  // namespace aoisim

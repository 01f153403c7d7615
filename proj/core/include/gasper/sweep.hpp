#pragma once

#include "gasper/monitors.hpp"
#include "gasper/presets.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gasper {

struct rule_tally {
   std::size_t runs = 0;
   std::size_t clean = 0;               ///< runs whose assumption audit passed
   std::size_t clean_confirming = 0;    ///< clean runs with at least one confirmation
   std::size_t safety_violations = 0;   ///< counted on clean runs only
   std::size_t monotonicity_violations = 0;
   std::size_t void_safety_violations = 0;  ///< on voided runs, informational
   std::map<std::string, std::size_t> void_reasons;
};

struct sweep_summary {
   std::size_t runs = 0;
   std::map<confirm::rule, rule_tally> rules;
   std::size_t p1_checked_runs = 0, p1_failures = 0;
   std::size_t p2_failures = 0, p7_failures = 0;
   std::vector<std::string> failing;  ///< scenario names failing report::ok
   double seconds = 0;

   bool ok() const;
   nlohmann::json to_json() const;
};

using sweep_callback = std::function<void(const scenario&, const trace&, const monitor::report&)>;

/// Runs sweep_scenario(kind, seed) for every kind and seed in [first, last].
sweep_summary run_sweep(const std::vector<strategy>& kinds, std::uint64_t first, std::uint64_t last,
                        bool strict = false, const sweep_callback& each = {});

}  // namespace gasper

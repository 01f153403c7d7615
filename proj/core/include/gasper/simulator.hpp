#pragma once

#include "gasper/scenario.hpp"
#include "gasper/trace.hpp"

#include <cstddef>

namespace gasper {

struct run_stats {
   std::size_t events = 0;
   std::size_t head_computations = 0;
   std::size_t blocks = 0;
};

/// Runs the scenario to its horizon. The trace is a pure function of the config.
trace run_scenario(const scenario& cfg, run_stats* stats = nullptr);

}  // namespace gasper

#pragma once

#include "gasper/scenario.hpp"

#include <string>
#include <vector>

namespace gasper {

/// Built-in scenarios: "fast-path", "non-monotone-q", "gj-weight".
std::vector<std::string> preset_names();
scenario preset(const std::string& name);

/// Strategies exercised by the adversarial sweep.
inline constexpr strategy sweep_strategies[] = {strategy::equivocate, strategy::withhold_release,
                                                strategy::conflicting_ffg};

/// One sweep run: 64 validators, 8-slot epochs, 6 Byzantine validators,
/// GST drawn from the first epoch, horizon GGST plus four epochs. Seeds
/// congruent to 3 mod 4 add a reward/penalty cohort; conflicting_ffg is
/// slashable on odd seeds.
scenario sweep_scenario(strategy kind, std::uint64_t seed);

}  // namespace gasper

#pragma once

#include "gasper/chain.hpp"
#include "gasper/confirmation.hpp"
#include "gasper/rational.hpp"
#include "gasper/trace.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gasper::monitor {

/// Pointer back into the trace: index of the offending event.
struct finding {
   std::size_t event = 0;
   tick_t tick = 0;
   std::string detail;
};

struct property_result {
   std::size_t checked = 0;
   std::size_t violations = 0;
   std::optional<finding> first;

   bool ok() const { return violations == 0; }
   void fail(std::size_t event, tick_t tick, std::string detail);
};

struct rule_audit {
   bool clean = true;
   std::vector<std::string> void_reasons;
   std::optional<rational> min_ffg_ratio;  ///< lowest honest FFG ratio seen, where audited
   std::optional<rational> required_ffg_ratio;

   void fail(std::string why);
};

struct rule_report {
   confirm::rule rule = confirm::rule::hfc;
   std::size_t confirmations = 0;   ///< evaluations with a non-empty confirmed set
   property_result safety;
   property_result monotonicity;
   property_result monotonicity_ungated;  ///< same check without the security guard
   rule_audit audit;
};

struct latency_row {
   block_t block = 0;
   slot_t slot = 0;
   bool epoch_start = false;
   std::map<confirm::rule, std::optional<slot_t>> confirm;  ///< slots from proposal to confirmation
   std::optional<slot_t> finalize;                          ///< slots from proposal to finality
};

/// Two honest views whose greatest justified checkpoints carry different
/// total weight at the same instant.
struct gj_weight_note {
   std::size_t event = 0;
   tick_t tick = 0;
   slot_t slot = 0;
   validator_t heavy = 0, light = 0;
   checkpoint gj_heavy, gj_light;
   std::int64_t total_heavy = 0, total_light = 0;
};

struct report {
   std::vector<rule_report> rules;
   property_result p1;  ///< one justified checkpoint per epoch
   property_result p2;  ///< gj strictly above gf in every honest view
   property_result p7;  ///< epoch(GU(b)) <= epoch(b)
   bool p1_applies = true;  ///< realized beta < 1/3 - epsilon
   rational realized_beta{0};
   rational configured_beta{0};
   std::int64_t max_slashed_weight = 0;
   rational realized_exit_rate{0}, realized_reward_rate{0}, realized_penalty_rate{0};
   property_result raw_flips;  ///< raw LMD safety going from true to false for the same block
   std::size_t gj_weight_mismatches = 0;
   std::optional<gj_weight_note> gj_weight;
   std::vector<latency_row> latency;
   std::int64_t seconds_per_slot = 12;
   slot_t horizon = 0;
   tick_t ggst = 0;

   const rule_report* find(confirm::rule r) const;
   /// Clean = every property holds wherever the rule's assumptions held.
   /// Strict additionally fails on any rule whose assumptions were void.
   bool ok(bool strict = false) const;
   nlohmann::json to_json() const;
   std::string latency_csv() const;
   std::string latency_text() const;
};

report analyze(const trace& tr);

}  // namespace gasper::monitor

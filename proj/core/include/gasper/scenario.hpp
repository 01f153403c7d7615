#pragma once

#include "gasper/balances.hpp"
#include "gasper/confirmation.hpp"
#include "gasper/fork_choice.hpp"
#include "gasper/time.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gasper {

enum class strategy { silent, equivocate, withhold_release, conflicting_ffg, scripted };

const char* to_string(strategy s);
strategy strategy_from_string(const std::string& s);

struct adversary_config {
   std::vector<validator_t> ids;  ///< explicit Byzantine set; wins over count
   int count = 0;                 ///< otherwise the top `count` ids
   bool balanced = true;          ///< spread evenly over committees
   strategy kind = strategy::silent;
   double silent_fraction = 1.0;  ///< silent: share of duties skipped
   bool slashable = false;        ///< conflicting_ffg: also send the honest vote
   nlohmann::json script = nlohmann::json::array();
};

/// A delivery hold: the named message does not reach `to` before `until`
/// (legal only while the send time plus the hold stays inside the GST bound).
struct network_hold {
   std::string what = "block";  ///< block | attestation
   slot_t slot = 0;
   std::vector<validator_t> to;
   tick_t until = 0;
};

struct scenario {
   std::string name = "scenario";
   std::size_t validators = 64;
   std::int64_t balance = 32'000'000'000;
   std::vector<std::int64_t> weights;  ///< overrides `balance` when non-empty
   timing time;
   std::int64_t seconds_per_slot = 12;
   tick_t delta = 3;
   tick_t gst = 0;
   slot_t horizon_slots = 0;  ///< 0 = four epochs
   std::uint64_t seed = 1;
   fork_choice::params protocol;
   confirm::safety_params safety;
   adversary_config adversary;
   std::vector<churn_entry> churn;
   std::vector<validator_t> observers;  ///< empty = the first four honest ids
   std::vector<confirm::rule> rules{std::begin(confirm::all_rules), std::end(confirm::all_rules)};
   bool log_raw_safe = false;  ///< log raw LMD safety of every view block at each slot start
   std::vector<network_hold> holds;
   std::optional<tick_t> pinned_delay;  ///< fixed delivery delay instead of sampled ones
   std::map<epoch_t, nlohmann::json> schedule_override;

   slot_t horizon() const { return horizon_slots > 0 ? horizon_slots : 4 * time.slots_per_epoch; }
   balances initial_balances() const;
   std::vector<validator_t> adversary_ids() const;

   /// Field-level checks; throws config_error.
   void validate() const;
};

scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const scenario& s);
scenario load_scenario(const std::string& path);

nlohmann::json to_json(const rational& r);
rational rational_from_json(const nlohmann::json& j);

}  // namespace gasper

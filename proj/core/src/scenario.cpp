#include "gasper/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace gasper {

using nlohmann::json;

const char* to_string(strategy s) {
   switch (s) {
      case strategy::silent: return "silent";
      case strategy::equivocate: return "equivocate";
      case strategy::withhold_release: return "withhold_release";
      case strategy::conflicting_ffg: return "conflicting_ffg";
      case strategy::scripted: return "scripted";
   }
   return "?";
}

strategy strategy_from_string(const std::string& s) {
   for (auto k : {strategy::silent, strategy::equivocate, strategy::withhold_release, strategy::conflicting_ffg,
                  strategy::scripted})
      if (s == to_string(k)) return k;
   throw config_error("adversary.strategy: unknown strategy '" + s + "'");
}

json to_json(const rational& r) {
   if (r.den() == 1) return json(static_cast<std::int64_t>(r.num()));
   return json(r.str());
}

rational rational_from_json(const json& j) {
   if (j.is_number_integer()) return rational(j.get<std::int64_t>());
   if (j.is_string()) return rational::parse(j.get<std::string>());
   if (j.is_number_float()) {
      // decimal literal as written, not the binary double
      return rational::parse(j.dump());
   }
   throw config_error("expected a number or a fraction string, got " + j.dump());
}

balances scenario::initial_balances() const {
   if (!weights.empty()) return balances(weights.begin(), weights.end());
   return balances(validators, balance);
}

std::vector<validator_t> scenario::adversary_ids() const {
   std::vector<validator_t> ids = adversary.ids;
   if (ids.empty())
      for (int k = 0; k < adversary.count; ++k) ids.push_back(static_cast<validator_t>(validators) - 1 - k);
   std::sort(ids.begin(), ids.end());
   return ids;
}

void scenario::validate() const {
   auto fail = [](const std::string& field, const std::string& why) { throw config_error(field + ": " + why); };
   if (validators == 0) fail("validators", "must be positive");
   if (!weights.empty() && weights.size() != validators) fail("weights", "length must equal validators");
   for (auto w : initial_balances())
      if (w < 0) fail("weights", "negative balance");
   try {
      time.validate(delta);
   } catch (const config_error& e) {
      fail("timing", e.what());
   }
   if (gst < 0) fail("gst_ticks", "negative");
   if (horizon() < 1) fail("horizon_slots", "must be positive");
   if (seconds_per_slot <= 0) fail("seconds_per_slot", "must be positive");
   for (auto v : adversary_ids())
      if (v < 0 || static_cast<std::size_t>(v) >= validators) fail("adversary.ids", "out of range");
   if (adversary.count < 0 || static_cast<std::size_t>(adversary.count) > validators) fail("adversary.count", "out of range");
   if (adversary.silent_fraction < 0 || adversary.silent_fraction > 1) fail("adversary.params.fraction", "outside [0,1]");
   auto adv = adversary_ids();
   for (auto v : observers) {
      if (v < 0 || static_cast<std::size_t>(v) >= validators) fail("observers", "out of range");
      if (std::binary_search(adv.begin(), adv.end(), v)) fail("observers", "observer must be honest");
   }
   if (safety.beta < rational(0) || !(safety.beta < rational(1))) fail("safety.beta", "outside [0,1)");
   if (safety.sigma < rational(0) || rational(1) < safety.sigma) fail("safety.sigma", "outside [0,1]");
   if (pinned_delay && (*pinned_delay < 0 || *pinned_delay > delta)) fail("network.pinned_delay", "outside [0, delta]");
   for (const auto& h : holds)
      if (h.what != "block" && h.what != "attestation") fail("network.holds", "unknown message kind " + h.what);
   balance_schedule(initial_balances(), churn).check_rates({safety.chi, safety.rho, safety.pi});
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
   if (j.contains(key)) out = j.at(key).get<T>();
}

void take_rational(const json& j, const char* key, rational& out) {
   if (j.contains(key)) out = rational_from_json(j.at(key));
}

const std::set<std::string> top_keys{"name",      "validators", "balance",        "weights",      "slots_per_epoch",
                                     "ticks_per_slot", "vote_offset_ticks", "seconds_per_slot", "delta_ticks",
                                     "gst_ticks", "horizon_slots", "seed", "protocol", "safety", "adversary", "churn",
                                     "observers", "rules", "log_raw_safe", "network", "schedule_override"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
   if (!j.is_object()) throw config_error(where + ": expected an object");
   for (const auto& [k, _] : j.items())
      if (!allowed.count(k)) throw config_error(where + ": unknown field '" + k + "'");
}

}  // namespace

scenario scenario_from_json(const json& j) {
   scenario s;
   try {
      check_keys(j, top_keys, "config");
      take(j, "name", s.name);
      take(j, "validators", s.validators);
      take(j, "balance", s.balance);
      take(j, "weights", s.weights);
      if (j.contains("weights") && !j.contains("validators")) s.validators = s.weights.size();
      take(j, "slots_per_epoch", s.time.slots_per_epoch);
      take(j, "ticks_per_slot", s.time.ticks_per_slot);
      if (j.contains("ticks_per_slot") && !j.contains("vote_offset_ticks"))
         s.time.vote_offset_ticks = s.time.ticks_per_slot / 3;
      take(j, "vote_offset_ticks", s.time.vote_offset_ticks);
      take(j, "seconds_per_slot", s.seconds_per_slot);
      take(j, "delta_ticks", s.delta);
      take(j, "gst_ticks", s.gst);
      take(j, "horizon_slots", s.horizon_slots);
      take(j, "seed", s.seed);
      take(j, "log_raw_safe", s.log_raw_safe);
      if (j.contains("protocol")) {
         const auto& p = j.at("protocol");
         check_keys(p, {"boost", "subtree_boost"}, "protocol");
         take_rational(p, "boost", s.protocol.boost_score);
         take(p, "subtree_boost", s.protocol.subtree_boost);
      }
      if (j.contains("safety")) {
         const auto& p = j.at("safety");
         check_keys(p, {"beta", "lambda", "epsilon", "rho", "pi", "chi", "sigma", "w_lower", "max_lookahead"}, "safety");
         take_rational(p, "beta", s.safety.beta);
         if (p.contains("lambda") && !p.at("lambda").is_null()) s.safety.lambda = rational_from_json(p.at("lambda"));
         take_rational(p, "epsilon", s.safety.epsilon);
         take_rational(p, "rho", s.safety.rho);
         take_rational(p, "pi", s.safety.pi);
         take_rational(p, "chi", s.safety.chi);
         take_rational(p, "sigma", s.safety.sigma);
         take_rational(p, "w_lower", s.safety.w_lower);
         take(p, "max_lookahead", s.safety.max_lookahead);
      }
      if (j.contains("adversary")) {
         const auto& a = j.at("adversary");
         check_keys(a, {"ids", "count", "balanced", "strategy", "params", "script"}, "adversary");
         take(a, "ids", s.adversary.ids);
         take(a, "count", s.adversary.count);
         take(a, "balanced", s.adversary.balanced);
         if (a.contains("strategy")) s.adversary.kind = strategy_from_string(a.at("strategy").get<std::string>());
         if (a.contains("params")) {
            const auto& p = a.at("params");
            check_keys(p, {"fraction", "slashable"}, "adversary.params");
            take(p, "fraction", s.adversary.silent_fraction);
            take(p, "slashable", s.adversary.slashable);
         }
         if (a.contains("script")) s.adversary.script = a.at("script");
      }
      if (j.contains("churn")) {
         for (const auto& c : j.at("churn")) {
            check_keys(c, {"epoch", "validator", "kind", "rate", "amount"}, "churn[]");
            churn_entry e;
            e.epoch = c.at("epoch").get<epoch_t>();
            e.validator = c.at("validator").get<validator_t>();
            e.kind = churn_kind_from_string(c.at("kind").get<std::string>());
            take_rational(c, "rate", e.rate);
            take(c, "amount", e.amount);
            s.churn.push_back(e);
         }
      }
      take(j, "observers", s.observers);
      if (j.contains("rules")) {
         s.rules.clear();
         for (const auto& r : j.at("rules")) s.rules.push_back(confirm::rule_from_string(r.get<std::string>()));
      }
      if (j.contains("network")) {
         const auto& n = j.at("network");
         check_keys(n, {"holds", "pinned_delay"}, "network");
         if (n.contains("pinned_delay") && !n.at("pinned_delay").is_null())
            s.pinned_delay = n.at("pinned_delay").get<tick_t>();
         for (const auto& h : n.value("holds", json::array())) {
            check_keys(h, {"what", "slot", "to", "until"}, "network.holds[]");
            network_hold nh;
            take(h, "what", nh.what);
            nh.slot = h.at("slot").get<slot_t>();
            nh.to = h.at("to").get<std::vector<validator_t>>();
            nh.until = h.at("until").get<tick_t>();
            s.holds.push_back(nh);
         }
      }
      if (j.contains("schedule_override"))
         for (const auto& [k, v] : j.at("schedule_override").items()) s.schedule_override[std::stoll(k)] = v;
   } catch (const json::exception& e) {
      throw config_error(std::string("config: ") + e.what());
   } catch (const std::invalid_argument& e) {
      throw config_error(std::string("config: ") + e.what());
   }
   s.validate();
   return s;
}

json to_json(const scenario& s) {
   json j;
   j["name"] = s.name;
   j["validators"] = s.validators;
   if (s.weights.empty())
      j["balance"] = s.balance;
   else
      j["weights"] = s.weights;
   j["slots_per_epoch"] = s.time.slots_per_epoch;
   j["ticks_per_slot"] = s.time.ticks_per_slot;
   j["vote_offset_ticks"] = s.time.vote_offset_ticks;
   j["seconds_per_slot"] = s.seconds_per_slot;
   j["delta_ticks"] = s.delta;
   j["gst_ticks"] = s.gst;
   j["horizon_slots"] = s.horizon();
   j["seed"] = s.seed;
   j["protocol"] = {{"boost", to_json(s.protocol.boost_score)}, {"subtree_boost", s.protocol.subtree_boost}};
   const auto& sp = s.safety;
   j["safety"] = {{"beta", to_json(sp.beta)},   {"epsilon", to_json(sp.epsilon)}, {"rho", to_json(sp.rho)},
                  {"pi", to_json(sp.pi)},       {"chi", to_json(sp.chi)},         {"sigma", to_json(sp.sigma)},
                  {"w_lower", to_json(sp.w_lower)}, {"max_lookahead", sp.max_lookahead}};
   j["safety"]["lambda"] = sp.lambda ? to_json(*sp.lambda) : json(nullptr);
   json adv;
   adv["ids"] = s.adversary_ids();
   adv["balanced"] = s.adversary.balanced;
   adv["strategy"] = to_string(s.adversary.kind);
   adv["params"] = {{"fraction", s.adversary.silent_fraction}, {"slashable", s.adversary.slashable}};
   adv["script"] = s.adversary.script;
   j["adversary"] = adv;
   j["churn"] = json::array();
   for (const auto& c : s.churn) {
      json e{{"epoch", c.epoch}, {"validator", c.validator}, {"kind", to_string(c.kind)}};
      if (c.kind == churn_kind::reward || c.kind == churn_kind::penalty) e["rate"] = to_json(c.rate);
      if (c.kind == churn_kind::entry) e["amount"] = c.amount;
      j["churn"].push_back(e);
   }
   j["observers"] = s.observers;
   j["rules"] = json::array();
   for (auto r : s.rules) j["rules"].push_back(confirm::to_string(r));
   j["log_raw_safe"] = s.log_raw_safe;
   json holds = json::array();
   for (const auto& h : s.holds) holds.push_back({{"what", h.what}, {"slot", h.slot}, {"to", h.to}, {"until", h.until}});
   j["network"] = {{"holds", holds}, {"pinned_delay", s.pinned_delay ? json(*s.pinned_delay) : json(nullptr)}};
   json ov = json::object();
   for (const auto& [e, v] : s.schedule_override) ov[std::to_string(e)] = v;
   j["schedule_override"] = ov;
   return j;
}

scenario load_scenario(const std::string& path) {
   std::ifstream in(path);
   if (!in) throw config_error("cannot read config file " + path);
   json j;
   try {
      j = json::parse(in);
   } catch (const json::exception& e) {
      throw config_error(path + ": " + e.what());
   }
   return scenario_from_json(j);
}

}  // namespace gasper

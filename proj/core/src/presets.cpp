#include "gasper/presets.hpp"

#include "gasper/committee.hpp"

#include <random>

namespace gasper {

using nlohmann::json;

std::vector<std::string> preset_names() { return {"fast-path", "non-monotone-q", "gj-weight"}; }

namespace {

scenario fast_path() {
   scenario s;
   s.name = "fast-path";
   s.validators = 64;
   s.time.slots_per_epoch = 32;
   s.delta = 0;
   s.gst = 0;
   // one slot past four epochs so the last block of epoch 3 gets its evaluation
   s.horizon_slots = 4 * 32 + 1;
   s.observers = {0};
   return s;
}

// The raw LMD safety check is not monotone: b1 passes at slot 2 with the slot-1 committee
// alone, then the adversarial block c pulls the slot-2 committee's weight
// below the two-slot threshold at slot 3.
scenario non_monotone_q() {
   scenario s;
   s.name = "non-monotone-q";
   s.validators = 20;
   s.time.slots_per_epoch = 4;
   s.horizon_slots = 12;
   s.safety.beta = rational(1, 5);
   s.adversary.ids = {16, 17, 18, 19};
   s.adversary.kind = strategy::scripted;
   s.adversary.script = {
       {"default", "honest"},
       {"skip", json::array({json::array({18, 2})})},
       {"actions", json::array({
                       {{"at_slot", 2}, {"offset", 0}, {"do", "propose"}, {"proposer", 18}, {"parent", "genesis"},
                        {"label", "c"}},
                       {{"at_slot", 2}, {"offset", 1}, {"do", "ghost_vote"}, {"signer", 17}, {"vote_slot", 1},
                        {"block", "c"}},
                       {{"at_slot", 2}, {"offset", 4}, {"do", "ghost_vote"}, {"signer", 18}, {"vote_slot", 2},
                        {"block", "c"}},
                   })}};
   s.schedule_override[0] = {
       {"committees", {{0, 1, 2, 3, 16}, {4, 5, 6, 7, 17}, {8, 9, 10, 11, 18}, {12, 13, 14, 15, 19}}},
       {"proposers", {0, 4, 18, 8}}};
   s.observers = {0, 1};
   s.rules = {confirm::rule::lmd};
   s.log_raw_safe = true;
   return s;
}

// Validator 7 double votes for epoch 1; the slashing block is withheld from
// validator 6, so the two observers weigh the same GJ checkpoint differently.
scenario gj_weight() {
   scenario s;
   s.name = "gj-weight";
   s.validators = 8;
   s.time.slots_per_epoch = 4;
   s.gst = 1000;
   s.horizon_slots = 20;
   s.pinned_delay = 1;
   s.safety.sigma = rational(1, 32);
   s.adversary.ids = {7};
   s.adversary.kind = strategy::scripted;
   s.adversary.script = json::array({{{"at_slot", 7},
                                      {"offset", 4},
                                      {"do", "ffg_vote"},
                                      {"signer", 7},
                                      {"source", {{"block", "genesis"}, {"epoch", 0}}},
                                      {"target", {{"block", "honest@3"}, {"epoch", 1}}}}});
   for (epoch_t e = 0; e <= 4; ++e)
      s.schedule_override[e] = {{"committees", {{0, 1}, {2, 3}, {4, 5}, {6, 7}}}, {"proposers", {1, 2, 3, 4}}};
   for (slot_t sl = 8; sl <= 11; ++sl) s.holds.push_back({"block", sl, {6}, 156});
   s.observers = {0, 6};
   s.rules = {confirm::rule::hfc};
   return s;
}

}  // namespace

scenario preset(const std::string& name) {
   if (name == "fast-path") return fast_path();
   if (name == "non-monotone-q") return non_monotone_q();
   if (name == "gj-weight") return gj_weight();
   throw config_error("unknown preset '" + name + "'");
}

scenario sweep_scenario(strategy kind, std::uint64_t seed) {
   scenario s;
   s.name = std::string("sweep-") + to_string(kind) + "-" + std::to_string(seed);
   s.validators = 64;
   s.time.slots_per_epoch = 8;
   s.delta = 3;
   s.seed = seed;
   std::mt19937_64 rng(mix64(seed, 0x7377656570));
   s.gst = static_cast<tick_t>(uniform_below(rng, static_cast<std::uint64_t>(s.time.epoch_start(1)) + 1));
   s.horizon_slots = s.time.slot_at(s.time.ggst(s.gst)) + 4 * s.time.slots_per_epoch;
   s.adversary.count = 6;
   s.adversary.kind = kind;
   s.adversary.slashable = seed % 2 == 1;
   s.safety.beta = rational(14, 100);
   s.safety.epsilon = rational(5, 100);
   s.safety.rho = s.safety.pi = s.safety.chi = rational(1, 100);
   s.safety.sigma = rational(1, 32);
   if (seed % 4 == 3) {
      for (validator_t v = 0; v < 4; ++v) s.churn.push_back({2, v, churn_kind::reward, rational(1, 100), 0});
      for (validator_t v = 4; v < 8; ++v) s.churn.push_back({3, v, churn_kind::penalty, rational(1, 100), 0});
   }
   s.observers = {0, 1};
   return s;
}

}  // namespace gasper

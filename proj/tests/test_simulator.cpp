#include "gasper/presets.hpp"
#include "gasper/simulator.hpp"

#include <doctest.h>

#include <sstream>

using namespace gasper;
using nlohmann::json;

namespace {

scenario small(std::uint64_t seed = 3) {
   scenario s;
   s.name = "small";
   s.validators = 16;
   s.time.slots_per_epoch = 4;
   s.delta = 2;
   s.horizon_slots = 24;
   s.seed = seed;
   s.observers = {0, 1};
   return s;
}

std::size_t count(const trace& tr, const std::string& kind) {
   std::size_t k = 0;
   for (const auto& e : tr.events) k += e.kind == kind;
   return k;
}

}  // namespace

TEST_CASE("a run is a pure function of its config") {
   auto s = small();
   s.adversary.count = 2;
   s.adversary.kind = strategy::equivocate;
   const auto a = run_scenario(s).to_jsonl();
   CHECK(a == run_scenario(s).to_jsonl());
   s.seed = 4;
   CHECK(a != run_scenario(s).to_jsonl());
}

TEST_CASE("trace layout") {
   run_stats st;
   const auto tr = run_scenario(small(), &st);
   REQUIRE_FALSE(tr.events.empty());
   CHECK(tr.events.front().kind == "meta");
   CHECK(tr.events.back().kind == "end");
   CHECK(st.blocks == count(tr, "block"));
   CHECK(count(tr, "block") == 23);  // one per slot after genesis
   // two head events per slot, one confirm per observer, rule and slot
   CHECK(count(tr, "head") == 48);
   CHECK(count(tr, "confirm") == 24 * 2 * 4);
   const auto& meta = tr.events.front().payload;
   CHECK(meta.at("schedule").size() == 6);
   CHECK(meta.at("honest").size() == 16);
   tick_t last = 0;
   for (const auto& e : tr.events) {
      CHECK(e.tick >= last);
      last = e.tick;
   }
}

TEST_CASE("trace jsonl round trip") {
   const auto tr = run_scenario(small());
   std::stringstream io;
   tr.write_jsonl(io);
   const auto back = trace::read_jsonl(io);
   CHECK(back.to_jsonl() == tr.to_jsonl());
}

TEST_CASE("scenario json round trip and validation") {
   auto s = sweep_scenario(strategy::conflicting_ffg, 7);
   const auto j = to_json(s);
   CHECK(to_json(scenario_from_json(j)) == j);

   json bad = j;
   bad["unexpected"] = 1;
   CHECK_THROWS_AS(scenario_from_json(bad), config_error);

   auto obs = small();
   obs.adversary.ids = {0};
   CHECK_THROWS_AS(obs.validate(), config_error);

   auto slow = small();
   slow.delta = 20;
   CHECK_THROWS_AS(slow.validate(), config_error);

   auto pin = small();
   pin.pinned_delay = 5;
   CHECK_THROWS_AS(pin.validate(), config_error);

   auto rates = small();
   rates.churn.push_back({1, 2, churn_kind::reward, rational(1, 10), 0});
   CHECK_THROWS_AS(rates.validate(), config_error);
   rates.safety.rho = rational(1, 10);
   CHECK_NOTHROW(rates.validate());

   CHECK(rational_from_json(json("0.14")) == rational(7, 50));
   CHECK(rational_from_json(json(2)) == rational(2));
}

TEST_CASE("sweep scenarios respect the sweep envelope") {
   for (auto kind : sweep_strategies)
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
         const auto s = sweep_scenario(kind, seed);
         CHECK_NOTHROW(s.validate());
         CHECK(s.gst <= s.time.epoch_start(1));
         const slot_t ggst_slot = s.time.slot_at(s.time.ggst(s.gst));
         CHECK(s.horizon() >= ggst_slot + 3 * s.time.slots_per_epoch);
         CHECK(rational(static_cast<std::int64_t>(s.adversary_ids().size()), static_cast<std::int64_t>(s.validators)) <=
               rational(1, 5));
      }
}

TEST_CASE("fault free heads follow the chain") {
   const auto tr = run_scenario(small());
   block_t prev_block = 0;
   for (const auto& e : tr.events) {
      if (e.kind == "block") prev_block = e.payload.at("id").get<block_t>();
      if (e.kind == "head" && e.payload.at("phase") == "vote")
         for (const auto& h : e.payload.at("hfc")) CHECK(h.get<block_t>() == prev_block);
   }
}

TEST_CASE("zero churn rates give identical hfc and churn confirmations") {
   for (auto kind : sweep_strategies) {
      auto s = sweep_scenario(kind, 2);
      s.safety.rho = s.safety.pi = s.safety.chi = rational(0);
      s.churn.clear();
      const auto tr = run_scenario(s);
      std::map<std::pair<std::int64_t, slot_t>, json> hfc, churn;
      for (const auto& e : tr.events) {
         if (e.kind != "confirm") continue;
         auto key = std::make_pair(e.actor, e.payload.at("slot").get<slot_t>());
         if (e.payload.at("rule") == "hfc") hfc[key] = e.payload.at("tips");
         if (e.payload.at("rule") == "churn") churn[key] = e.payload.at("tips");
      }
      CHECK(hfc.size() == churn.size());
      CHECK(hfc == churn);
   }
}

TEST_CASE("adversary strategies leave their marks") {
   auto s = sweep_scenario(strategy::equivocate, 1);
   auto tr = run_scenario(s);
   std::map<slot_t, int> per_slot;
   for (const auto& e : tr.events)
      if (e.kind == "block") ++per_slot[e.payload.at("slot").get<slot_t>()];
   int forks = 0;
   for (const auto& [slot, k] : per_slot) forks += k > 1;
   CHECK(forks > 0);

   s = sweep_scenario(strategy::conflicting_ffg, 1);  // odd seed: slashable
   tr = run_scenario(s);
   bool slashed = false;
   for (const auto& e : tr.events)
      if (e.kind == "block" && !e.payload.at("slashed").empty()) slashed = true;
   CHECK(slashed);
}

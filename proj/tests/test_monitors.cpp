#include "gasper/monitors.hpp"
#include "gasper/presets.hpp"
#include "gasper/simulator.hpp"

#include <doctest.h>

using namespace gasper;
using nlohmann::json;

namespace {

scenario small() {
   scenario s;
   s.name = "small";
   s.validators = 16;
   s.time.slots_per_epoch = 4;
   s.delta = 0;
   s.horizon_slots = 24;
   s.observers = {0, 1};
   return s;
}

}  // namespace

TEST_CASE("fault free run confirms every block after one slot") {
   const auto rep = monitor::analyze(run_scenario(small()));
   CHECK(rep.ok(true));
   CHECK(rep.realized_beta == rational(0));
   for (const auto& row : rep.latency) {
      if (row.slot >= 23) continue;
      for (const auto& [r, lat] : row.confirm) {
         REQUIRE(lat.has_value());
         CHECK(*lat == 1);
      }
   }
   // first slot of epoch 1 is finalized two epochs later
   const auto& b4 = rep.latency.at(3);
   REQUIRE(b4.slot == 4);
   CHECK(b4.epoch_start);
   REQUIRE(b4.finalize.has_value());
   CHECK(*b4.finalize == 8);
   CHECK(rep.p1.ok());
   CHECK(rep.p2.checked > 0);
   CHECK(rep.p7.checked == 24);
}

TEST_CASE("monitors catch a tampered head") {
   auto tr = run_scenario(small());
   // a late honest head moves back to genesis
   for (auto it = tr.events.rbegin(); it != tr.events.rend(); ++it)
      if (it->kind == "head") {
         it->payload["hfc"][3] = 0;
         it->payload["lmd"][3] = 0;
         break;
      }
   const auto rep = monitor::analyze(tr);
   for (const auto& rr : rep.rules) {
      CHECK(rr.safety.violations > 0);
      REQUIRE(rr.safety.first.has_value());
   }
   CHECK_FALSE(rep.ok(false));
}

TEST_CASE("monitors catch a retracted confirmation") {
   auto tr = run_scenario(small());
   for (auto it = tr.events.rbegin(); it != tr.events.rend(); ++it)
      if (it->kind == "confirm" && it->payload.at("rule") == "hfc") {
         it->payload["tips"] = json::array({0});
         break;
      }
   const auto rep = monitor::analyze(tr);
   CHECK(rep.find(confirm::rule::hfc)->monotonicity.violations > 0);
   CHECK(rep.find(confirm::rule::lmd)->monotonicity.ok());
   CHECK_FALSE(rep.ok(false));
}

TEST_CASE("monitors catch two justified checkpoints in one epoch") {
   auto tr = run_scenario(small());
   bool done = false;
   for (auto& e : tr.events)
      if (!done && e.kind == "block" && e.payload.at("justified").size() > 1) {
         auto& j = e.payload["justified"];
         json c = j.back();
         c[0] = c[0].get<int>() + 1;
         j.push_back(c);
         done = true;
      }
   REQUIRE(done);
   const auto rep = monitor::analyze(tr);
   CHECK_FALSE(rep.p1.ok());
   CHECK_FALSE(rep.ok(false));
}

TEST_CASE("assumption audits void rules whose premises fail") {
   auto s = small();
   s.delta = 2;
   s.adversary.count = 4;
   s.adversary.kind = strategy::silent;
   s.safety.beta = rational(1, 10);
   const auto rep = monitor::analyze(run_scenario(s));
   CHECK(rep.realized_beta > rational(1, 10));
   for (const auto& rr : rep.rules) CHECK_FALSE(rr.audit.clean);
   CHECK(rep.ok(false));
}

TEST_CASE("non monotone Q replay") {
   const auto rep = monitor::analyze(run_scenario(preset("non-monotone-q")));
   CHECK(rep.raw_flips.violations >= 1);
   const auto* lmd = rep.find(confirm::rule::lmd);
   REQUIRE(lmd);
   CHECK(lmd->monotonicity_ungated.checked > 0);
   CHECK(lmd->monotonicity_ungated.ok());
   CHECK(lmd->monotonicity.ok());
}

TEST_CASE("gj weight replay") {
   const auto cfg = preset("gj-weight");
   const auto rep = monitor::analyze(run_scenario(cfg));
   REQUIRE(rep.gj_weight.has_value());
   const auto& g = *rep.gj_weight;
   CHECK(g.heavy == 6);
   CHECK(g.light == 0);
   CHECK(g.total_heavy - g.total_light == cfg.balance / 32);
   CHECK(g.gj_heavy.epoch < g.gj_light.epoch);
   const auto j = rep.to_json();
   CHECK(j.at("gj_weight").at("first").at("violated") == true);
}

TEST_CASE("report serializations") {
   const auto rep = monitor::analyze(run_scenario(small()));
   const auto j = rep.to_json();
   CHECK(j.at("rules").size() == 4);
   CHECK(j.at("latency").at("rows").size() == rep.latency.size());
   const auto csv = rep.latency_csv();
   CHECK(csv.rfind("block,slot,epoch_start,rule,", 0) == 0);
   CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(1 + 4 * rep.latency.size()));
   CHECK(rep.latency_text().find("first slot of epoch") != std::string::npos);
}

#include "gasper/sweep.hpp"

#include "gasper/simulator.hpp"

#include <chrono>

namespace gasper {

using nlohmann::json;

bool sweep_summary::ok() const {
   if (!failing.empty() || p1_failures || p2_failures || p7_failures) return false;
   for (const auto& [r, t] : rules)
      if (t.safety_violations || t.monotonicity_violations) return false;
   return true;
}

json sweep_summary::to_json() const {
   json j{{"runs", runs},
          {"pass", ok()},
          {"seconds", seconds},
          {"one_justified_per_epoch", {{"applicable_runs", p1_checked_runs}, {"failures", p1_failures}}},
          {"gj_above_gf_failures", p2_failures},
          {"gu_epoch_bound_failures", p7_failures},
          {"failing", failing}};
   json rs = json::object();
   for (const auto& [r, t] : rules)
      rs[confirm::to_string(r)] = {{"runs", t.runs},
                                   {"clean", t.clean},
                                   {"clean_confirming", t.clean_confirming},
                                   {"safety_violations", t.safety_violations},
                                   {"monotonicity_violations", t.monotonicity_violations},
                                   {"void_safety_violations", t.void_safety_violations},
                                   {"void_reasons", t.void_reasons}};
   j["rules"] = rs;
   return j;
}

namespace {
// "honest FFG ratio 53/56 at or below ... in epoch 5" -> "honest FFG ratio"
std::string reason_class(const std::string& why) {
   for (const char* k : {"honest FFG ratio", "realized committee fraction", "justification of", "inadmissible",
                         "slashing occurred", "slashed weight", "validator set changes", "honest HFC and LMD"})
      if (why.rfind(k, 0) == 0) return k;
   return why;
}
}  // namespace

sweep_summary run_sweep(const std::vector<strategy>& kinds, std::uint64_t first, std::uint64_t last, bool strict,
                        const sweep_callback& each) {
   sweep_summary out;
   const auto t0 = std::chrono::steady_clock::now();
   for (auto kind : kinds) {
      for (std::uint64_t seed = first; seed <= last; ++seed) {
         const scenario cfg = sweep_scenario(kind, seed);
         const trace tr = run_scenario(cfg);
         const monitor::report rep = monitor::analyze(tr);
         ++out.runs;
         for (const auto& rr : rep.rules) {
            auto& t = out.rules[rr.rule];
            ++t.runs;
            if (rr.audit.clean) {
               ++t.clean;
               if (rr.confirmations) ++t.clean_confirming;
               t.safety_violations += rr.safety.violations;
               t.monotonicity_violations += rr.monotonicity.violations;
            } else {
               t.void_safety_violations += rr.safety.violations;
               for (const auto& why : rr.audit.void_reasons) ++t.void_reasons[reason_class(why)];
            }
         }
         if (rep.p1_applies) {
            ++out.p1_checked_runs;
            if (!rep.p1.ok()) ++out.p1_failures;
         }
         if (!rep.p2.ok()) ++out.p2_failures;
         if (!rep.p7.ok()) ++out.p7_failures;
         if (!rep.ok(strict)) out.failing.push_back(cfg.name);
         if (each) each(cfg, tr, rep);
      }
   }
   out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
   return out;
}

}  // namespace gasper

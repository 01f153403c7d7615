// gasper_confirm: run scenarios, replays and sweeps; check traces.
//
// exit codes: 0 all checks pass, 1 a property or rule check failed,
// 2 bad config or usage.

#include "gasper/monitors.hpp"
#include "gasper/presets.hpp"
#include "gasper/simulator.hpp"
#include "gasper/sweep.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace gasper;
namespace fs = std::filesystem;

namespace {

struct usage_error : std::runtime_error {
   using std::runtime_error::runtime_error;
};

void write_text(const fs::path& p, const std::string& s) {
   std::ofstream out(p, std::ios::binary);
   if (!out) throw std::runtime_error("cannot write " + p.string());
   out << s;
}

void print_report(const monitor::report& rep, bool strict) {
   std::cout << "realized beta " << rep.realized_beta.str() << " (" << rep.realized_beta.to_double() << "), ggst tick "
             << rep.ggst << ", horizon " << rep.horizon << " slots\n";
   for (const auto& rr : rep.rules) {
      std::cout << "  " << confirm::to_string(rr.rule) << ": confirmations " << rr.confirmations << ", safety "
                << rr.safety.violations << "/" << rr.safety.checked << ", monotonicity " << rr.monotonicity.violations
                << "/" << rr.monotonicity.checked << ", assumptions " << (rr.audit.clean ? "clean" : "void");
      for (const auto& why : rr.audit.void_reasons) std::cout << "\n      void: " << why;
      std::cout << '\n';
      for (const auto* p : {&rr.safety, &rr.monotonicity})
         if (p->first) std::cout << "      first violation: " << p->first->detail << '\n';
   }
   std::cout << "  one justified per epoch: " << (rep.p1.ok() ? "ok" : "FAIL")
             << (rep.p1_applies ? "" : " (not applicable)") << ", gj above gf: " << (rep.p2.ok() ? "ok" : "FAIL")
             << ", gu epoch bound: " << (rep.p7.ok() ? "ok" : "FAIL") << '\n';
   if (rep.raw_flips.checked)
      std::cout << "  raw LMD safety flips: " << rep.raw_flips.violations << " over " << rep.raw_flips.checked
                << " evaluations\n";
   if (rep.gj_weight) {
      const auto& g = *rep.gj_weight;
      std::cout << "  gj weight mismatch at slot " << g.slot << ": validator " << g.heavy << " total " << g.total_heavy
                << " vs validator " << g.light << " total " << g.total_light << " (epsilon "
                << g.total_heavy - g.total_light
                << "); precondition violated: equal weight under the greatest justified checkpoint\n";
   }
   std::cout << (rep.ok(strict) ? "PASS" : "FAIL") << (strict ? " (strict)" : "") << '\n';
}

int finish(const scenario& cfg, const trace& tr, const std::string& out_dir, bool strict, bool quiet = false) {
   const auto rep = monitor::analyze(tr);
   if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      tr.write_file((fs::path(out_dir) / "trace.jsonl").string());
      write_text(fs::path(out_dir) / "report.json", rep.to_json().dump(2) + "\n");
      write_text(fs::path(out_dir) / "summary.csv", rep.latency_csv());
   }
   if (!quiet) {
      std::cout << cfg.name << " (seed " << cfg.seed << ")\n";
      print_report(rep, strict);
   }
   return rep.ok(strict) ? 0 : 1;
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
   auto dots = s.find("..");
   try {
      if (dots == std::string::npos) {
         auto v = std::stoull(s);
         return {v, v};
      }
      auto a = std::stoull(s.substr(0, dots)), b = std::stoull(s.substr(dots + 2));
      if (b < a) throw usage_error("empty seed range " + s);
      return {a, b};
   } catch (const std::logic_error&) {
      throw usage_error("bad seed range '" + s + "' (expected A..B)");
   }
}

struct source_opts {
   std::string config, preset;
   std::optional<std::uint64_t> seed;
   std::vector<std::string> rules;
   std::optional<slot_t> horizon;

   void add(CLI::App* app) {
      auto* c = app->add_option("--config", config, "scenario JSON file")->check(CLI::ExistingFile);
      auto* p = app->add_option("--preset", preset, "built-in scenario: fast-path, non-monotone-q, gj-weight");
      c->excludes(p);
      app->add_option("--seed", seed, "RNG seed (default: GASPER_CONFIRM_SEED or the config's)");
      app->add_option("--rule", rules, "only evaluate these rules: lmd, hfc, churn, appendix");
      app->add_option("--horizon-slots", horizon, "override the horizon");
   }

   scenario load() const {
      scenario s = !config.empty() ? load_scenario(config) : preset.empty() ? preset_or_default() : gasper::preset(preset);
      if (seed) {
         s.seed = *seed;
      } else if (const char* env = std::getenv("GASPER_CONFIRM_SEED")) {
         try {
            s.seed = std::stoull(env);
         } catch (const std::logic_error&) {
            throw usage_error(std::string("GASPER_CONFIRM_SEED is not a number: ") + env);
         }
      }
      if (!rules.empty()) {
         s.rules.clear();
         for (const auto& r : rules) s.rules.push_back(confirm::rule_from_string(r));
      }
      if (horizon) s.horizon_slots = *horizon;
      s.validate();
      return s;
   }

   static scenario preset_or_default() { return gasper::preset("fast-path"); }
};

}  // namespace

int main(int argc, char** argv) {
   CLI::App app{"Fast confirmation rules over a simulated Gasper network"};
   app.require_subcommand(1);
   bool strict = false;
   std::string out_dir;
   app.add_flag("--strict", strict, "also fail when an assumption audit voids a rule that confirmed blocks");

   auto* run = app.add_subcommand("run", "simulate one scenario and check it");
   source_opts run_src;
   run_src.add(run);
   run->add_option("--out", out_dir, "write trace.jsonl, report.json and summary.csv here");
   run->add_flag("--strict", strict);

   auto* replay = app.add_subcommand("replay", "run a built-in replay scenario");
   std::string replay_name;
   replay->add_option("name", replay_name, "non-monotone-q, gj-weight or fast-path")->required();
   replay->add_option("--out", out_dir);
   replay->add_flag("--strict", strict);

   auto* sweep = app.add_subcommand("sweep", "adversarial sweep over seeds and strategies");
   std::string seeds = "0..199";
   std::vector<std::string> kinds;
   sweep->add_option("--seeds", seeds, "seed range A..B (inclusive)")->capture_default_str();
   sweep->add_option("--strategy", kinds, "equivocate, withhold_release, conflicting_ffg (default: all three)");
   sweep->add_option("--out", out_dir, "write summary.json and summary.csv here");
   sweep->add_flag("--strict", strict);

   auto* check = app.add_subcommand("check", "analyze an existing trace");
   std::string trace_path;
   check->add_option("trace", trace_path, "trace.jsonl")->required()->check(CLI::ExistingFile);
   check->add_option("--out", out_dir, "write report.json and summary.csv here");
   check->add_flag("--strict", strict);

   auto* latency = app.add_subcommand("latency", "confirmation and finality latency table");
   source_opts lat_src;
   lat_src.add(latency);
   bool csv = false;
   latency->add_flag("--csv", csv, "print CSV instead of a table");

   auto* show = app.add_subcommand("show", "print a preset or sweep scenario as JSON");
   std::string show_name;
   std::uint64_t show_seed = 0;
   show->add_option("name", show_name, "preset name or sweep:<strategy>")->required();
   show->add_option("--seed", show_seed);

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? 0 : 2;
   }

   try {
      if (*run) {
         const scenario cfg = run_src.load();
         return finish(cfg, run_scenario(cfg), out_dir, strict);
      }
      if (*replay) {
         const scenario cfg = preset(replay_name);
         return finish(cfg, run_scenario(cfg), out_dir, strict);
      }
      if (*check) {
         const trace tr = trace::read_file(trace_path);
         const auto rep = monitor::analyze(tr);
         if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            write_text(fs::path(out_dir) / "report.json", rep.to_json().dump(2) + "\n");
            write_text(fs::path(out_dir) / "summary.csv", rep.latency_csv());
         }
         print_report(rep, strict);
         return rep.ok(strict) ? 0 : 1;
      }
      if (*latency) {
         const scenario cfg = lat_src.load();
         const auto rep = monitor::analyze(run_scenario(cfg));
         std::cout << (csv ? rep.latency_csv() : rep.latency_text());
         return 0;
      }
      if (*show) {
         if (show_name.rfind("sweep:", 0) == 0)
            std::cout << to_json(sweep_scenario(strategy_from_string(show_name.substr(6)), show_seed)).dump(2) << '\n';
         else
            std::cout << to_json(preset(show_name)).dump(2) << '\n';
         return 0;
      }
      if (*sweep) {
         auto [a, b] = parse_range(seeds);
         std::vector<strategy> ks;
         for (const auto& k : kinds) ks.push_back(strategy_from_string(k));
         if (ks.empty()) ks.assign(std::begin(sweep_strategies), std::end(sweep_strategies));
         std::ostringstream rows;
         rows << "scenario,strategy,seed,pass";
         for (auto r : confirm::all_rules) rows << ',' << confirm::to_string(r) << "_clean," << confirm::to_string(r)
                                                << "_safety," << confirm::to_string(r) << "_monotonicity";
         rows << ",realized_beta\n";
         auto summary = run_sweep(ks, a, b, strict, [&](const scenario& cfg, const trace&, const monitor::report& rep) {
            rows << cfg.name << ',' << to_string(cfg.adversary.kind) << ',' << cfg.seed << ','
                 << (rep.ok(strict) ? "pass" : "fail");
            for (auto r : confirm::all_rules) {
               const auto* rr = rep.find(r);
               if (!rr) {
                  rows << ",,,";
                  continue;
               }
               rows << ',' << (rr->audit.clean ? 1 : 0) << ',' << rr->safety.violations << ','
                    << rr->monotonicity.violations;
            }
            rows << ',' << rep.realized_beta.to_double() << '\n';
         });
         if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            write_text(fs::path(out_dir) / "summary.json", summary.to_json().dump(2) + "\n");
            write_text(fs::path(out_dir) / "summary.csv", rows.str());
         }
         std::cout << summary.to_json().dump(2) << '\n';
         return summary.ok() ? 0 : 1;
      }
   } catch (const config_error& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
   } catch (const usage_error& e) {
      std::cerr << "usage error: " << e.what() << '\n';
      return 2;
   } catch (const nlohmann::json::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
   } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
   }
   return 2;
}

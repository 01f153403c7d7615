#include "gasper/monitors.hpp"

#include "gasper/balances.hpp"
#include "gasper/scenario.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace gasper::monitor {

using nlohmann::json;

void property_result::fail(std::size_t event, tick_t tick, std::string detail) {
   ++violations;
   if (!first) first = finding{event, tick, std::move(detail)};
}

void rule_audit::fail(std::string why) {
   clean = false;
   if (std::find(void_reasons.begin(), void_reasons.end(), why) == void_reasons.end())
      void_reasons.push_back(std::move(why));
}

namespace {

constexpr tick_t never = std::numeric_limits<tick_t>::max();

checkpoint ck(const json& j) { return {j.at(0).get<block_t>(), j.at(1).get<epoch_t>()}; }
json ck_json(const checkpoint& c) { return json::array({c.block, c.epoch}); }
std::string ck_str(const checkpoint& c) { return "(" + std::to_string(c.block) + "," + std::to_string(c.epoch) + ")"; }

struct block_info {
   bool known = false;
   block_t parent = no_block;
   slot_t slot = 0;
   epoch_t epoch = 0;
   std::int32_t depth = 0;
   checkpoint gu, gj, uf, gf;
   std::vector<checkpoint> justified;
   std::int64_t total = 0;
   std::vector<validator_t> slashed;
   std::size_t event = 0;
};

struct ffg_info {
   validator_t signer = 0;
   checkpoint source, target;
   std::vector<tick_t> recv;
};

struct confirm_ev {
   std::size_t event;
   tick_t tick;
   validator_t observer;
   slot_t slot;
   confirm::rule rule;
   std::vector<block_t> tips;
};

struct head_ev {
   std::size_t event;
   tick_t tick;
   slot_t slot;
   bool start;
   std::vector<block_t> hfc, lmd;
   std::vector<checkpoint> gj, gf;
   std::vector<std::int64_t> gj_total;
};

struct trace_index {
   scenario cfg;
   timing tm;
   balance_schedule bal;
   tick_t ggst = 0;
   slot_t horizon = 0;
   std::size_t n = 0;
   std::vector<char> adversarial;
   std::vector<validator_t> honest, observers;
   std::map<epoch_t, std::vector<std::vector<validator_t>>> committees;
   std::vector<block_info> blocks;
   std::vector<std::vector<tick_t>> block_recv;  // [block][validator]
   std::map<std::int32_t, ffg_info> ffg;
   std::vector<confirm_ev> confirms;
   std::vector<head_ev> heads;
   std::vector<std::pair<std::size_t, const json*>> raw_safe;
   std::vector<std::pair<std::size_t, validator_t>> raw_safe_actor;

   explicit trace_index(const trace& tr);

   const block_info& get(block_t b) const { return blocks.at(static_cast<std::size_t>(b)); }
   bool has(block_t b) const { return b >= 0 && static_cast<std::size_t>(b) < blocks.size() && blocks[static_cast<std::size_t>(b)].known; }
   bool is_ancestor(block_t a, block_t d) const {
      if (!has(a) || !has(d)) return false;
      const std::int32_t da = get(a).depth;
      while (d != no_block && get(d).depth > da) d = get(d).parent;
      return d == a;
   }
   const std::vector<validator_t>& committee(slot_t s) const {
      static const std::vector<validator_t> none;
      auto it = committees.find(tm.epoch_of(s));
      if (it == committees.end() || s < 0) return none;
      return it->second.at(static_cast<std::size_t>(s - tm.first_slot(it->first)));
   }
   /// votingSource(block, e) from logged block state.
   checkpoint voting_source(block_t b, epoch_t e) const { return get(b).epoch == e ? get(b).gj : get(b).gu; }
   void ensure_block(block_t b) {
      if (blocks.size() <= static_cast<std::size_t>(b)) {
         blocks.resize(static_cast<std::size_t>(b) + 1);
         block_recv.resize(static_cast<std::size_t>(b) + 1, std::vector<tick_t>(n, never));
      }
   }
};

trace_index::trace_index(const trace& tr) {
   if (tr.events.empty() || tr.events.front().kind != "meta") throw std::runtime_error("trace has no meta event");
   const json& meta = tr.events.front().payload;
   cfg = scenario_from_json(meta.at("config"));
   tm = cfg.time;
   bal = balance_schedule(cfg.initial_balances(), cfg.churn);
   ggst = meta.at("ggst").get<tick_t>();
   horizon = meta.at("horizon_slots").get<slot_t>();
   n = cfg.validators;
   adversarial.assign(n, 0);
   for (const auto& v : meta.at("adversaries")) adversarial.at(v.get<std::size_t>()) = 1;
   honest = meta.at("honest").get<std::vector<validator_t>>();
   observers = meta.at("observers").get<std::vector<validator_t>>();
   for (const auto& e : meta.at("schedule"))
      committees[e.at("epoch").get<epoch_t>()] = e.at("committees").get<std::vector<std::vector<validator_t>>>();

   ensure_block(0);
   auto& g = blocks[0];
   g.known = true;
   g.justified = {checkpoint{}};
   g.total = total_weight(bal.at(0));
   std::fill(block_recv[0].begin(), block_recv[0].end(), 0);

   for (std::size_t i = 1; i < tr.events.size(); ++i) {
      const auto& ev = tr.events[i];
      const json& p = ev.payload;
      if (ev.kind == "block") {
         const block_t id = p.at("id").get<block_t>();
         ensure_block(id);
         auto& b = blocks[static_cast<std::size_t>(id)];
         if (b.known) continue;
         b.known = true;
         b.parent = p.at("parent").get<block_t>();
         b.slot = p.at("slot").get<slot_t>();
         b.epoch = p.at("epoch").get<epoch_t>();
         b.depth = get(b.parent).depth + 1;
         b.gu = ck(p.at("gu"));
         b.gj = ck(p.at("gj"));
         b.uf = ck(p.at("uf"));
         b.gf = ck(p.at("gf"));
         for (const auto& c : p.at("justified")) b.justified.push_back(ck(c));
         b.total = p.at("total").get<std::int64_t>();
         b.slashed = p.at("slashed").get<std::vector<validator_t>>();
         b.event = i;
      } else if (ev.kind == "attestation" || ev.kind == "ffg_vote") {
         if (!p.contains("ffg")) continue;
         const auto& f = p.at("ffg");
         auto& info = ffg[f.at("id").get<std::int32_t>()];
         info.signer = static_cast<validator_t>(ev.actor);
         info.source = ck(f.at("source"));
         info.target = ck(f.at("target"));
         if (info.recv.empty()) info.recv.assign(n, never);
      } else if (ev.kind == "deliver") {
         const std::string msg = p.at("msg").get<std::string>();
         const auto& at = p.at("at");
         auto merge = [&](std::vector<tick_t>& dst) {
            for (std::size_t v = 0; v < n; ++v) {
               tick_t x = at.at(v).get<tick_t>();
               if (x >= 0) dst[v] = std::min(dst[v], x);
            }
         };
         if (msg == "block") {
            const block_t id = p.at("id").get<block_t>();
            ensure_block(id);
            merge(block_recv[static_cast<std::size_t>(id)]);
         } else if (msg == "attestation" || msg == "ffg") {
            const std::int32_t id = msg == "ffg" ? p.at("id").get<std::int32_t>() : p.at("ffg").get<std::int32_t>();
            auto& info = ffg[id];
            if (info.recv.empty()) info.recv.assign(n, never);
            merge(info.recv);
         }
      } else if (ev.kind == "confirm") {
         confirms.push_back({i, ev.tick, static_cast<validator_t>(ev.actor), p.at("slot").get<slot_t>(),
                             confirm::rule_from_string(p.at("rule").get<std::string>()),
                             p.at("tips").get<std::vector<block_t>>()});
      } else if (ev.kind == "head") {
         head_ev h{i, ev.tick, p.at("slot").get<slot_t>(), p.at("phase").get<std::string>() == "start", {}, {}, {}, {}, {}};
         h.hfc = p.at("hfc").get<std::vector<block_t>>();
         h.lmd = p.at("lmd").get<std::vector<block_t>>();
         h.gj.resize(n);
         h.gf.resize(n);
         for (std::size_t v = 0; v < n; ++v) {
            if (p.at("gj").at(v).is_null()) continue;
            h.gj[v] = ck(p.at("gj").at(v));
            h.gf[v] = ck(p.at("gf").at(v));
         }
         h.gj_total = p.at("gj_total").get<std::vector<std::int64_t>>();
         heads.push_back(std::move(h));
      } else if (ev.kind == "lmd_safe") {
         raw_safe.push_back({i, &p});
         raw_safe_actor.push_back({i, static_cast<validator_t>(ev.actor)});
      }
   }
}

// --- checks -----------------------------------------------------------------

bool sg_passes(const trace_index& ix, confirm::rule r, slot_t s, block_t tip) {
   const epoch_t e = ix.tm.epoch_of(s);
   if (ix.tm.epoch_start(e - 1) < ix.ggst) return false;
   return r == confirm::rule::appendix || ix.get(tip).epoch >= e - 1;
}

void check_safety(const trace_index& ix, rule_report& rr) {
   std::map<block_t, std::pair<tick_t, std::size_t>> first;
   for (const auto& c : ix.confirms) {
      if (c.rule != rr.rule) continue;
      for (auto b : c.tips)
         if (sg_passes(ix, rr.rule, c.slot, b) && !first.count(b)) first[b] = {c.tick, c.event};
   }
   const bool use_lmd = rr.rule == confirm::rule::lmd;
   for (const auto& [b, when] : first) {
      ++rr.safety.checked;
      bool broken = false;
      for (const auto& h : ix.heads) {
         if (h.tick < when.first || broken) continue;
         for (auto v : ix.honest) {
            block_t head = (use_lmd ? h.lmd : h.hfc)[static_cast<std::size_t>(v)];
            if (!ix.is_ancestor(b, head)) {
               rr.safety.fail(h.event, h.tick,
                              "block " + std::to_string(b) + " confirmed at event " + std::to_string(when.second) +
                                  " is not an ancestor of the head " + std::to_string(head) + " of validator " +
                                  std::to_string(v));
               broken = true;
               break;
            }
         }
      }
   }
}

void check_monotonicity(const trace_index& ix, rule_report& rr, bool gated) {
   property_result& out = gated ? rr.monotonicity : rr.monotonicity_ungated;
   std::map<validator_t, std::vector<std::pair<block_t, std::size_t>>> held;
   for (const auto& c : ix.confirms) {
      if (c.rule != rr.rule) continue;
      auto& obligations = held[c.observer];
      std::vector<std::pair<block_t, std::size_t>> keep;
      for (const auto& [b, since] : obligations) {
         bool still = std::any_of(c.tips.begin(), c.tips.end(), [&](block_t t) { return ix.is_ancestor(b, t); });
         if (still) {
            keep.push_back({b, since});
         } else {
            out.fail(c.event, c.tick,
                     "observer " + std::to_string(c.observer) + " dropped block " + std::to_string(b) +
                         " confirmed at event " + std::to_string(since));
         }
      }
      obligations = std::move(keep);
      for (auto b : c.tips) {
         if (gated && !sg_passes(ix, rr.rule, c.slot, b)) continue;
         if (std::none_of(obligations.begin(), obligations.end(), [&](const auto& o) { return o.first == b; })) {
            obligations.push_back({b, c.event});
            ++out.checked;
         }
      }
   }
}

rational realized_beta(const trace_index& ix) {
   rational best(0);
   const slot_t from = std::max<slot_t>(ix.tm.slot_at(ix.ggst), 0);
   for (slot_t s2 = from; s2 < ix.horizon; ++s2) {
      const balances& w = ix.bal.at(ix.tm.epoch_of(s2));
      std::vector<char> mask(ix.n, 0);
      std::int64_t adv = 0, tot = 0;
      for (slot_t s1 = s2; s1 >= 0; --s1) {
         for (auto v : ix.committee(s1)) {
            const auto vi = static_cast<std::size_t>(v);
            if (mask[vi]) continue;
            mask[vi] = 1;
            tot += w[vi];
            if (ix.adversarial[vi]) adv += w[vi];
         }
         if (tot > 0 && rational(adv) / rational(tot) > best) best = rational(adv) / rational(tot);
      }
   }
   return best;
}

void audit_ffg_ratio(const trace_index& ix, rule_report& rr) {
   const auto& sp = ix.cfg.safety;
   rational required;
   try {
      required = rr.rule == confirm::rule::churn ? confirm::hon_ffg_ratio_var(sp.beta, sp.rho, sp.pi, sp.chi)
                                                 : confirm::hon_ffg_ratio(sp.beta);
   } catch (const std::domain_error&) {
      rr.audit.fail("beta above 1/6: honest FFG ratio undefined");
      return;
   }
   rr.audit.required_ffg_ratio = required;
   const epoch_t last = ix.tm.epoch_of(ix.horizon) - 1;
   for (epoch_t f = 0; f <= last; ++f) {
      if (ix.tm.epoch_start(f) < ix.ggst) continue;
      const tick_t deadline = ix.tm.epoch_start(f + 1);
      std::map<checkpoint, std::vector<std::int32_t>> by_target;
      for (const auto& [id, info] : ix.ffg)
         if (info.target.epoch == f && ix.has(info.target.block) && ix.get(info.target.block).epoch <= f &&
             !ix.adversarial[static_cast<std::size_t>(info.signer)])
            by_target[info.target].push_back(id);
      std::vector<rational> best(ix.n, rational(0));
      for (const auto& [c, ids] : by_target) {
         const checkpoint src = ix.voting_source(c.block, f);
         const balances& w = ix.bal.at(ix.get(c.block).epoch);
         std::int64_t honest_total = 0;
         for (auto v : ix.honest) honest_total += w[static_cast<std::size_t>(v)];
         if (honest_total == 0) continue;
         for (auto v : ix.honest) {
            std::set<validator_t> signers;
            std::int64_t got = 0;
            for (auto id : ids) {
               const auto& info = ix.ffg.at(id);
               if (!(info.source == src) || info.recv[static_cast<std::size_t>(v)] > deadline) continue;
               if (signers.insert(info.signer).second) got += w[static_cast<std::size_t>(info.signer)];
            }
            rational r = rational(got) / rational(honest_total);
            if (r > best[static_cast<std::size_t>(v)]) best[static_cast<std::size_t>(v)] = r;
         }
      }
      for (auto v : ix.honest) {
         const rational& r = best[static_cast<std::size_t>(v)];
         if (!rr.audit.min_ffg_ratio || r < *rr.audit.min_ffg_ratio) rr.audit.min_ffg_ratio = r;
         if (!(r > required))
            rr.audit.fail("honest FFG ratio " + r.str() + " at or below " + required.str() + " in epoch " +
                          std::to_string(f));
      }
   }
}

void audit_inclusion(const trace_index& ix, rule_report& rr, const std::vector<std::vector<tick_t>>& eff) {
   const tick_t end = ix.tm.slot_start(ix.horizon);
   for (epoch_t e = 0;; ++e) {
      const tick_t deadline = ix.tm.slot_start(ix.tm.last_slot(e + 1));
      if (deadline >= end) break;
      if (ix.tm.epoch_start(e + 1) < ix.ggst) continue;
      std::map<checkpoint, std::set<validator_t>> sent;
      for (const auto& [id, info] : ix.ffg)
         if (info.target.epoch == e && ix.has(info.target.block) && ix.get(info.target.block).epoch <= e &&
             info.source == ix.voting_source(info.target.block, e))
            sent[info.target].insert(info.signer);
      for (const auto& [c, signers] : sent) {
         const balances& w = ix.bal.at(ix.get(c.block).epoch);
         std::int64_t got = 0;
         for (auto v : signers) got += w[static_cast<std::size_t>(v)];
         if (rational(3) * rational(got) < rational(2) * rational(ix.get(c.block).total)) continue;
         for (auto v : ix.honest) {
            bool found = false;
            for (std::size_t b = 0; b < ix.blocks.size() && !found; ++b) {
               const auto& bi = ix.blocks[b];
               if (!bi.known || bi.epoch >= e + 2 || eff[b][static_cast<std::size_t>(v)] > deadline) continue;
               found = std::find(bi.justified.begin(), bi.justified.end(), c) != bi.justified.end();
            }
            if (!found) {
               rr.audit.fail("justification of " + ck_str(c) + " not in the view of validator " + std::to_string(v) +
                             " by the last slot of epoch " + std::to_string(e + 1));
               break;
            }
         }
      }
   }
}

}  // namespace

const rule_report* report::find(confirm::rule r) const {
   for (const auto& rr : rules)
      if (rr.rule == r) return &rr;
   return nullptr;
}

bool report::ok(bool strict) const {
   for (const auto& rr : rules) {
      if (rr.audit.clean) {
         if (!rr.safety.ok() || !rr.monotonicity.ok()) return false;
      } else if (strict && rr.confirmations > 0) {
         return false;
      }
   }
   if (p1_applies && !p1.ok()) return false;
   return p2.ok() && p7.ok();
}

report analyze(const trace& tr) {
   const trace_index ix(tr);
   report rep;
   rep.seconds_per_slot = ix.cfg.seconds_per_slot;
   rep.horizon = ix.horizon;
   rep.ggst = ix.ggst;
   rep.configured_beta = ix.cfg.safety.beta;

   // effective receipt: a block is usable once it and all its ancestors arrived
   std::vector<std::vector<tick_t>> eff(ix.blocks.size(), std::vector<tick_t>(ix.n, never));
   for (std::size_t b = 0; b < ix.blocks.size(); ++b) {
      const auto& bi = ix.blocks[b];
      if (!bi.known) continue;
      for (std::size_t v = 0; v < ix.n; ++v) {
         tick_t own = ix.block_recv[b][v];
         eff[b][v] = bi.parent == no_block ? own : std::max(own, eff[static_cast<std::size_t>(bi.parent)][v]);
      }
   }

   // Gasper properties
   std::map<epoch_t, block_t> just_at;
   for (std::size_t b = 0; b < ix.blocks.size(); ++b) {
      const auto& bi = ix.blocks[b];
      if (!bi.known) continue;
      ++rep.p7.checked;
      if (bi.gu.epoch > bi.epoch)
         rep.p7.fail(bi.event, 0, "block " + std::to_string(b) + " has GU " + ck_str(bi.gu) + " above its epoch");
      for (const auto& c : bi.justified) {
         auto [it, fresh] = just_at.emplace(c.epoch, c.block);
         if (fresh) {
            ++rep.p1.checked;
         } else if (it->second != c.block) {
            rep.p1.fail(bi.event, 0,
                        "epoch " + std::to_string(c.epoch) + " has justified blocks " + std::to_string(it->second) +
                            " and " + std::to_string(c.block));
            it->second = c.block;
         }
      }
   }
   for (const auto& h : ix.heads) {
      std::int64_t hi = -1, lo = std::numeric_limits<std::int64_t>::max();
      validator_t hv = 0, lv = 0;
      for (auto v : ix.honest) {
         const auto vi = static_cast<std::size_t>(v);
         const checkpoint& gj = h.gj[vi];
         const checkpoint& gf = h.gf[vi];
         if (h.gj_total[vi] > hi) hi = h.gj_total[vi], hv = v;
         if (h.gj_total[vi] < lo) lo = h.gj_total[vi], lv = v;
         if (gj == checkpoint{} && gf == checkpoint{}) continue;
         ++rep.p2.checked;
         if (!(gf.epoch < gj.epoch && ix.is_ancestor(gf.block, gj.block)))
            rep.p2.fail(h.event, h.tick,
                        "validator " + std::to_string(v) + " has gj " + ck_str(gj) + " not above gf " + ck_str(gf));
      }
      if (hi != lo && !ix.honest.empty()) {
         ++rep.gj_weight_mismatches;
         if (!rep.gj_weight) {
            const auto hvi = static_cast<std::size_t>(hv), lvi = static_cast<std::size_t>(lv);
            rep.gj_weight = gj_weight_note{h.event, h.tick, h.slot, hv, lv, h.gj[hvi], h.gj[lvi], hi, lo};
         }
      }
   }

   // assumption audits shared by all rules
   rep.realized_beta = realized_beta(ix);
   rep.p1_applies = rep.realized_beta < rational(1, 3) - ix.cfg.safety.epsilon;
   bool any_slashing = false;
   for (const auto& bi : ix.blocks) {
      if (!bi.known || bi.slashed.empty()) continue;
      any_slashing = true;
      const balances& w = ix.bal.at(bi.epoch);
      std::int64_t s = 0;
      for (auto v : bi.slashed) s += w[static_cast<std::size_t>(v)];
      rep.max_slashed_weight = std::max(rep.max_slashed_weight, s);
   }
   for (epoch_t e = 1; e <= ix.tm.epoch_of(ix.horizon - 1); ++e) {
      const balances& a = ix.bal.at(e - 1);
      const balances& b = ix.bal.at(e);
      const std::int64_t tot = total_weight(a);
      std::int64_t moved = 0;
      for (std::size_t v = 0; v < ix.n; ++v) {
         if ((a[v] > 0) != (b[v] > 0)) {
            moved += std::max(a[v], b[v]);
         } else if (a[v] > 0 && b[v] > a[v]) {
            rep.realized_reward_rate = max(rep.realized_reward_rate, rational(b[v] - a[v]) / rational(a[v]));
         } else if (a[v] > 0 && b[v] < a[v]) {
            rep.realized_penalty_rate = max(rep.realized_penalty_rate, rational(a[v] - b[v]) / rational(a[v]));
         }
      }
      if (tot > 0) rep.realized_exit_rate = max(rep.realized_exit_rate, rational(moved) / rational(tot));
   }

   for (auto r : ix.cfg.rules) {
      rule_report rr;
      rr.rule = r;
      for (const auto& c : ix.confirms)
         if (c.rule == r && !c.tips.empty()) ++rr.confirmations;
      auto adm = confirm::check_admissible(r, ix.cfg.safety, ix.cfg.protocol.boost_score, ix.tm.slots_per_epoch);
      if (!adm.ok) rr.audit.fail("inadmissible parameters: " + adm.reason);
      if (rep.realized_beta > ix.cfg.safety.beta)
         rr.audit.fail("realized committee fraction " + rep.realized_beta.str() + " above beta " +
                       ix.cfg.safety.beta.str());
      if (ix.cfg.safety.lambda && rational(rep.max_slashed_weight) > *ix.cfg.safety.lambda)
         rr.audit.fail("slashed weight above lambda");
      switch (r) {
         case confirm::rule::lmd:
            if (any_slashing) rr.audit.fail("slashing occurred");
            if (!ix.cfg.churn.empty()) rr.audit.fail("validator set changes");
            for (const auto& h : ix.heads) {
               if (h.tick < ix.ggst) continue;
               bool differ = false;
               for (auto v : ix.honest)
                  if (h.hfc[static_cast<std::size_t>(v)] != h.lmd[static_cast<std::size_t>(v)]) differ = true;
               if (differ) {
                  rr.audit.fail("honest HFC and LMD heads differ after GGST");
                  break;
               }
            }
            break;
         case confirm::rule::hfc:
         case confirm::rule::churn:
            audit_ffg_ratio(ix, rr);
            audit_inclusion(ix, rr, eff);
            break;
         case confirm::rule::appendix:
            audit_inclusion(ix, rr, eff);
            break;
      }
      check_safety(ix, rr);
      check_monotonicity(ix, rr, true);
      check_monotonicity(ix, rr, false);
      rep.rules.push_back(std::move(rr));
   }

   // raw LMD safety flips per observer
   std::map<validator_t, std::set<block_t>> prev;
   for (std::size_t k = 0; k < ix.raw_safe.size(); ++k) {
      const auto& [idx, p] = ix.raw_safe[k];
      const validator_t o = ix.raw_safe_actor[k].second;
      std::set<block_t> cur;
      for (const auto& b : p->at("safe")) cur.insert(b.get<block_t>());
      ++rep.raw_flips.checked;
      if (auto it = prev.find(o); it != prev.end())
         for (auto b : it->second)
            if (!cur.count(b))
               rep.raw_flips.fail(idx, tr.events[idx].tick,
                                  "observer " + std::to_string(o) + ": block " + std::to_string(b) +
                                      " safe at the previous slot, unsafe at slot " +
                                      std::to_string(p->at("slot").get<slot_t>()));
      prev[o] = std::move(cur);
   }

   // latency
   std::map<confirm::rule, std::vector<std::optional<slot_t>>> conf_at;
   for (auto r : ix.cfg.rules) conf_at[r].assign(ix.blocks.size(), std::nullopt);
   std::set<validator_t> obs(ix.observers.begin(), ix.observers.end());
   for (const auto& c : ix.confirms) {
      auto& at = conf_at[c.rule];
      for (auto t : c.tips)
         for (block_t x = t; x != no_block && !at[static_cast<std::size_t>(x)]; x = ix.get(x).parent)
            at[static_cast<std::size_t>(x)] = c.slot;
   }
   std::vector<std::optional<slot_t>> fin_at(ix.blocks.size());
   for (const auto& h : ix.heads) {
      if (!h.start) continue;
      for (auto v : obs) {
         const checkpoint& gf = h.gf[static_cast<std::size_t>(v)];
         for (block_t x = gf.block; x != no_block && !fin_at[static_cast<std::size_t>(x)]; x = ix.get(x).parent)
            fin_at[static_cast<std::size_t>(x)] = h.slot;
      }
   }
   for (std::size_t b = 1; b < ix.blocks.size(); ++b) {
      const auto& bi = ix.blocks[b];
      if (!bi.known) continue;
      latency_row row;
      row.block = static_cast<block_t>(b);
      row.slot = bi.slot;
      row.epoch_start = bi.slot == ix.tm.first_slot(bi.epoch);
      for (auto r : ix.cfg.rules) {
         const auto& at = conf_at[r][b];
         row.confirm[r] = at ? std::optional<slot_t>(*at - bi.slot) : std::nullopt;
      }
      if (fin_at[b]) row.finalize = *fin_at[b] - bi.slot;
      rep.latency.push_back(std::move(row));
   }
   return rep;
}

namespace {
json opt_slots(const std::optional<slot_t>& s) { return s ? json(*s) : json(nullptr); }
json prop_json(const property_result& p) {
   json j{{"checked", p.checked}, {"violations", p.violations}, {"pass", p.ok()}};
   if (p.first) j["first"] = {{"event", p.first->event}, {"tick", p.first->tick}, {"detail", p.first->detail}};
   return j;
}
}  // namespace

json report::to_json() const {
   json j;
   j["pass"] = ok(false);
   j["pass_strict"] = ok(true);
   j["horizon_slots"] = horizon;
   j["ggst"] = ggst;
   j["properties"] = {{"one_justified_per_epoch", prop_json(p1)},
                      {"one_justified_per_epoch_applies", p1_applies},
                      {"gj_above_gf", prop_json(p2)},
                      {"gu_epoch_bound", prop_json(p7)}};
   j["audit"] = {{"realized_beta", realized_beta.str()},
                 {"realized_beta_decimal", realized_beta.to_double()},
                 {"beta", configured_beta.str()},
                 {"max_slashed_weight", max_slashed_weight},
                 {"realized_exit_rate", realized_exit_rate.str()},
                 {"realized_reward_rate", realized_reward_rate.str()},
                 {"realized_penalty_rate", realized_penalty_rate.str()}};
   json rules_j = json::array();
   for (const auto& rr : rules) {
      json a{{"clean", rr.audit.clean}, {"void_reasons", rr.audit.void_reasons}};
      if (rr.audit.min_ffg_ratio) a["min_honest_ffg_ratio"] = rr.audit.min_ffg_ratio->str();
      if (rr.audit.required_ffg_ratio) a["required_honest_ffg_ratio"] = rr.audit.required_ffg_ratio->str();
      rules_j.push_back({{"rule", confirm::to_string(rr.rule)},
                         {"confirmations", rr.confirmations},
                         {"safety", prop_json(rr.safety)},
                         {"monotonicity", prop_json(rr.monotonicity)},
                         {"monotonicity_ungated", prop_json(rr.monotonicity_ungated)},
                         {"assumptions", a}});
   }
   j["rules"] = rules_j;
   j["raw_lmd_safety_flips"] = prop_json(raw_flips);
   json gw{{"mismatches", gj_weight_mismatches}};
   if (gj_weight) {
      const auto& g = *gj_weight;
      gw["first"] = {{"event", g.event},
                     {"tick", g.tick},
                     {"slot", g.slot},
                     {"heavy", {{"validator", g.heavy}, {"gj", ck_json(g.gj_heavy)}, {"total", g.total_heavy}}},
                     {"light", {{"validator", g.light}, {"gj", ck_json(g.gj_light)}, {"total", g.total_light}}},
                     {"epsilon", g.total_heavy - g.total_light},
                     {"precondition", "equal total weight under the greatest justified checkpoint of every honest view"},
                     {"violated", true}};
   }
   j["gj_weight"] = gw;
   json lat = json::array();
   for (const auto& row : latency) {
      json c = json::object();
      for (const auto& [r, v] : row.confirm) c[confirm::to_string(r)] = opt_slots(v);
      lat.push_back({{"block", row.block},
                     {"slot", row.slot},
                     {"epoch_start", row.epoch_start},
                     {"confirm_slots", c},
                     {"finalize_slots", opt_slots(row.finalize)}});
   }
   j["latency"] = {{"seconds_per_slot", seconds_per_slot}, {"rows", lat}};
   return j;
}

std::string report::latency_csv() const {
   std::ostringstream out;
   out << "block,slot,epoch_start,rule,confirm_slots,confirm_seconds,finalize_slots,finalize_seconds,safety,monotonicity\n";
   for (const auto& row : latency) {
      for (const auto& [r, v] : row.confirm) {
         const rule_report* rr = find(r);
         out << row.block << ',' << row.slot << ',' << (row.epoch_start ? 1 : 0) << ',' << confirm::to_string(r) << ',';
         if (v) out << *v << ',' << *v * seconds_per_slot;
         else out << ',';
         out << ',';
         if (row.finalize) out << *row.finalize << ',' << *row.finalize * seconds_per_slot;
         else out << ',';
         out << ',' << (rr && rr->safety.ok() ? "pass" : "fail") << ',' << (rr && rr->monotonicity.ok() ? "pass" : "fail")
             << '\n';
      }
   }
   return out.str();
}

std::string report::latency_text() const {
   std::ostringstream out;
   auto cell = [&](const std::optional<slot_t>& v) {
      std::ostringstream c;
      if (v) c << *v * seconds_per_slot << " s";
      else c << "-";
      return c.str();
   };
   std::vector<confirm::rule> rs;
   if (!latency.empty())
      for (const auto& [r, _] : latency.front().confirm) rs.push_back(r);
   out << std::left << std::setw(7) << "block" << std::setw(7) << "slot";
   for (auto r : rs) out << std::setw(10) << confirm::to_string(r);
   out << "final\n";
   for (const auto& row : latency) {
      out << std::setw(7) << row.block << std::setw(7) << row.slot;
      for (auto r : rs) out << std::setw(10) << cell(row.confirm.at(r));
      out << cell(row.finalize) << '\n';
   }
   for (const auto& row : latency) {
      if (!row.epoch_start || !row.finalize) continue;
      out << "first slot of epoch, block " << row.block << ": finality " << *row.finalize << " slots ("
          << cell(row.finalize) << ")";
      for (auto r : rs)
         if (row.confirm.at(r)) out << ", " << confirm::to_string(r) << " " << *row.confirm.at(r) << " slots (" << cell(row.confirm.at(r)) << ")";
      out << '\n';
   }
   return out.str();
}

}  // namespace gasper::monitor

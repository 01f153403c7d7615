#include "gasper/simulator.hpp"

#include "gasper/confirmation.hpp"
#include "gasper/fork_choice.hpp"
#include "gasper/view.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <tuple>

namespace gasper {

using nlohmann::json;

namespace {

json ckpt_json(const checkpoint& c) { return json::array({c.block, c.epoch}); }

std::string hex(std::uint64_t x) {
   char buf[17];
   std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
   return buf;
}

enum class ev_type : std::uint8_t { deliver_block, deliver_att, deliver_ghost, deliver_ffg, slot_start, vote_time,
                                    adv_propose, adv_attest, release, script };

// class 0: deliveries, 1: honest duties, 2: adversary actions
struct sim_event {
   tick_t tick;
   int cls;
   std::uint64_t seq;
   ev_type type;
   std::int64_t a = 0;
   std::int64_t b = 0;
   std::int64_t c = 0;
   bool operator>(const sim_event& o) const { return std::tie(tick, cls, seq) > std::tie(o.tick, o.cls, o.seq); }
};

struct message {
   enum kind_t { block, attestation, ghost, ffg } kind;
   std::int32_t id = 0;   ///< block, ghost vote or ffg vote id
   std::int32_t id2 = -1; ///< ffg vote id of an attestation
   slot_t slot = 0;
};

const char* to_string(message::kind_t k) {
   switch (k) {
      case message::block: return "block";
      case message::attestation: return "attestation";
      case message::ghost: return "ghost";
      case message::ffg: return "ffg";
   }
   return "?";
}

class simulator {
 public:
   explicit simulator(const scenario& cfg);
   trace run(run_stats* stats);

 private:
   void schedule(tick_t t, int cls, ev_type type, std::int64_t a = 0, std::int64_t b = 0, std::int64_t c = 0) {
      queue_.push({t, cls, seq_++, type, a, b, c});
   }
   bool honest(validator_t v) const { return !adversarial_[static_cast<std::size_t>(v)]; }
   view& view_of(validator_t v) { return honest(v) ? *views_[static_cast<std::size_t>(v)] : *adv_view_; }

   const fork_choice::head_info& heads_for(const view& vw, slot_t s, block_t boosted);
   const fork_choice::head_info& head_of(validator_t v, slot_t s);
   const fork_choice::head_info& adv_head(slot_t s) { return heads_for(*adv_view_, s, no_block); }

   void send(validator_t from, const message& m, tick_t t, const std::vector<char>* to = nullptr,
             std::optional<tick_t> pinned = std::nullopt);
   void receive(validator_t v, const message& m, tick_t t);

   void on_slot_start(slot_t s);
   void on_vote_time(slot_t s);
   void log_heads(slot_t s, const char* phase);

   std::vector<std::int32_t> pending_ffg(const view& vw, block_t parent, epoch_t e) const;
   std::vector<slashing_evidence> pending_evidence(const view& vw, block_t parent) const;
   block_t make_block(validator_t p, slot_t s, block_t parent, const view& vw, std::uint64_t nonce, bool include = true);
   void log_block(block_t b, tick_t t, const std::string& label = {});
   std::pair<std::int32_t, std::int32_t> make_attestation(validator_t v, slot_t s, block_t head);
   void log_attestation(validator_t v, slot_t s, std::int32_t gid, std::int32_t fid, tick_t t, const char* kind);

   void adversary_propose(validator_t p, slot_t s);
   void adversary_attest(validator_t v, slot_t s);
   void honest_like_propose(validator_t p, slot_t s);
   void honest_like_attest(validator_t v, slot_t s);
   bool coin(double fraction);
   void run_script(std::size_t idx, tick_t t);
   block_t resolve(const json& label, slot_t s) const;
   std::vector<char> recipients(const json& who) const;

   const scenario& cfg_;
   timing tm_;
   balance_schedule bal_;
   std::size_t n_;
   std::vector<char> adversarial_;
   std::vector<validator_t> honest_ids_, adversary_ids_;
   committee_schedule sched_;
   block_store store_;
   std::vector<std::unique_ptr<view>> views_;
   std::unique_ptr<view> adv_view_;
   std::vector<std::pair<slot_t, block_t>> boost_;
   std::mt19937_64 net_rng_, adv_rng_;
   std::priority_queue<sim_event, std::vector<sim_event>, std::greater<>> queue_;
   std::uint64_t seq_ = 0;
   slot_t horizon_;
   trace tr_;
   run_stats stats_;

   struct observer {
      validator_t id;
      std::vector<confirm::executor> exec;
   };
   std::vector<observer> observers_;
   std::map<std::tuple<std::uint64_t, slot_t, block_t>, fork_choice::head_info> memo_;
   std::vector<fork_choice::head_info> heads_;

   std::map<std::string, block_t> labels_;
   std::map<slot_t, block_t> honest_block_at_;
   std::set<std::pair<validator_t, slot_t>> skip_;
   bool script_silent_default_ = false;
   std::vector<json> actions_;
   std::vector<message> withheld_;
   std::map<slot_t, block_t> withheld_block_;
};

simulator::simulator(const scenario& cfg)
    : cfg_(cfg),
      tm_(cfg.time),
      bal_(cfg.initial_balances(), cfg.churn),
      n_(cfg.validators),
      adversarial_(cfg.validators, 0),
      sched_(cfg.time, cfg.seed, &bal_, cfg.adversary_ids(), cfg.adversary.balanced),
      store_(cfg.time, &bal_, cfg.safety.sigma, &sched_),
      net_rng_(mix64(cfg.seed, 0x6e6574)),
      adv_rng_(mix64(cfg.seed, 0x616476)),
      horizon_(cfg.horizon()) {
   cfg.validate();
   for (auto v : cfg.adversary_ids()) adversarial_[static_cast<std::size_t>(v)] = 1;
   for (std::size_t v = 0; v < n_; ++v)
      (adversarial_[v] ? adversary_ids_ : honest_ids_).push_back(static_cast<validator_t>(v));
   for (const auto& [e, j] : cfg.schedule_override) {
      epoch_committees c;
      c.by_slot = j.at("committees").get<std::vector<std::vector<validator_t>>>();
      c.proposers = j.at("proposers").get<std::vector<validator_t>>();
      try {
         sched_.set_override(e, std::move(c));
      } catch (const std::invalid_argument& ex) {
         throw config_error("schedule_override." + std::to_string(e) + ": " + ex.what());
      }
   }
   views_.resize(n_);
   for (auto v : honest_ids_) views_[static_cast<std::size_t>(v)] = std::make_unique<view>(store_, sched_);
   adv_view_ = std::make_unique<view>(store_, sched_);
   boost_.assign(n_, {-1, no_block});
   heads_.resize(n_);

   std::vector<validator_t> obs = cfg.observers;
   if (obs.empty())
      for (std::size_t k = 0; k < honest_ids_.size() && k < 4; ++k) obs.push_back(honest_ids_[k]);
   for (auto o : obs) {
      observer ob{o, {}};
      for (auto r : cfg.rules) ob.exec.emplace_back(r);
      observers_.push_back(std::move(ob));
   }

   if (cfg.adversary.kind == strategy::scripted) {
      const json& sc = cfg.adversary.script;
      const json actions = sc.is_array() ? sc : sc.value("actions", json::array());
      if (sc.is_object()) {
         script_silent_default_ = sc.value("default", std::string("honest")) == "silent";
         for (const auto& p : sc.value("skip", json::array()))
            skip_.insert({p.at(0).get<validator_t>(), p.at(1).get<slot_t>()});
      }
      for (const auto& a : actions) actions_.push_back(a);
   }
}

const fork_choice::head_info& simulator::heads_for(const view& vw, slot_t s, block_t boosted) {
   auto key = std::make_tuple(vw.head_digest(), s, boosted);
   auto it = memo_.find(key);
   if (it != memo_.end()) return it->second;
   ++stats_.head_computations;
   return memo_.emplace(key, fork_choice::compute_heads(vw, s, cfg_.protocol, boosted, true)).first->second;
}

const fork_choice::head_info& simulator::head_of(validator_t v, slot_t s) {
   const auto& bs = boost_[static_cast<std::size_t>(v)];
   return heads_for(*views_[static_cast<std::size_t>(v)], s, bs.first == s ? bs.second : no_block);
}

void simulator::send(validator_t from, const message& m, tick_t t, const std::vector<char>* to,
                     std::optional<tick_t> pinned) {
   const tick_t bound = std::max(t, cfg_.gst) + cfg_.delta;
   constexpr tick_t never = std::numeric_limits<tick_t>::max();
   std::vector<tick_t> at(n_, never);
   receive(-1, m, t);  // adversary view is omniscient
   tick_t first = never;
   if (honest(from)) {
      at[static_cast<std::size_t>(from)] = t;
      receive(from, m, t);
      first = t;
   }
   if (!pinned) pinned = cfg_.pinned_delay;
   for (auto v : honest_ids_) {
      const auto vi = static_cast<std::size_t>(v);
      if (v == from || (to && !(*to)[vi])) continue;
      tick_t d = pinned ? std::min(t + *pinned, bound)
                        : t + static_cast<tick_t>(uniform_below(net_rng_, static_cast<std::uint64_t>(bound - t + 1)));
      for (const auto& h : cfg_.holds) {
         const bool kind_ok = (h.what == "block") == (m.kind == message::block);
         if (kind_ok && h.slot == m.slot && std::find(h.to.begin(), h.to.end(), v) != h.to.end())
            d = std::max(d, std::min(h.until, bound));
      }
      at[vi] = d;
      first = std::min(first, d);
   }
   if (first != never) {
      const tick_t clamp = std::max(first, cfg_.gst) + cfg_.delta;
      for (auto v : honest_ids_) {
         const auto vi = static_cast<std::size_t>(v);
         if (v == from) continue;
         at[vi] = std::min(at[vi], clamp);
         ev_type ty = m.kind == message::block         ? ev_type::deliver_block
                      : m.kind == message::attestation ? ev_type::deliver_att
                      : m.kind == message::ghost       ? ev_type::deliver_ghost
                                                       : ev_type::deliver_ffg;
         schedule(at[vi], 0, ty, v, m.id, m.id2);
      }
   }
   json deliver = json::array();
   for (std::size_t v = 0; v < n_; ++v) deliver.push_back(adversarial_[v] ? t : (at[v] == never ? -1 : at[v]));
   json p{{"msg", to_string(m.kind)}, {"id", m.id}, {"at", std::move(deliver)}};
   if (m.kind == message::attestation) p["ffg"] = m.id2;
   tr_.add(t, "deliver", from, std::move(p));
}

void simulator::receive(validator_t v, const message& m, tick_t t) {
   view& vw = v < 0 ? *adv_view_ : *views_[static_cast<std::size_t>(v)];
   switch (m.kind) {
      case message::block: {
         auto entered = vw.receive_block(m.id, t);
         if (v < 0) break;
         auto& bs = boost_[static_cast<std::size_t>(v)];
         for (auto x : entered) {
            const block& b = store_.get(x);
            const slot_t cur = tm_.slot_at(t);
            if (b.slot == cur && t < tm_.vote_time(cur) && b.proposer == sched_.proposer(cur) && bs.first != cur)
               bs = {cur, x};
         }
         break;
      }
      case message::attestation:
         vw.receive_ghost(m.id, t);
         vw.receive_ffg(m.id2, t);
         break;
      case message::ghost: vw.receive_ghost(m.id, t); break;
      case message::ffg: vw.receive_ffg(m.id, t); break;
   }
}

std::vector<std::int32_t> simulator::pending_ffg(const view& vw, block_t parent, epoch_t e) const {
   std::set<std::int32_t> included;
   for (block_t x = parent; x != no_block; x = store_.get(x).parent) {
      const block& b = store_.get(x);
      if (b.epoch < e - 1) break;
      included.insert(b.ffg_votes.begin(), b.ffg_votes.end());
   }
   std::vector<std::int32_t> out;
   for (auto id : vw.ffg_ids()) {
      const ffg_vote& fv = store_.ffg(id);
      if ((fv.target.epoch == e || fv.target.epoch == e - 1) && !included.count(id)) out.push_back(id);
   }
   std::sort(out.begin(), out.end());
   return out;
}

std::vector<slashing_evidence> simulator::pending_evidence(const view& vw, block_t parent) const {
   const auto& slashed = *store_.get(parent).slashed;
   std::map<validator_t, std::vector<std::int32_t>> by_signer;
   for (auto id : vw.ffg_ids()) {
      const ffg_vote& fv = store_.ffg(id);
      if (!slashed[static_cast<std::size_t>(fv.signer)]) by_signer[fv.signer].push_back(id);
   }
   std::vector<slashing_evidence> out;
   for (auto& [signer, ids] : by_signer) {
      std::sort(ids.begin(), ids.end());
      bool done = false;
      for (std::size_t i = 0; i < ids.size() && !done; ++i)
         for (std::size_t j = i + 1; j < ids.size() && !done; ++j)
            if (store_.is_slashable(store_.ffg(ids[i]), store_.ffg(ids[j]))) {
               out.push_back({ids[i], ids[j]});
               done = true;
            }
   }
   return out;
}

block_t simulator::make_block(validator_t p, slot_t s, block_t parent, const view& vw, std::uint64_t nonce,
                              bool include) {
   std::vector<std::int32_t> votes;
   std::vector<slashing_evidence> evidence;
   if (include) {
      votes = pending_ffg(vw, parent, tm_.epoch_of(s));
      evidence = pending_evidence(vw, parent);
   }
   const std::size_t before = store_.size();
   block_t id = store_.add_block(parent, s, p, std::move(votes), std::move(evidence), nonce);
   if (store_.size() > before) ++stats_.blocks;
   return id;
}

void simulator::log_block(block_t id, tick_t t, const std::string& label) {
   const block& b = store_.get(id);
   json just = json::array(), fin = json::array(), slashed = json::array();
   for (const auto& c : b.ffg->justified) just.push_back(ckpt_json(c));
   for (const auto& c : b.ffg->finalized) fin.push_back(ckpt_json(c));
   for (std::size_t v = 0; v < b.slashed->size(); ++v)
      if ((*b.slashed)[v]) slashed.push_back(v);
   json p{{"id", id},
          {"root", hex(b.root)},
          {"parent", b.parent},
          {"slot", b.slot},
          {"epoch", b.epoch},
          {"proposer", b.proposer},
          {"gu", ckpt_json(b.gu)},
          {"gj", ckpt_json(b.gj)},
          {"uf", ckpt_json(b.uf)},
          {"gf", ckpt_json(b.gf)},
          {"justified", std::move(just)},
          {"finalized", std::move(fin)},
          {"total", b.total},
          {"slashed", std::move(slashed)},
          {"ffg_votes", b.ffg_votes},
          {"evidence", b.evidence.size()}};
   if (!label.empty()) p["label"] = label;
   tr_.add(t, "block", b.proposer, std::move(p));
}

std::pair<std::int32_t, std::int32_t> simulator::make_attestation(validator_t v, slot_t s, block_t head) {
   const epoch_t e = tm_.epoch_of(s);
   auto gid = store_.add_ghost_vote({v, s, head});
   auto fid = store_.add_ffg_vote({v, store_.voting_source(head, e), store_.checkpoint_of(head, e), s});
   return {gid, fid};
}

void simulator::log_attestation(validator_t v, slot_t s, std::int32_t gid, std::int32_t fid, tick_t t,
                                const char* kind) {
   json p{{"slot", s}};
   if (gid >= 0) p["ghost"] = {{"id", gid}, {"block", store_.ghost(gid).block}, {"slot", store_.ghost(gid).slot}};
   if (fid >= 0) {
      const ffg_vote& fv = store_.ffg(fid);
      p["ffg"] = {{"id", fid}, {"source", ckpt_json(fv.source)}, {"target", ckpt_json(fv.target)}};
   }
   tr_.add(t, kind, v, std::move(p));
}

void simulator::log_heads(slot_t s, const char* phase) {
   json hfc = json::array(), lmd = json::array(), gj = json::array(), gf = json::array(), tot = json::array();
   for (std::size_t v = 0; v < n_; ++v) {
      if (adversarial_[v]) {
         hfc.push_back(-1);
         lmd.push_back(-1);
         gj.push_back(nullptr);
         gf.push_back(nullptr);
         tot.push_back(-1);
         continue;
      }
      const auto& h = heads_[v];
      hfc.push_back(h.head);
      lmd.push_back(h.lmd_head);
      gj.push_back(ckpt_json(h.gj));
      gf.push_back(ckpt_json(h.gf));
      tot.push_back(store_.get(h.gj.block).total);
   }
   tr_.add(phase[0] == 's' ? tm_.slot_start(s) : tm_.vote_time(s), "head", -1,
           {{"slot", s}, {"phase", phase}, {"hfc", hfc}, {"lmd", lmd}, {"gj", gj}, {"gf", gf}, {"gj_total", tot}});
}

void simulator::on_slot_start(slot_t s) {
   const tick_t t = tm_.slot_start(s);
   memo_.clear();
   const epoch_t e = tm_.epoch_of(s);
   if (s == tm_.first_slot(e) && e > 0) {
      json entries = json::array();
      for (const auto& c : cfg_.churn)
         if (c.epoch == e) {
            json x{{"validator", c.validator}, {"kind", to_string(c.kind)}};
            if (c.kind == churn_kind::reward || c.kind == churn_kind::penalty) x["rate"] = to_json(c.rate);
            if (c.kind == churn_kind::entry) x["amount"] = c.amount;
            entries.push_back(x);
         }
      if (!entries.empty()) tr_.add(t, "churn", -1, {{"epoch", e}, {"entries", entries}});
   }
   for (auto v : honest_ids_) heads_[static_cast<std::size_t>(v)] = head_of(v, s);
   log_heads(s, "start");

   for (auto& ob : observers_) {
      const view& vw = *views_[static_cast<std::size_t>(ob.id)];
      confirm::evaluator ev(vw, t, cfg_.protocol, cfg_.safety);
      const auto& h = heads_[static_cast<std::size_t>(ob.id)];
      for (auto& ex : ob.exec) {
         block_t head = ex.which() == confirm::rule::lmd ? h.lmd_head : h.head;
         auto res = ex.on_slot_start(ev, head);
         tr_.add(t, "confirm", ob.id,
                 {{"slot", s}, {"rule", confirm::to_string(ex.which())}, {"best", res.best}, {"tips", res.tips}});
      }
      if (cfg_.log_raw_safe) {
         json safe = json::array();
         for (auto b : vw.blocks()) {
            if (b == store_.genesis() || store_.get(b).slot >= s) continue;
            if (ev.is_lmd_ghost_safe(b, ev.gj(), false)) safe.push_back(b);
         }
         tr_.add(t, "lmd_safe", ob.id, {{"slot", s}, {"gj", ckpt_json(ev.gj())}, {"safe", safe}});
      }
   }

   if (s < 1) return;
   const validator_t p = sched_.proposer(s);
   if (p < 0) return;
   if (honest(p)) {
      const view& vw = *views_[static_cast<std::size_t>(p)];
      block_t id = make_block(p, s, heads_[static_cast<std::size_t>(p)].head, vw, 0);
      honest_block_at_[s] = id;
      log_block(id, t);
      send(p, {message::block, id, -1, s}, t);
   } else {
      schedule(t, 2, ev_type::adv_propose, p, s);
   }
}

void simulator::on_vote_time(slot_t s) {
   const tick_t t = tm_.vote_time(s);
   for (auto v : honest_ids_) heads_[static_cast<std::size_t>(v)] = head_of(v, s);
   log_heads(s, "vote");
   for (auto v : sched_.committee(s)) {
      if (!honest(v)) {
         schedule(t, 2, ev_type::adv_attest, v, s);
         continue;
      }
      auto [gid, fid] = make_attestation(v, s, heads_[static_cast<std::size_t>(v)].head);
      log_attestation(v, s, gid, fid, t, "attestation");
      send(v, {message::attestation, gid, fid, s}, t);
   }
}

bool simulator::coin(double fraction) {
   constexpr std::uint64_t scale = 1'000'000;
   return uniform_below(adv_rng_, scale) < static_cast<std::uint64_t>(fraction * scale);
}

void simulator::honest_like_propose(validator_t p, slot_t s) {
   const tick_t t = tm_.slot_start(s);
   block_t id = make_block(p, s, adv_head(s).head, *adv_view_, 0);
   log_block(id, t);
   send(p, {message::block, id, -1, s}, t);
}

void simulator::honest_like_attest(validator_t v, slot_t s) {
   const tick_t t = tm_.vote_time(s);
   auto [gid, fid] = make_attestation(v, s, adv_head(s).head);
   log_attestation(v, s, gid, fid, t, "attestation");
   send(v, {message::attestation, gid, fid, s}, t);
}

void simulator::adversary_propose(validator_t p, slot_t s) {
   if (skip_.count({p, s})) return;
   const tick_t t = tm_.slot_start(s);
   switch (cfg_.adversary.kind) {
      case strategy::silent:
         if (!coin(cfg_.adversary.silent_fraction)) honest_like_propose(p, s);
         return;
      case strategy::conflicting_ffg: honest_like_propose(p, s); return;
      case strategy::scripted:
         if (!script_silent_default_) honest_like_propose(p, s);
         return;
      case strategy::equivocate: {
         block_t parent = adv_head(s).head;
         block_t a = make_block(p, s, parent, *adv_view_, 1);
         block_t b = make_block(p, s, parent, *adv_view_, 2);
         std::vector<char> first(n_, 0), second(n_, 0);
         for (std::size_t k = 0; k < honest_ids_.size(); ++k)
            (k < honest_ids_.size() / 2 ? first : second)[static_cast<std::size_t>(honest_ids_[k])] = 1;
         log_block(a, t);
         log_block(b, t);
         send(p, {message::block, a, -1, s}, t, &first);
         send(p, {message::block, b, -1, s}, t, &second);
         return;
      }
      case strategy::withhold_release: {
         block_t w = make_block(p, s, adv_head(s).head, *adv_view_, 0);
         log_block(w, t);
         receive(-1, {message::block, w, -1, s}, t);
         withheld_block_[s] = w;
         withheld_.push_back({message::block, w, -1, s});
         const tick_t rel = std::max(tm_.vote_time(s + 1) - 1, t);
         schedule(rel, 2, ev_type::release, s);
         return;
      }
   }
}

void simulator::adversary_attest(validator_t v, slot_t s) {
   if (skip_.count({v, s})) return;
   const tick_t t = tm_.vote_time(s);
   switch (cfg_.adversary.kind) {
      case strategy::silent:
         if (!coin(cfg_.adversary.silent_fraction)) honest_like_attest(v, s);
         return;
      case strategy::scripted:
         if (!script_silent_default_) honest_like_attest(v, s);
         return;
      case strategy::equivocate: {
         block_t h = adv_head(s).head;
         auto [gid, fid] = make_attestation(v, s, h);
         log_attestation(v, s, gid, fid, t, "attestation");
         send(v, {message::attestation, gid, fid, s}, t);
         if (h != store_.genesis()) {
            auto g2 = store_.add_ghost_vote({v, s, store_.get(h).parent});
            log_attestation(v, s, g2, -1, t, "ghost_vote");
            send(v, {message::ghost, g2, -1, s}, t);
         }
         return;
      }
      case strategy::withhold_release: {
         auto it = withheld_block_.find(s);
         if (it == withheld_block_.end()) {
            honest_like_attest(v, s);
            return;
         }
         auto [gid, fid] = make_attestation(v, s, it->second);
         log_attestation(v, s, gid, fid, t, "attestation");
         message m{message::attestation, gid, fid, s};
         receive(-1, m, t);
         withheld_.push_back(m);
         return;
      }
      case strategy::conflicting_ffg: {
         block_t h = adv_head(s).head;
         const epoch_t e = tm_.epoch_of(s);
         const checkpoint src = store_.voting_source(h, e);
         const checkpoint tgt = store_.checkpoint_of(h, e);
         auto gid = store_.add_ghost_vote({v, s, h});
         log_attestation(v, s, gid, -1, t, "ghost_vote");
         send(v, {message::ghost, gid, -1, s}, t);
         if (tgt.block == store_.genesis()) {
            auto fid = store_.add_ffg_vote({v, src, tgt, s});
            log_attestation(v, s, -1, fid, t, "ffg_vote");
            send(v, {message::ffg, fid, -1, s}, t);
            return;
         }
         checkpoint alt{store_.get(tgt.block).parent, e};
         auto bad = store_.add_ffg_vote({v, src, alt, s});
         log_attestation(v, s, -1, bad, t, "ffg_vote");
         send(v, {message::ffg, bad, -1, s}, t);
         if (cfg_.adversary.slashable) {
            auto fid = store_.add_ffg_vote({v, src, tgt, s});
            log_attestation(v, s, -1, fid, t, "ffg_vote");
            send(v, {message::ffg, fid, -1, s}, t);
         }
         return;
      }
   }
}

block_t simulator::resolve(const json& label, slot_t s) const {
   if (label.is_number_integer()) return label.get<block_t>();
   const auto name = label.get<std::string>();
   if (name == "genesis") return store_.genesis();
   if (name == "head") {
      return const_cast<simulator*>(this)->adv_head(s).head;
   }
   if (name.rfind("honest@", 0) == 0) {
      const slot_t at = std::stoll(name.substr(7));
      auto it = honest_block_at_.find(at);
      if (it == honest_block_at_.end()) throw config_error("script: no honest block at slot " + std::to_string(at));
      return it->second;
   }
   auto it = labels_.find(name);
   if (it == labels_.end()) throw config_error("script: unknown label '" + name + "'");
   return it->second;
}

std::vector<char> simulator::recipients(const json& who) const {
   std::vector<char> to(n_, 0);
   if (who.is_string()) {
      const auto w = who.get<std::string>();
      if (w == "all")
         std::fill(to.begin(), to.end(), 1);
      else if (w != "none")
         throw config_error("script: bad recipient set '" + w + "'");
      return to;
   }
   for (const auto& v : who) to.at(v.get<std::size_t>()) = 1;
   return to;
}

void simulator::run_script(std::size_t idx, tick_t t) {
   const json& a = actions_[idx];
   const slot_t s = tm_.slot_at(t);
   const std::string what = a.at("do").get<std::string>();
   auto to = recipients(a.value("to", json("all")));
   std::optional<tick_t> pinned;
   if (a.contains("delay")) pinned = a.at("delay").get<tick_t>();
   auto ckpt = [&](const json& j) { return checkpoint{resolve(j.at("block"), s), j.at("epoch").get<epoch_t>()}; };
   if (what == "propose") {
      const slot_t bs = a.value("slot", s);
      const validator_t p = a.contains("proposer") ? a.at("proposer").get<validator_t>() : sched_.proposer(bs);
      const block_t parent = resolve(a.value("parent", json("head")), s);
      const std::string label = a.value("label", std::string());
      block_t id = make_block(p, bs, parent, *adv_view_, a.value("nonce", std::uint64_t{7}), a.value("include", true));
      if (!label.empty()) labels_[label] = id;
      log_block(id, t, label);
      send(p, {message::block, id, -1, bs}, t, &to, pinned);
   } else if (what == "ghost_vote") {
      const validator_t v = a.at("signer").get<validator_t>();
      auto gid = store_.add_ghost_vote({v, a.value("vote_slot", s), resolve(a.at("block"), s)});
      log_attestation(v, a.value("vote_slot", s), gid, -1, t, "ghost_vote");
      send(v, {message::ghost, gid, -1, a.value("vote_slot", s)}, t, &to, pinned);
   } else if (what == "ffg_vote") {
      const validator_t v = a.at("signer").get<validator_t>();
      auto fid = store_.add_ffg_vote({v, ckpt(a.at("source")), ckpt(a.at("target")), a.value("vote_slot", s)});
      log_attestation(v, a.value("vote_slot", s), -1, fid, t, "ffg_vote");
      send(v, {message::ffg, fid, -1, a.value("vote_slot", s)}, t, &to, pinned);
   } else if (what == "release") {
      const block_t b = resolve(a.at("block"), s);
      send(store_.get(b).proposer, {message::block, b, -1, store_.get(b).slot}, t, &to, pinned);
   } else {
      throw config_error("script: unknown action '" + what + "'");
   }
}

trace simulator::run(run_stats* stats) {
   json meta;
   meta["config"] = to_json(cfg_);
   meta["adversaries"] = adversary_ids_;
   meta["honest"] = honest_ids_;
   meta["ggst"] = tm_.ggst(cfg_.gst);
   meta["horizon_slots"] = horizon_;
   json epochs = json::array();
   for (epoch_t e = 0; e <= tm_.epoch_of(horizon_ - 1); ++e) {
      const auto& c = sched_.at_epoch(e);
      epochs.push_back({{"epoch", e}, {"committees", c.by_slot}, {"proposers", c.proposers}});
   }
   meta["schedule"] = std::move(epochs);
   json obs = json::array();
   for (const auto& o : observers_) obs.push_back(o.id);
   meta["observers"] = obs;
   tr_.add(0, "meta", -1, std::move(meta));

   for (slot_t s = 0; s < horizon_; ++s) {
      schedule(tm_.slot_start(s), 1, ev_type::slot_start, s);
      schedule(tm_.vote_time(s), 1, ev_type::vote_time, s);
   }
   for (std::size_t k = 0; k < actions_.size(); ++k) {
      const auto& a = actions_[k];
      tick_t at = tm_.slot_start(a.at("at_slot").get<slot_t>()) + a.value("offset", tick_t{0});
      schedule(at, 2, ev_type::script, static_cast<std::int64_t>(k));
   }

   const tick_t end = tm_.slot_start(horizon_);
   while (!queue_.empty()) {
      sim_event ev = queue_.top();
      queue_.pop();
      if (ev.tick >= end) break;
      ++stats_.events;
      const auto v = static_cast<validator_t>(ev.a);
      switch (ev.type) {
         case ev_type::deliver_block: receive(v, {message::block, static_cast<std::int32_t>(ev.b)}, ev.tick); break;
         case ev_type::deliver_att:
            receive(v, {message::attestation, static_cast<std::int32_t>(ev.b), static_cast<std::int32_t>(ev.c)}, ev.tick);
            break;
         case ev_type::deliver_ghost: receive(v, {message::ghost, static_cast<std::int32_t>(ev.b)}, ev.tick); break;
         case ev_type::deliver_ffg: receive(v, {message::ffg, static_cast<std::int32_t>(ev.b)}, ev.tick); break;
         case ev_type::slot_start: on_slot_start(ev.a); break;
         case ev_type::vote_time: on_vote_time(ev.a); break;
         case ev_type::adv_propose: adversary_propose(v, ev.b); break;
         case ev_type::adv_attest: adversary_attest(v, ev.b); break;
         case ev_type::release: {
            std::vector<message> out;
            for (const auto& m : withheld_)
               if (m.slot == ev.a) out.push_back(m);
            for (const auto& m : out) {
               validator_t from = m.kind == message::block ? store_.get(m.id).proposer : store_.ghost(m.id).signer;
               send(from, m, ev.tick);
            }
            break;
         }
         case ev_type::script: run_script(static_cast<std::size_t>(ev.a), ev.tick); break;
      }
   }
   tr_.add(end, "end", -1, {{"horizon_slots", horizon_}, {"blocks", store_.size()}});
   if (stats) *stats = stats_;
   return std::move(tr_);
}

}  // namespace

trace run_scenario(const scenario& cfg, run_stats* stats) {
   simulator sim(cfg);
   return sim.run(stats);
}

}  // namespace gasper

#include "gasper/confirmation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gasper::confirm {

const char* to_string(rule r) {
   switch (r) {
      case rule::lmd: return "lmd";
      case rule::hfc: return "hfc";
      case rule::churn: return "churn";
      case rule::appendix: return "appendix";
   }
   return "?";
}

rule rule_from_string(const std::string& s) {
   if (s == "lmd") return rule::lmd;
   if (s == "hfc") return rule::hfc;
   if (s == "churn") return rule::churn;
   if (s == "appendix") return rule::appendix;
   throw config_error("unknown rule: " + s);
}

rational hon_ffg_ratio(const rational& beta) {
   if (beta < rational(0) || beta > rational(1, 6))
      throw std::domain_error("honest FFG ratio needs 0 <= beta <= 1/6");
   return (rational(2, 3) + beta) / (rational(1) - beta);
}

rational hon_ffg_ratio_var(const rational& beta, const rational& rho, const rational& pi, const rational& chi) {
   if (beta < rational(0) || beta > rational(1, 6))
      throw std::domain_error("honest FFG ratio needs 0 <= beta <= 1/6");
   rational one(1);
   return (rational(2, 3) * (one + rho - chi * rho) / (one - pi) + chi + beta) / (one - beta);
}

rational lmd_beta_bound(const rational& boost_score, std::int64_t slots_per_epoch) {
   return rational(1, 4) * (rational(1) - boost_score / rational(slots_per_epoch));
}

double appendix_beta_bound(const rational& boost_score, std::int64_t slots_per_epoch) {
   double pe = (boost_score / rational(slots_per_epoch)).to_double();
   return (5.0 - std::sqrt(9.0 + 16.0 * pe)) / 8.0;
}

bool below_appendix_bound(const rational& beta, const rational& boost_score, std::int64_t slots_per_epoch) {
   // beta < (5 - sqrt(x)) / 8  <=>  5 - 8 beta > 0  and  (5 - 8 beta)^2 > x
   rational lhs = rational(5) - rational(8) * beta;
   if (lhs <= rational(0)) return false;
   rational x = rational(9) + rational(16) * boost_score / rational(slots_per_epoch);
   return lhs * lhs > x;
}

rational lmd_support_threshold(std::int64_t window, const rational& boost, const rational& beta) {
   rational w(window);
   return rational(1, 2) * (w + boost) + beta * w;
}

rational lmd_support_threshold_full(std::int64_t window, std::int64_t total, const rational& boost,
                                    const safety_params& sp) {
   rational one(1), w(window);
   rational factor = (one + sp.rho) / (rational(2) * (one - sp.pi));
   return factor * (w + boost * (one + sp.chi + sp.rho)) + sp.chi * rational(total) + sp.beta * w;
}

namespace {
rational slack(std::int64_t total, const safety_params& sp) {
   rational bt = sp.beta * rational(total);
   return sp.lambda ? min(*sp.lambda, bt) : bt;
}
}  // namespace

rational justification_threshold(std::int64_t total, const safety_params& sp) {
   return rational(2, 3) * rational(total) + slack(total, sp);
}

rational justification_threshold_full(std::int64_t total, const safety_params& sp) {
   rational one(1);
   rational f = rational(2, 3) * (one + sp.rho - sp.chi * sp.rho) / (one - sp.pi) + sp.chi;
   return rational(total) * f + slack(total, sp);
}

admissibility check_admissible(rule r, const safety_params& sp, const rational& boost_score,
                               std::int64_t slots_per_epoch) {
   admissibility out;
   auto fail = [&](std::string why) {
      out.ok = false;
      out.reason = std::move(why);
      return out;
   };
   if (sp.beta < rational(0) || sp.beta >= rational(1)) return fail("beta outside [0,1)");
   const rational third_eps = rational(1, 3) - sp.epsilon;
   switch (r) {
      case rule::lmd:
         if (!(sp.beta < lmd_beta_bound(boost_score, slots_per_epoch)))
            return fail("beta >= 1/4 (1 - p/E) = " + lmd_beta_bound(boost_score, slots_per_epoch).str());
         break;
      case rule::hfc:
         if (!(sp.beta < min(rational(1, 6), third_eps))) return fail("beta >= min(1/6, 1/3 - epsilon)");
         break;
      case rule::churn: {
         if (!(sp.beta < min(rational(1, 6), third_eps))) return fail("beta >= min(1/6, 1/3 - epsilon)");
         rational one(1);
         if (sp.sigma < sp.pi) return fail("sigma < pi");
         if (!(sp.chi < rational(2, 3))) return fail("chi >= 2/3");
         if (one < sp.pi + sp.chi * (one + sp.rho)) return fail("pi + chi (1 + rho) > 1");
         rational rhs = boost_score / rational(2 * slots_per_epoch) + rational(2) * sp.chi / (one - sp.pi) +
                        sp.chi * (sp.rho * (one - sp.chi) - sp.pi) / (one - sp.pi);
         if (rational(1, 6) < rhs) return fail("rate bound on p, chi, rho, pi exceeds 1/6");
         break;
      }
      case rule::appendix:
         if (!below_appendix_bound(sp.beta, boost_score, slots_per_epoch) || !(sp.beta < third_eps))
            return fail("beta >= min((5 - sqrt(9 + 16 p/E)) / 8, 1/3 - epsilon)");
         break;
   }
   return out;
}

evaluator::evaluator(const view& v, tick_t t, const fork_choice::params& fc, const safety_params& sp)
    : v_(v), store_(v.store()), t_(t), fc_(fc), sp_(sp) {
   const timing& tm = store_.time();
   slot_ = tm.slot_at(t);
   epoch_ = tm.epoch_of(slot_);
   gj_ = fork_choice::gj_view(store_, v.blocks(), slot_);
   gf_ = fork_choice::gf_view(store_, v.blocks(), slot_);
   v.latest_votes(slot_, latest_);
}

std::int64_t evaluator::mask_weight(const std::vector<char>& mask, const balances& w) const {
   std::int64_t s = 0;
   for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) s += w[i];
   return s;
}

bool evaluator::in_snapshot(block_t b) const {
   tick_t r = v_.received_at(b);
   return r >= 0 && r <= store_.time().slot_start(slot_ - 1);
}

std::optional<std::pair<std::int64_t, std::int64_t>> evaluator::q_parts(block_t b, slot_t s,
                                                                         const balances& weights) const {
   const block& blk = store_.get(b);
   slot_t lo = blk.parent == no_block ? 0 : store_.get(blk.parent).slot + 1;
   if (lo > s) return std::nullopt;
   auto mask = v_.schedule().union_mask(lo, s);
   std::int64_t window = mask_weight(mask, weights);
   if (window == 0) return std::nullopt;
   std::int64_t support = 0;
   for (std::size_t x = 0; x < latest_.size(); ++x) {
      if (!mask[x] || latest_[x] == no_block || !v_.has_block(latest_[x])) continue;
      if (store_.is_ancestor(b, latest_[x])) support += weights[x];
   }
   return std::make_pair(support, window);
}

std::optional<rational> evaluator::q_indicator(block_t b, slot_t s, const balances& weights) const {
   auto parts = q_parts(b, s, weights);
   if (!parts) return std::nullopt;
   return rational(parts->first) / rational(parts->second);
}

std::optional<rational> evaluator::p_indicator(block_t b, slot_t s, const balances& weights,
                                               const std::vector<char>& honest) const {
   const block& blk = store_.get(b);
   slot_t lo = blk.parent == no_block ? 0 : store_.get(blk.parent).slot + 1;
   if (lo > s) return std::nullopt;
   auto mask = v_.schedule().union_mask(lo, s);
   std::int64_t window = 0, support = 0;
   for (std::size_t x = 0; x < mask.size(); ++x) {
      if (!mask[x] || !honest[x]) continue;
      window += weights[x];
      if (latest_[x] != no_block && v_.has_block(latest_[x]) && store_.is_ancestor(b, latest_[x])) support += weights[x];
   }
   if (window == 0) return std::nullopt;
   return rational(support) / rational(window);
}

const std::vector<char>& evaluator::pass_vector(block_t tip, const checkpoint& c, bool full) {
   auto key = std::make_tuple(tip, c, full);
   if (auto it = pass_cache_.find(key); it != pass_cache_.end()) return it->second;

   const block& cb = store_.get(c.block);
   const balances& w = *cb.eba;
   const rational boost = fork_choice::boost_weight(fc_.boost_score, store_.time().slots_per_epoch, cb.total);
   const committee_schedule& sched = v_.schedule();
   const std::size_t n = latest_.size();

   std::vector<block_t> chain(static_cast<std::size_t>(store_.get(tip).depth) + 1);
   for (block_t x = tip; x != no_block; x = store_.get(x).parent) chain[static_cast<std::size_t>(store_.get(x).depth)] = x;
   auto on_chain = [&](block_t x) {
      const auto d = static_cast<std::size_t>(store_.get(x).depth);
      return d < chain.size() && chain[d] == x;
   };

   // deepest chain block each latest vote supports
   std::vector<std::int32_t> meet(n, -1);
   for (std::size_t x = 0; x < n; ++x) {
      block_t y = latest_[x];
      if (y == no_block || !v_.has_block(y)) continue;
      if (!on_chain(y)) {
         std::int32_t lo = 0, hi = std::min(store_.get(y).depth, static_cast<std::int32_t>(chain.size()) - 1);
         while (lo < hi) {
            std::int32_t mid = (lo + hi + 1) / 2;
            if (on_chain(store_.ancestor_at_depth(y, mid)))
               lo = mid;
            else
               hi = mid - 1;
         }
         y = chain[static_cast<std::size_t>(lo)];
      }
      meet[x] = store_.get(y).depth;
   }

   std::vector<char> pass(chain.size(), 0);
   std::vector<char> in_window(n, 0);
   std::vector<std::int64_t> bucket(chain.size(), 0);
   std::int64_t window = 0, support = 0;
   const slot_t hi = slot_ - 1;
   slot_t covered_lo = hi + 1;
   for (std::size_t d = chain.size() - 1; d >= 1; --d) {
      const block& b = store_.get(chain[d]);
      slot_t lo = store_.get(b.parent).slot + 1;
      for (slot_t s = std::min(covered_lo - 1, hi); s >= std::max<slot_t>(lo, 0) && s >= 0; --s) {
         for (auto x : sched.committee(s)) {
            const auto xi = static_cast<std::size_t>(x);
            if (in_window[xi]) continue;
            in_window[xi] = 1;
            window += w[xi];
            if (meet[xi] >= static_cast<std::int32_t>(d))
               support += w[xi];
            else if (meet[xi] >= 1)
               bucket[static_cast<std::size_t>(meet[xi])] += w[xi];
         }
      }
      covered_lo = std::min(covered_lo, lo);
      support += bucket[d];
      bucket[d] = 0;
      if (lo <= hi && window > 0) {
         rational need = full ? lmd_support_threshold_full(window, cb.total, boost, sp_)
                              : lmd_support_threshold(window, boost, sp_.beta);
         pass[d] = rational(support) > need;
      }
   }
   return pass_cache_.emplace(key, std::move(pass)).first->second;
}

bool evaluator::is_lmd_ghost_safe(block_t b, const checkpoint& c, bool full) {
   const auto& pass = pass_vector(b, c, full);
   for (std::size_t d = 1; d < pass.size(); ++d)
      if (!pass[d]) return false;
   return true;
}

bool evaluator::will_chkp_be_justified(block_t b, epoch_t e, bool full) {
   const timing& tm = store_.time();
   const block& blk = store_.get(b);
   if (blk.epoch > e) return false;
   const checkpoint src = store_.voting_source(b, e);
   const checkpoint tgt = store_.checkpoint_of(b, e);
   const block& cb = store_.get(tgt.block);
   const balances& w = *cb.eba;
   const committee_schedule& sched = v_.schedule();

   auto received_mask = sched.union_mask(tm.first_slot(e), slot_ - 1);
   std::vector<char> counted(w.size(), 0);
   std::int64_t received = 0;
   for (auto id : v_.ffg_for_target(tgt)) {
      const ffg_vote& fv = store_.ffg(id);
      const auto s = static_cast<std::size_t>(fv.signer);
      if (!(fv.source == src) || !received_mask[s] || counted[s]) continue;
      counted[s] = 1;
      received += w[s];
   }
   auto future_mask = sched.union_mask(std::max(slot_, tm.first_slot(e)), tm.last_slot(e));
   std::int64_t future = mask_weight(future_mask, w);
   rational mass = rational(received) + (rational(1) - sp_.beta) * rational(future);
   rational need = full ? justification_threshold_full(cb.total, sp_) : justification_threshold(cb.total, sp_);
   return mass >= need;
}

bool evaluator::is_confirmed_no_caching(rule r, block_t b) {
   const timing& tm = store_.time();
   const block& blk = store_.get(b);
   if (r == rule::lmd) return is_lmd_ghost_safe(b, gj_, false);
   const bool full = r == rule::churn;

   if (blk.epoch == epoch_) {
      if (!will_chkp_be_justified(b, epoch_, full)) return false;
      const bool gj_ok = blk.gj.epoch == epoch_ - 1 || (epoch_ == 0 && blk.gj.block == store_.genesis());
      return gj_ok && is_lmd_ghost_safe(b, blk.gj, full);
   }
   if (blk.epoch > epoch_) return false;

   if (r == rule::appendix) {
      const checkpoint cb = store_.checkpoint_of(b);
      if (!is_lmd_ghost_safe(b, cb, false)) return false;
      if (!store_.is_ancestor(gf_.block, b)) return false;
      bool found = false;
      for (auto x : v_.blocks()) {
         const block& xb = store_.get(x);
         if (xb.epoch >= epoch_ || !in_snapshot(x) || !store_.is_ancestor(b, x)) continue;
         if (store_.is_justified_in(cb, x)) {
            found = true;
            break;
         }
      }
      if (!found) return false;
      const block& gfb = store_.get(gf_.block);
      const balances& w = *gfb.eba;
      const committee_schedule& sched = v_.schedule();
      for (epoch_t e = cb.epoch + 1; e <= epoch_; ++e) {
         auto received_mask = sched.union_mask(tm.first_slot(e), slot_ - 1);
         std::vector<char> counted(w.size(), 0);
         std::int64_t received = 0;
         for (auto id : v_.ffg_for_target_epoch(e)) {
            const ffg_vote& fv = store_.ffg(id);
            const auto s = static_cast<std::size_t>(fv.signer);
            if (counted[s] || !received_mask[s] || !store_.is_ancestor(b, fv.target.block)) continue;
            counted[s] = 1;
            received += w[s];
         }
         std::int64_t future = 0;
         if (slot_ <= tm.last_slot(e)) future = mask_weight(sched.union_mask(slot_, tm.last_slot(e)), w);
         rational mass = rational(received) + (rational(1) - sp_.beta) * rational(future);
         if (mass < rational(2, 3) * sp_.w_lower * rational(gfb.total)) return false;
      }
      return true;
   }

   if (slot_ != tm.first_slot(epoch_)) return false;
   if (!will_chkp_be_justified(b, epoch_ - 1, full)) return false;
   std::set<checkpoint> tried;
   for (auto x : v_.blocks()) {
      const block& xb = store_.get(x);
      if (xb.epoch >= epoch_ || !in_snapshot(x) || !store_.is_ancestor(b, x)) continue;
      checkpoint vs = store_.voting_source(x, epoch_);
      if (vs.epoch < epoch_ - 2 || !tried.insert(vs).second) continue;
      if (is_lmd_ghost_safe(b, vs, full)) return true;
   }
   return false;
}

block_t evaluator::highest_passing(rule r, block_t head) {
   for (block_t x = head; x != no_block && x != store_.genesis(); x = store_.get(x).parent)
      if (is_confirmed_no_caching(r, x)) return x;
   return no_block;
}

block_t evaluator::highest_raw_safe(block_t head) {
   const auto& pass = pass_vector(head, gj_, false);
   block_t best = no_block;
   for (std::size_t d = 1; d < pass.size(); ++d) {
      if (!pass[d]) break;
      best = store_.ancestor_at_depth(head, static_cast<std::int32_t>(d));
   }
   return best;
}

executor::result executor::on_slot_start(evaluator& ev, block_t head) {
   result out;
   out.best = ev.highest_passing(rule_, head);
   const slot_t s = ev.slot();
   if (out.best != no_block) best_[s] = out.best;
   const timing& tm = ev.store().time();
   const slot_t lo = tm.first_slot(ev.epoch() - 1) + 1;
   best_.erase(best_.begin(), best_.lower_bound(lo));
   block_t top = no_block;
   for (const auto& [slot, b] : best_)
      if (top == no_block || ev.store().block_less(top, b)) top = b;
   if (top != no_block) out.tips.push_back(top);
   if (rule_ == rule::appendix) {
      block_t g = ev.gf().block;
      bool covered = false;
      for (auto x : out.tips)
         if (ev.store().is_ancestor(g, x)) covered = true;
      if (!covered) {
         std::vector<block_t> keep{g};
         for (auto x : out.tips)
            if (!ev.store().is_ancestor(x, g)) keep.push_back(x);
         out.tips = keep;
      }
   }
   return out;
}

}  // namespace gasper::confirm

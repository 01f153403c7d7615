#include "gasper/chain.hpp"

#include <algorithm>
#include <string>

namespace gasper {

block_store::block_store(timing tm, const balance_schedule* schedule, rational sigma,
                         const committee_schedule* committees)
    : tm_(tm), schedule_(schedule), sigma_(sigma), committees_(committees), n_(schedule->initial().size()) {
   block g;
   g.id = 0;
   g.parent = no_block;
   g.slot = 0;
   g.proposer = 0;
   g.root = mix64(0x67656e65736973ULL);
   g.epoch = 0;
   g.depth = 0;
   g.eba = std::make_shared<balances>(schedule_->at(0));
   g.total = total_weight(*g.eba);
   g.slashed = std::make_shared<std::vector<char>>(n_, 0);
   auto st = std::make_shared<ffg_state>();
   st->justified.push_back({0, 0});
   st->finalized.push_back({0, 0});
   g.ffg = st;
   g.gu = g.gj = g.uf = g.gf = {0, 0};
   by_root_[g.root] = 0;
   blocks_.push_back(std::move(g));
}

const block& block_store::get(block_t id) const {
   if (id < 0 || static_cast<std::size_t>(id) >= blocks_.size())
      throw lookup_error("unknown block id " + std::to_string(id));
   return blocks_[static_cast<std::size_t>(id)];
}

std::int32_t block_store::add_ffg_vote(const ffg_vote& v) {
   get(v.source.block);
   get(v.target.block);
   if (v.signer < 0 || static_cast<std::size_t>(v.signer) >= n_) throw std::invalid_argument("ffg vote signer out of range");
   ffg_votes_.push_back(v);
   return static_cast<std::int32_t>(ffg_votes_.size() - 1);
}

std::int32_t block_store::add_ghost_vote(const ghost_vote& v) {
   get(v.block);
   if (v.signer < 0 || static_cast<std::size_t>(v.signer) >= n_) throw std::invalid_argument("ghost vote signer out of range");
   ghost_votes_.push_back(v);
   return static_cast<std::int32_t>(ghost_votes_.size() - 1);
}

bool block_store::is_slashable(const ffg_vote& a, const ffg_vote& b) const {
   if (a.signer != b.signer || a == b) return false;
   if (a.target.epoch == b.target.epoch) return !(a.source == b.source && a.target == b.target);
   auto surrounds = [](const ffg_vote& x, const ffg_vote& y) {
      return x.source.epoch < y.source.epoch && y.target.epoch < x.target.epoch;
   };
   return surrounds(a, b) || surrounds(b, a);
}

block_t block_store::add_block(block_t parent, slot_t slot, validator_t proposer, std::vector<std::int32_t> ffg_votes,
                               std::vector<slashing_evidence> evidence, std::uint64_t nonce) {
   const block& p = get(parent);
   if (slot <= p.slot) throw std::invalid_argument("block slot must exceed parent slot");
   if (proposer < 0 || static_cast<std::size_t>(proposer) >= n_) throw std::invalid_argument("proposer out of range");
   if (committees_ && committees_->proposer(slot) != proposer)
      throw std::invalid_argument("proposer is not scheduled for slot " + std::to_string(slot));
   for (auto id : ffg_votes)
      if (id < 0 || static_cast<std::size_t>(id) >= ffg_votes_.size()) throw std::invalid_argument("unknown ffg vote");
   for (const auto& ev : evidence) {
      if (ev.first < 0 || ev.second < 0 || static_cast<std::size_t>(ev.first) >= ffg_votes_.size() ||
          static_cast<std::size_t>(ev.second) >= ffg_votes_.size() || !is_slashable(ffg(ev.first), ffg(ev.second)))
         throw std::invalid_argument("malformed slashing evidence");
   }
   std::uint64_t h = mix64(p.root, static_cast<std::uint64_t>(slot));
   h = mix64(h, static_cast<std::uint64_t>(proposer));
   h = mix64(h, nonce);
   for (auto id : ffg_votes) h = mix64(h, static_cast<std::uint64_t>(id) + 1);
   for (const auto& ev : evidence) h = mix64(mix64(h, static_cast<std::uint64_t>(ev.first)), static_cast<std::uint64_t>(ev.second));
   if (auto it = by_root_.find(h); it != by_root_.end()) return it->second;

   block b;
   b.id = static_cast<block_t>(blocks_.size());
   b.parent = parent;
   b.slot = slot;
   b.proposer = proposer;
   b.nonce = nonce;
   b.root = h;
   b.ffg_votes = std::move(ffg_votes);
   b.evidence = std::move(evidence);
   derive(b);
   by_root_[b.root] = b.id;
   blocks_.push_back(std::move(b));
   return static_cast<block_t>(blocks_.size() - 1);
}

void block_store::derive(block& b) {
   const block& p = get(b.parent);
   b.epoch = tm_.epoch_of(b.slot);
   b.depth = p.depth + 1;
   b.jumps.push_back(p.id);
   for (std::size_t k = 0;; ++k) {
      block_t mid = b.jumps[k];
      const block& m = get(mid);
      if (m.jumps.size() <= k) break;
      b.jumps.push_back(m.jumps[k]);
   }

   // effective balances: churn at epoch boundaries, then newly included slashings
   b.eba = p.eba;
   b.slashed = p.slashed;
   if (b.epoch > p.epoch && !schedule_->empty()) {
      auto next = std::make_shared<balances>(*p.eba);
      schedule_->apply_range(*next, p.epoch, b.epoch);
      b.eba = next;
   }
   std::shared_ptr<balances> eba_copy;
   std::shared_ptr<std::vector<char>> slashed_copy;
   for (const auto& ev : b.evidence) {
      validator_t v = ffg(ev.first).signer;
      const auto& cur = slashed_copy ? *slashed_copy : *b.slashed;
      if (cur[v]) continue;
      if (!slashed_copy) slashed_copy = std::make_shared<std::vector<char>>(*b.slashed);
      if (!eba_copy) eba_copy = std::make_shared<balances>(*b.eba);
      (*slashed_copy)[v] = 1;
      apply_slash_penalty(*eba_copy, v, sigma_);
   }
   if (slashed_copy) b.slashed = slashed_copy;
   if (eba_copy) b.eba = eba_copy;
   b.total = total_weight(*b.eba);

   b.ffg = ffg::compute_justification(*this, b, p.ffg);
   b.gu = b.ffg->justified.back();
   b.uf = b.ffg->finalized.back();
   if (p.epoch < b.epoch) {
      b.gj = p.gu;
      b.gf = p.uf;
   } else {
      b.gj = p.gj;
      b.gf = p.gf;
   }
}

bool block_store::is_ancestor(block_t a, block_t d) const {
   const block& ba = get(a);
   const block& bd = get(d);
   if (ba.depth > bd.depth) return false;
   return ancestor_at_depth(d, ba.depth) == a;
}

block_t block_store::ancestor_at_depth(block_t b, std::int32_t depth) const {
   const block* cur = &get(b);
   if (depth > cur->depth || depth < 0) throw std::invalid_argument("ancestor depth out of range");
   while (cur->depth > depth) {
      std::int32_t diff = cur->depth - depth;
      std::size_t k = 0;
      while ((std::int32_t{1} << (k + 1)) <= diff && k + 1 < cur->jumps.size()) ++k;
      cur = &get(cur->jumps[k]);
   }
   return cur->id;
}

block_t block_store::ancestor_at_slot(block_t b, slot_t s) const {
   const block* cur = &get(b);
   while (cur->slot > s) {
      // climb as far as possible while staying strictly above s
      std::size_t k = cur->jumps.size();
      bool moved = false;
      while (k-- > 0) {
         const block& j = get(cur->jumps[k]);
         if (j.slot > s) {
            cur = &j;
            moved = true;
            break;
         }
      }
      if (!moved) return cur->jumps.at(0);
   }
   return cur->id;
}

checkpoint block_store::checkpoint_of(block_t b, epoch_t e) const {
   if (e < 0) throw std::invalid_argument("negative epoch");
   return {ancestor_at_slot(b, tm_.first_slot(e)), e};
}

checkpoint block_store::voting_source(block_t b, epoch_t e) const {
   const block& x = get(b);
   if (x.epoch > e) throw std::domain_error("voting source undefined for a block from a later epoch");
   return x.epoch == e ? x.gj : x.gu;
}

checkpoint block_store::finality_source(block_t b, epoch_t e) const {
   const block& x = get(b);
   if (x.epoch > e) throw std::domain_error("finality source undefined for a block from a later epoch");
   return x.epoch == e ? x.gf : x.uf;
}

bool block_store::block_less(block_t a, block_t b) const {
   const block& x = get(a);
   const block& y = get(b);
   if (x.slot != y.slot) return x.slot < y.slot;
   return x.root < y.root;
}

bool block_store::ckpt_less(const checkpoint& a, const checkpoint& b) const {
   if (a.epoch != b.epoch) return a.epoch < b.epoch;
   if (a.block == b.block) return false;
   return block_less(a.block, b.block);
}

bool block_store::is_justified_in(const checkpoint& c, block_t b) const {
   const auto& j = get(b).ffg->justified;
   return std::find(j.begin(), j.end(), c) != j.end();
}

}  // namespace gasper

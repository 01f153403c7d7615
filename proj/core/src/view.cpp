#include "gasper/view.hpp"

#include "gasper/committee.hpp"

#include <algorithm>

namespace gasper {

const std::vector<std::int32_t> view::none_{};

view::view(const block_store& store, const committee_schedule& schedule)
    : store_(&store), sched_(&schedule), signers_(store.num_validators()) {
   block_recv_.assign(1, 0);
   blocks_.push_back(store.genesis());
}

bool view::has_block(block_t b) const {
   return b >= 0 && static_cast<std::size_t>(b) < block_recv_.size() && block_recv_[static_cast<std::size_t>(b)] >= 0;
}

tick_t view::received_at(block_t b) const { return has_block(b) ? block_recv_[static_cast<std::size_t>(b)] : -1; }

std::vector<block_t> view::receive_block(block_t b, tick_t t) {
   std::vector<block_t> out;
   if (has_block(b)) return out;
   const auto idx = static_cast<std::size_t>(b);
   if (waiting_flag_.size() <= idx) waiting_flag_.resize(idx + 1, 0);
   if (waiting_flag_[idx]) return out;
   const block& blk = store_->get(b);
   if (!has_block(blk.parent)) {
      waiting_.emplace(blk.parent, b);
      waiting_flag_[idx] = 1;
      ++version_;
      return out;
   }
   add_block(b, t, out);
   return out;
}

void view::add_block(block_t b, tick_t t, std::vector<block_t>& out) {
   std::vector<block_t> stack{b};
   while (!stack.empty()) {
      block_t x = stack.back();
      stack.pop_back();
      const auto idx = static_cast<std::size_t>(x);
      if (block_recv_.size() <= idx) block_recv_.resize(idx + 1, -1);
      block_recv_[idx] = t;
      blocks_.push_back(x);
      out.push_back(x);
      head_digest_ ^= mix64(0x626c6f636bULL, static_cast<std::uint64_t>(x));
      auto [lo, hi] = waiting_.equal_range(x);
      std::vector<block_t> kids;
      for (auto it = lo; it != hi; ++it) kids.push_back(it->second);
      waiting_.erase(lo, hi);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
   }
   ++version_;
}

bool view::has_ghost(std::int32_t id) const {
   return id >= 0 && static_cast<std::size_t>(id) < ghost_seen_.size() && ghost_seen_[static_cast<std::size_t>(id)];
}

bool view::has_ffg(std::int32_t id) const {
   return id >= 0 && static_cast<std::size_t>(id) < ffg_recv_.size() && ffg_recv_[static_cast<std::size_t>(id)] >= 0;
}

tick_t view::ffg_received_at(std::int32_t id) const { return has_ffg(id) ? ffg_recv_[static_cast<std::size_t>(id)] : -1; }

bool view::receive_ghost(std::int32_t id, tick_t) {
   if (has_ghost(id)) return false;
   const auto idx = static_cast<std::size_t>(id);
   if (ghost_seen_.size() <= idx) ghost_seen_.resize(idx + 1, 0);
   ghost_seen_[idx] = 1;
   ghost_ids_.push_back(id);
   head_digest_ ^= mix64(0x67686f7374ULL, static_cast<std::uint64_t>(id));
   const ghost_vote& v = store_->ghost(id);
   auto& sv = signers_[static_cast<std::size_t>(v.signer)];
   for (const auto& [s, blk] : sv.all)
      if (s == v.slot && blk != v.block) sv.equivocated = true;
   sv.all.emplace_back(v.slot, v.block);
   bool valid = sched_->in_committee(v.signer, v.slot) && store_->get(v.block).slot <= v.slot;
   if (valid) sv.votes.emplace_back(v.slot, v.block);
   ++version_;
   return true;
}

bool view::receive_ffg(std::int32_t id, tick_t t) {
   if (has_ffg(id)) return false;
   const auto idx = static_cast<std::size_t>(id);
   if (ffg_recv_.size() <= idx) ffg_recv_.resize(idx + 1, -1);
   ffg_recv_[idx] = t;
   ffg_ids_.push_back(id);
   const ffg_vote& v = store_->ffg(id);
   ffg_by_target_[v.target].push_back(id);
   ffg_by_epoch_[v.target.epoch].push_back(id);
   ++version_;
   return true;
}

const std::vector<std::int32_t>& view::ffg_for_target(const checkpoint& c) const {
   auto it = ffg_by_target_.find(c);
   return it == ffg_by_target_.end() ? none_ : it->second;
}

const std::vector<std::int32_t>& view::ffg_for_target_epoch(epoch_t e) const {
   auto it = ffg_by_epoch_.find(e);
   return it == ffg_by_epoch_.end() ? none_ : it->second;
}

void view::latest_votes(slot_t current, std::vector<block_t>& out) const {
   out.assign(signers_.size(), no_block);
   for (std::size_t v = 0; v < signers_.size(); ++v) {
      const auto& sv = signers_[v];
      if (sv.equivocated) continue;
      slot_t best = -1;
      for (const auto& [s, b] : sv.votes) {
         if (s < current && s > best) {
            best = s;
            out[v] = b;
         }
      }
   }
}

}  // namespace gasper

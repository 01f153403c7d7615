#pragma once

#include "gasper/chain.hpp"
#include "gasper/committee.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace gasper {

/// A validator's received-message set. Monotone: nothing is ever removed.
/// Blocks enter only once their parent is present; earlier arrivals wait.
class view {
 public:
   view(const block_store& store, const committee_schedule& schedule);

   const block_store& store() const { return *store_; }
   const committee_schedule& schedule() const { return *sched_; }

   bool has_block(block_t b) const;
   /// Tick at which b entered the view, or -1.
   tick_t received_at(block_t b) const;
   /// Adds b (and any waiting descendants); returns the blocks that entered the view.
   std::vector<block_t> receive_block(block_t b, tick_t t);
   bool receive_ghost(std::int32_t id, tick_t t);
   bool receive_ffg(std::int32_t id, tick_t t);
   bool has_ghost(std::int32_t id) const;
   bool has_ffg(std::int32_t id) const;

   /// Blocks in the view, parents before children.
   const std::vector<block_t>& blocks() const { return blocks_; }
   const std::vector<std::int32_t>& ghost_ids() const { return ghost_ids_; }
   const std::vector<std::int32_t>& ffg_ids() const { return ffg_ids_; }
   /// FFG vote ids in the view with the given target.
   const std::vector<std::int32_t>& ffg_for_target(const checkpoint& c) const;
   /// FFG vote ids in the view whose target has the given epoch.
   const std::vector<std::int32_t>& ffg_for_target_epoch(epoch_t e) const;
   tick_t ffg_received_at(std::int32_t id) const;

   /// Changes whenever the view grows.
   std::uint64_t version() const { return version_; }
   /// Order-independent digest of the blocks and GHOST votes in the view
   /// (everything the head computation reads).
   std::uint64_t head_digest() const { return head_digest_; }

   /// Survivors of the vote filters at the given current slot: out[v] is the
   /// block of v's latest valid non-equivocating vote with slot < current, or no_block.
   void latest_votes(slot_t current, std::vector<block_t>& out) const;
   bool is_equivocator(validator_t v) const { return signers_[static_cast<std::size_t>(v)].equivocated; }

 private:
   struct signer_votes {
      std::vector<std::pair<slot_t, block_t>> votes;  ///< valid votes only
      std::vector<std::pair<slot_t, block_t>> all;
      bool equivocated = false;
   };
   void add_block(block_t b, tick_t t, std::vector<block_t>& out);

   const block_store* store_;
   const committee_schedule* sched_;
   std::vector<tick_t> block_recv_;
   std::vector<block_t> blocks_;
   std::multimap<block_t, block_t> waiting_;  ///< parent -> child
   std::vector<char> waiting_flag_;
   std::vector<char> ghost_seen_;
   std::vector<tick_t> ffg_recv_;
   std::vector<std::int32_t> ghost_ids_;
   std::vector<std::int32_t> ffg_ids_;
   std::map<checkpoint, std::vector<std::int32_t>> ffg_by_target_;
   std::map<epoch_t, std::vector<std::int32_t>> ffg_by_epoch_;
   std::vector<signer_votes> signers_;
   std::uint64_t version_ = 0;
   std::uint64_t head_digest_ = 0;
   static const std::vector<std::int32_t> none_;
};

}  // namespace gasper

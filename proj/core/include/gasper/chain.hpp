#pragma once

#include "gasper/balances.hpp"
#include "gasper/committee.hpp"
#include "gasper/time.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gasper {

struct lookup_error : std::out_of_range {
   using std::out_of_range::out_of_range;
};

struct checkpoint {
   block_t block = 0;
   epoch_t epoch = 0;

   friend bool operator==(const checkpoint&, const checkpoint&) = default;
   /// Structural order used for containers only; protocol order is by epoch.
   friend bool operator<(const checkpoint& a, const checkpoint& b) {
      return a.epoch != b.epoch ? a.epoch < b.epoch : a.block < b.block;
   }
};

struct ghost_vote {
   validator_t signer = 0;
   slot_t slot = 0;
   block_t block = 0;
   friend bool operator==(const ghost_vote&, const ghost_vote&) = default;
};

struct ffg_vote {
   validator_t signer = 0;
   checkpoint source;
   checkpoint target;
   slot_t slot = 0;
   friend bool operator==(const ffg_vote&, const ffg_vote&) = default;
};

/// Two FFG vote ids from the same signer forming a double or surround vote.
struct slashing_evidence {
   std::int32_t first = 0;
   std::int32_t second = 0;
};

/// Per-block FFG bookkeeping: link tallies and justified / finalized sets.
struct ffg_state {
   std::map<std::pair<checkpoint, checkpoint>, std::vector<std::uint64_t>> links;  ///< signer bitsets
   std::vector<checkpoint> justified;  ///< ascending by epoch
   std::vector<checkpoint> finalized;  ///< ascending by epoch
};

struct block {
   block_t id = 0;
   block_t parent = no_block;
   slot_t slot = 0;
   validator_t proposer = 0;
   std::uint64_t nonce = 0;
   std::uint64_t root = 0;
   std::vector<std::int32_t> ffg_votes;
   std::vector<slashing_evidence> evidence;

   epoch_t epoch = 0;
   std::int32_t depth = 0;
   std::vector<block_t> jumps;  ///< jumps[k] = 2^k-th ancestor
   std::shared_ptr<const balances> eba;
   std::int64_t total = 0;
   std::shared_ptr<const std::vector<char>> slashed;
   std::shared_ptr<const ffg_state> ffg;
   checkpoint gu, gj, uf, gf;
};

/// Content-addressed block DAG plus the universe of signed votes. Derived
/// justification state is computed once per block on insertion.
class block_store {
 public:
   block_store(timing tm, const balance_schedule* schedule, rational sigma,
               const committee_schedule* committees = nullptr);

   const timing& time() const { return tm_; }
   const balance_schedule& schedule() const { return *schedule_; }
   std::size_t num_validators() const { return n_; }
   std::size_t size() const { return blocks_.size(); }
   block_t genesis() const { return 0; }

   /// Inserts a block or returns the id of an identical existing one.
   /// Throws std::invalid_argument on invalid content.
   block_t add_block(block_t parent, slot_t slot, validator_t proposer, std::vector<std::int32_t> ffg_votes = {},
                     std::vector<slashing_evidence> evidence = {}, std::uint64_t nonce = 0);
   std::int32_t add_ffg_vote(const ffg_vote& v);
   std::int32_t add_ghost_vote(const ghost_vote& v);

   const block& get(block_t id) const;
   const ffg_vote& ffg(std::int32_t id) const { return ffg_votes_.at(static_cast<std::size_t>(id)); }
   const ghost_vote& ghost(std::int32_t id) const { return ghost_votes_.at(static_cast<std::size_t>(id)); }
   std::size_t ffg_count() const { return ffg_votes_.size(); }
   std::size_t ghost_count() const { return ghost_votes_.size(); }

   /// a is an ancestor of (or equal to) d.
   bool is_ancestor(block_t a, block_t d) const;
   bool conflicts(block_t x, block_t y) const { return !is_ancestor(x, y) && !is_ancestor(y, x); }
   block_t ancestor_at_depth(block_t b, std::int32_t depth) const;
   /// Highest ancestor of b (inclusive) with slot <= s.
   block_t ancestor_at_slot(block_t b, slot_t s) const;

   /// Epoch-boundary checkpoint of b for epoch e.
   checkpoint checkpoint_of(block_t b, epoch_t e) const;
   checkpoint checkpoint_of(block_t b) const { return checkpoint_of(b, get(b).epoch); }
   /// GJ(b) if epoch(b) == e, GU(b) if epoch(b) < e; throws std::domain_error otherwise.
   checkpoint voting_source(block_t b, epoch_t e) const;
   /// Finalized counterpart of voting_source: GF(b) if epoch(b) == e, max F(b) otherwise.
   checkpoint finality_source(block_t b, epoch_t e) const;

   /// Protocol order on checkpoints: by epoch, then by the global block order.
   bool ckpt_less(const checkpoint& a, const checkpoint& b) const;
   /// Global block order (slot, root).
   bool block_less(block_t a, block_t b) const;

   const balances& eba_of(const checkpoint& c) const { return *get(c.block).eba; }
   std::int64_t total_of(const checkpoint& c) const { return get(c.block).total; }

   bool is_slashable(const ffg_vote& a, const ffg_vote& b) const;
   bool is_justified_in(const checkpoint& c, block_t b) const;

 private:
   void derive(block& b);

   timing tm_;
   const balance_schedule* schedule_;
   rational sigma_;
   const committee_schedule* committees_;
   std::size_t n_;
   std::vector<block> blocks_;
   std::unordered_map<std::uint64_t, block_t> by_root_;
   std::vector<ffg_vote> ffg_votes_;
   std::vector<ghost_vote> ghost_votes_;
};

namespace ffg {

/// Justification fixpoint over the votes included in b, on top of the parent's state.
std::shared_ptr<const ffg_state> compute_justification(const block_store& store, const block& b,
                                                       const std::shared_ptr<const ffg_state>& parent);

std::int64_t bitset_weight(const std::vector<std::uint64_t>& bits, const balances& eba);

}  // namespace ffg

}  // namespace gasper

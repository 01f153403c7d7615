#pragma once

#include "gasper/chain.hpp"
#include "gasper/committee.hpp"
#include "gasper/rational.hpp"
#include "gasper/view.hpp"

#include <vector>

namespace gasper::fork_choice {

struct params {
   rational boost_score{2, 5};  ///< p; the boost is (p/E) of the total weight
   bool subtree_boost = false;
};

struct boost_state {
   block_t block = no_block;
   rational weight{0};
};

/// (p/E) * total.
rational boost_weight(const rational& p, std::int64_t slots_per_epoch, std::int64_t total);

// Vote filters, applied as fil_lmd(fil_inv(fil_cur(fil_eq(V)))).
std::vector<ghost_vote> fil_eq(const std::vector<ghost_vote>& votes);
std::vector<ghost_vote> fil_cur(const std::vector<ghost_vote>& votes, slot_t current);
std::vector<ghost_vote> fil_inv(const std::vector<ghost_vote>& votes, const block_store& store,
                                const committee_schedule& schedule);
std::vector<ghost_vote> fil_lmd(const std::vector<ghost_vote>& votes);
std::vector<ghost_vote> filter_chain(const std::vector<ghost_vote>& votes, const block_store& store,
                                     const committee_schedule& schedule, slot_t current);

/// Signers with a vote for a descendant-or-self of b (sorted, unique).
std::vector<validator_t> ghost_voters(const block_store& store, const std::vector<ghost_vote>& votes, block_t b);

/// GHOST walk from genesis over `blocks` (must contain genesis and be
/// ancestor-closed). Children with slot > current are ineligible; when
/// `allowed` is given, only blocks in it are eligible. Ties go to the
/// greater block in the global order.
block_t ghost(const block_store& store, const std::vector<block_t>& blocks, const std::vector<ghost_vote>& votes,
              const balances& weights, slot_t current, const boost_state& boost = {}, bool subtree_boost = false,
              const std::vector<block_t>* allowed = nullptr);

/// Greatest voting source / finality source among blocks with slot <= current.
checkpoint gj_view(const block_store& store, const std::vector<block_t>& blocks, slot_t current);
checkpoint gf_view(const block_store& store, const std::vector<block_t>& blocks, slot_t current);

/// Blocks kept by the justification filter.
std::vector<block_t> fil_hfc(const block_store& store, const std::vector<block_t>& blocks, slot_t current,
                             const checkpoint& gj, const checkpoint& gf);

struct head_info {
   block_t head = 0;      ///< LMD-GHOST-HFC head
   block_t lmd_head = 0;  ///< plain LMD-GHOST head (no justification filter)
   checkpoint gj;
   checkpoint gf;
};

/// Head computation over a validator's view at the start of slot `current`
/// (or later in that slot). Balances are those of block(gj). `boosted` is the
/// view's timely proposal for the current slot, or no_block.
head_info compute_heads(const view& v, slot_t current, const params& p, block_t boosted, bool want_lmd = true);

}  // namespace gasper::fork_choice

#pragma once
// Independent reference implementations used by the unit and acceptance tests.

#include "gasper/chain.hpp"
#include "gasper/committee.hpp"
#include "gasper/fork_choice.hpp"

#include <random>
#include <set>
#include <vector>

namespace oracle {

using namespace gasper;

// Plain parent-pointer ancestry, no jump tables.
inline bool descends(const std::vector<block_t>& parent, block_t a, block_t d) {
   for (block_t x = d; x != no_block; x = parent[static_cast<std::size_t>(x)])
      if (x == a) return true;
   return false;
}

struct random_view {
   std::vector<block_t> blocks;    // store ids, genesis first
   std::vector<block_t> parent;    // indexed by store id
   std::vector<ghost_vote> votes;
   balances weights;
   slot_t current = 0;
   fork_choice::boost_state boost;
};

// Tree of up to 20 blocks over 12 validators with up to 40 votes.
inline random_view make_random_view(block_store& store, std::mt19937_64& rng) {
   random_view rv;
   const std::size_t n = store.num_validators();
   rv.blocks.push_back(store.genesis());
   rv.parent.push_back(no_block);
   const auto nblocks = 1 + uniform_below(rng, 19);
   for (std::uint64_t i = 0; i < nblocks; ++i) {
      block_t p = rv.blocks[uniform_below(rng, rv.blocks.size())];
      slot_t s = store.get(p).slot + 1 + static_cast<slot_t>(uniform_below(rng, 3));
      block_t b = store.add_block(p, s, static_cast<validator_t>(uniform_below(rng, n)), {}, {}, rng());
      if (std::find(rv.blocks.begin(), rv.blocks.end(), b) != rv.blocks.end()) continue;
      rv.blocks.push_back(b);
      if (rv.parent.size() <= static_cast<std::size_t>(b)) rv.parent.resize(static_cast<std::size_t>(b) + 1, no_block);
      rv.parent[static_cast<std::size_t>(b)] = p;
   }
   const auto nvotes = uniform_below(rng, 41);
   for (std::uint64_t i = 0; i < nvotes; ++i) {
      block_t b = rv.blocks[uniform_below(rng, rv.blocks.size())];
      rv.votes.push_back({static_cast<validator_t>(uniform_below(rng, n)), store.get(b).slot + 1, b});
   }
   rv.weights.resize(n);
   for (auto& w : rv.weights) w = 1 + static_cast<std::int64_t>(uniform_below(rng, 5));
   slot_t max_slot = 0;
   for (auto b : rv.blocks) max_slot = std::max(max_slot, store.get(b).slot);
   rv.current = static_cast<slot_t>(uniform_below(rng, static_cast<std::uint64_t>(max_slot) + 2));
   if (uniform_below(rng, 2)) {
      rv.boost.block = rv.blocks[uniform_below(rng, rv.blocks.size())];
      rv.boost.weight = rational(static_cast<std::int64_t>(uniform_below(rng, 7)), 2);
   }
   return rv;
}

// Heaviest-subtree walk computing every block's support from scratch.
inline block_t brute_ghost(const block_store& store, const random_view& rv) {
   auto support = [&](block_t b) {
      std::set<validator_t> signers;
      for (const auto& v : rv.votes)
         if (descends(rv.parent, b, v.block)) signers.insert(v.signer);
      rational w(0);
      for (auto s : signers) w += rational(rv.weights[static_cast<std::size_t>(s)]);
      if (b == rv.boost.block) w += rv.boost.weight;
      return w;
   };
   block_t at = store.genesis();
   for (;;) {
      block_t best = no_block;
      rational best_w(0);
      for (auto c : rv.blocks) {
         if (rv.parent[static_cast<std::size_t>(c)] != at || store.get(c).slot > rv.current) continue;
         rational w = support(c);
         auto key = [&](block_t x) { return std::make_pair(store.get(x).slot, store.get(x).root); };
         if (best == no_block || w > best_w || (w == best_w && key(c) > key(best))) {
            best = c;
            best_w = w;
         }
      }
      if (best == no_block) return at;
      at = best;
   }
}

}  // namespace oracle

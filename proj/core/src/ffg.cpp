#include "gasper/chain.hpp"

#include <algorithm>
#include <bit>

namespace gasper::ffg {

std::int64_t bitset_weight(const std::vector<std::uint64_t>& bits, const balances& eba) {
   std::int64_t w = 0;
   for (std::size_t i = 0; i < bits.size(); ++i) {
      std::uint64_t word = bits[i];
      while (word) {
         int bit = std::countr_zero(word);
         word &= word - 1;
         std::size_t v = i * 64 + static_cast<std::size_t>(bit);
         if (v < eba.size()) w += eba[v];
      }
   }
   return w;
}

namespace {

bool supermajority(const block_store& store, const std::vector<std::uint64_t>& bits, const checkpoint& target) {
   const auto& tb = store.get(target.block);
   return 3 * bitset_weight(bits, *tb.eba) >= 2 * tb.total;
}

bool contains(const std::vector<checkpoint>& v, const checkpoint& c) {
   return std::find(v.begin(), v.end(), c) != v.end();
}

}  // namespace

std::shared_ptr<const ffg_state> compute_justification(const block_store& store, const block& b,
                                                       const std::shared_ptr<const ffg_state>& parent) {
   std::vector<std::int32_t> counted;
   for (auto id : b.ffg_votes) {
      const ffg_vote& v = store.ffg(id);
      if (v.target.epoch > b.epoch || v.source.epoch >= v.target.epoch) continue;
      // target must be the checkpoint of this chain for its epoch
      bool on_chain;
      if (b.slot <= store.time().first_slot(v.target.epoch))
         on_chain = v.target.block == b.id;
      else
         on_chain = store.checkpoint_of(b.parent, v.target.epoch) == v.target;
      if (!on_chain) continue;
      counted.push_back(id);
   }
   if (counted.empty()) return parent;

   auto st = std::make_shared<ffg_state>(*parent);
   const std::size_t words = (store.num_validators() + 63) / 64;
   for (auto id : counted) {
      const ffg_vote& v = store.ffg(id);
      auto& bits = st->links[{v.source, v.target}];
      if (bits.empty()) bits.assign(words, 0);
      bits[static_cast<std::size_t>(v.signer) / 64] |= std::uint64_t{1} << (static_cast<std::size_t>(v.signer) % 64);
   }

   // justification fixpoint in ascending target epoch
   std::vector<const std::pair<const std::pair<checkpoint, checkpoint>, std::vector<std::uint64_t>>*> order;
   for (const auto& kv : st->links) order.push_back(&kv);
   std::stable_sort(order.begin(), order.end(),
                    [](auto* a, auto* c) { return a->first.second.epoch < c->first.second.epoch; });
   bool changed = true;
   while (changed) {
      changed = false;
      for (auto* kv : order) {
         const auto& [src, tgt] = kv->first;
         if (contains(st->justified, tgt) || !contains(st->justified, src)) continue;
         if (!supermajority(store, kv->second, tgt)) continue;
         st->justified.push_back(tgt);
         changed = true;
      }
   }
   std::stable_sort(st->justified.begin(), st->justified.end(),
                    [&](const checkpoint& a, const checkpoint& c) { return store.ckpt_less(a, c); });

   // one-step finality
   for (const auto& c : st->justified) {
      if (contains(st->finalized, c)) continue;
      for (const auto& kv : st->links) {
         const auto& [src, tgt] = kv.first;
         if (!(src == c) || tgt.epoch != c.epoch + 1 || !contains(st->justified, tgt)) continue;
         if (supermajority(store, kv.second, tgt)) {
            st->finalized.push_back(c);
            break;
         }
      }
   }
   std::stable_sort(st->finalized.begin(), st->finalized.end(),
                    [&](const checkpoint& a, const checkpoint& c) { return store.ckpt_less(a, c); });
   return st;
}

}  // namespace gasper::ffg

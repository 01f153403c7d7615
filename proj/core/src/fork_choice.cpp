#include "gasper/fork_choice.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gasper::fork_choice {

namespace {

using wide = __int128;

/// Compact tree over a block list, parents before children.
struct tree {
   std::vector<block_t> ids;
   std::vector<int> parent;
   std::vector<int> first_child, next_sibling;
   std::vector<int> local;  // global -> local, -1 if absent

   void build(const block_store& store, const std::vector<block_t>& blocks) {
      ids = blocks;
      const std::size_t n = ids.size();
      local.assign(store.size(), -1);
      for (std::size_t i = 0; i < n; ++i) local[static_cast<std::size_t>(ids[i])] = static_cast<int>(i);
      parent.assign(n, -1);
      first_child.assign(n, -1);
      next_sibling.assign(n, -1);
      for (std::size_t i = n; i-- > 0;) {
         block_t p = store.get(ids[i]).parent;
         int pl = p == no_block ? -1 : local[static_cast<std::size_t>(p)];
         parent[i] = pl;
         if (pl >= 0) {
            next_sibling[i] = first_child[static_cast<std::size_t>(pl)];
            first_child[static_cast<std::size_t>(pl)] = static_cast<int>(i);
         }
      }
   }
   int find(block_t b) const {
      return b >= 0 && static_cast<std::size_t>(b) < local.size() ? local[static_cast<std::size_t>(b)] : -1;
   }
};

std::vector<block_t> parents_first(const block_store& store, const std::vector<block_t>& blocks) {
   std::vector<block_t> out = blocks;
   std::stable_sort(out.begin(), out.end(),
                    [&](block_t a, block_t b) { return store.get(a).depth < store.get(b).depth; });
   out.erase(std::unique(out.begin(), out.end()), out.end());
   std::vector<block_t> dedup;
   std::set<block_t> seen;
   for (auto b : out)
      if (seen.insert(b).second) dedup.push_back(b);
   return dedup;
}

/// Greedy walk given per-node scaled weights.
block_t walk(const block_store& store, const tree& tr, const std::vector<wide>& weight, slot_t current,
             int boosted_local, wide boost_scaled, const std::vector<char>* allowed) {
   int cur = tr.find(store.genesis());
   if (cur < 0) return store.genesis();
   while (true) {
      int best = -1;
      wide best_w = 0;
      for (int c = tr.first_child[static_cast<std::size_t>(cur)]; c >= 0; c = tr.next_sibling[static_cast<std::size_t>(c)]) {
         const block& cb = store.get(tr.ids[static_cast<std::size_t>(c)]);
         if (cb.slot > current) continue;
         if (allowed && !(*allowed)[static_cast<std::size_t>(c)]) continue;
         wide w = weight[static_cast<std::size_t>(c)] + (c == boosted_local ? boost_scaled : 0);
         if (best < 0 || w > best_w ||
             (w == best_w && store.block_less(tr.ids[static_cast<std::size_t>(best)], tr.ids[static_cast<std::size_t>(c)]))) {
            best = c;
            best_w = w;
         }
      }
      if (best < 0) return tr.ids[static_cast<std::size_t>(cur)];
      cur = best;
   }
}

void accumulate(const tree& tr, std::vector<wide>& w) {
   for (std::size_t i = tr.ids.size(); i-- > 0;)
      if (tr.parent[i] >= 0) w[static_cast<std::size_t>(tr.parent[i])] += w[i];
}

/// Kept mask for the justification filter over a tree.
std::vector<char> hfc_mask(const block_store& store, const tree& tr, slot_t current, const checkpoint& gj,
                           const checkpoint& gf) {
   const std::size_t n = tr.ids.size();
   const epoch_t e = store.time().epoch_of(current);
   std::vector<char> desc_gj(n, 0), desc_gf(n, 0), anc_gj(n, 0), has_leaf(n, 0), in_time(n, 0), has_kid(n, 0);
   for (std::size_t i = 0; i < n; ++i) {
      const block& b = store.get(tr.ids[i]);
      in_time[i] = b.slot <= current;
      int p = tr.parent[i];
      desc_gj[i] = tr.ids[i] == gj.block || (p >= 0 && desc_gj[static_cast<std::size_t>(p)]);
      desc_gf[i] = tr.ids[i] == gf.block || (p >= 0 && desc_gf[static_cast<std::size_t>(p)]);
      if (in_time[i] && p >= 0) has_kid[static_cast<std::size_t>(p)] = 1;
   }
   for (int x = tr.find(gj.block); x >= 0; x = tr.parent[static_cast<std::size_t>(x)]) anc_gj[static_cast<std::size_t>(x)] = 1;
   for (std::size_t i = n; i-- > 0;) {
      if (in_time[i] && !has_kid[i] && desc_gf[i]) {
         const block& b = store.get(tr.ids[i]);
         if (b.epoch <= e) {
            checkpoint vs = store.voting_source(b.id, e);
            if (vs == gj || vs.epoch + 2 >= e) has_leaf[i] = 1;
         }
      }
      if (has_leaf[i] && tr.parent[i] >= 0) has_leaf[static_cast<std::size_t>(tr.parent[i])] = 1;
   }
   std::vector<char> keep(n, 0);
   for (std::size_t i = 0; i < n; ++i) keep[i] = in_time[i] && (anc_gj[i] || (desc_gj[i] && has_leaf[i]));
   return keep;
}

thread_local tree scratch_tree;

}  // namespace

rational boost_weight(const rational& p, std::int64_t slots_per_epoch, std::int64_t total) {
   return p / rational(slots_per_epoch) * rational(total);
}

std::vector<ghost_vote> fil_eq(const std::vector<ghost_vote>& votes) {
   std::set<validator_t> bad;
   std::map<std::pair<validator_t, slot_t>, block_t> seen;
   for (const auto& v : votes) {
      auto [it, fresh] = seen.emplace(std::make_pair(v.signer, v.slot), v.block);
      if (!fresh && it->second != v.block) bad.insert(v.signer);
   }
   std::vector<ghost_vote> out;
   for (const auto& v : votes)
      if (!bad.count(v.signer)) out.push_back(v);
   return out;
}

std::vector<ghost_vote> fil_cur(const std::vector<ghost_vote>& votes, slot_t current) {
   std::vector<ghost_vote> out;
   for (const auto& v : votes)
      if (v.slot < current) out.push_back(v);
   return out;
}

std::vector<ghost_vote> fil_inv(const std::vector<ghost_vote>& votes, const block_store& store,
                                const committee_schedule& schedule) {
   std::vector<ghost_vote> out;
   for (const auto& v : votes)
      if (schedule.in_committee(v.signer, v.slot) && store.get(v.block).slot <= v.slot) out.push_back(v);
   return out;
}

std::vector<ghost_vote> fil_lmd(const std::vector<ghost_vote>& votes) {
   std::map<validator_t, slot_t> latest;
   for (const auto& v : votes) {
      auto [it, fresh] = latest.emplace(v.signer, v.slot);
      if (!fresh) it->second = std::max(it->second, v.slot);
   }
   // repeated copies of the latest vote collapse to one
   std::vector<ghost_vote> out;
   for (const auto& v : votes) {
      auto it = latest.find(v.signer);
      if (it != latest.end() && it->second == v.slot) {
         out.push_back(v);
         latest.erase(it);
      }
   }
   return out;
}

std::vector<ghost_vote> filter_chain(const std::vector<ghost_vote>& votes, const block_store& store,
                                     const committee_schedule& schedule, slot_t current) {
   return fil_lmd(fil_inv(fil_cur(fil_eq(votes), current), store, schedule));
}

std::vector<validator_t> ghost_voters(const block_store& store, const std::vector<ghost_vote>& votes, block_t b) {
   store.get(b);
   std::set<validator_t> out;
   for (const auto& v : votes)
      if (store.is_ancestor(b, v.block)) out.insert(v.signer);
   return {out.begin(), out.end()};
}

block_t ghost(const block_store& store, const std::vector<block_t>& blocks, const std::vector<ghost_vote>& votes,
              const balances& weights, slot_t current, const boost_state& boost, bool subtree_boost,
              const std::vector<block_t>* allowed) {
   tree tr;
   tr.build(store, parents_first(store, blocks));
   const std::size_t n = tr.ids.size();
   const wide scale = boost.weight.den();
   std::vector<wide> acc(n, 0), direct(n, 0);

   std::map<validator_t, std::vector<int>> by_signer;
   for (const auto& v : votes) {
      int li = tr.find(v.block);
      if (li >= 0) by_signer[v.signer].push_back(li);
   }
   std::vector<int> stamp(n, -1);
   for (auto& [signer, nodes] : by_signer) {
      const wide w = static_cast<wide>(weights[static_cast<std::size_t>(signer)]) * scale;
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
      if (nodes.size() == 1) {
         acc[static_cast<std::size_t>(nodes[0])] += w;
         continue;
      }
      for (int x : nodes)
         for (int y = x; y >= 0 && stamp[static_cast<std::size_t>(y)] != signer; y = tr.parent[static_cast<std::size_t>(y)]) {
            stamp[static_cast<std::size_t>(y)] = signer;
            direct[static_cast<std::size_t>(y)] += w;
         }
   }
   int boosted = tr.find(boost.block);
   const wide boost_scaled = boost.weight.num();
   if (subtree_boost && boosted >= 0) acc[static_cast<std::size_t>(boosted)] += boost_scaled;
   accumulate(tr, acc);
   for (std::size_t i = 0; i < n; ++i) acc[i] += direct[i];

   std::vector<char> mask;
   if (allowed) {
      mask.assign(n, 0);
      for (auto b : *allowed) {
         int li = tr.find(b);
         if (li >= 0) mask[static_cast<std::size_t>(li)] = 1;
      }
   }
   return walk(store, tr, acc, current, subtree_boost ? -1 : boosted, boost_scaled, allowed ? &mask : nullptr);
}

checkpoint gj_view(const block_store& store, const std::vector<block_t>& blocks, slot_t current) {
   const epoch_t e = store.time().epoch_of(current);
   checkpoint best{store.genesis(), 0};
   for (auto b : blocks) {
      if (store.get(b).slot > current) continue;
      checkpoint c = store.voting_source(b, e);
      if (store.ckpt_less(best, c)) best = c;
   }
   return best;
}

checkpoint gf_view(const block_store& store, const std::vector<block_t>& blocks, slot_t current) {
   const epoch_t e = store.time().epoch_of(current);
   checkpoint best{store.genesis(), 0};
   for (auto b : blocks) {
      if (store.get(b).slot > current) continue;
      checkpoint c = store.finality_source(b, e);
      if (store.ckpt_less(best, c)) best = c;
   }
   return best;
}

std::vector<block_t> fil_hfc(const block_store& store, const std::vector<block_t>& blocks, slot_t current,
                             const checkpoint& gj, const checkpoint& gf) {
   tree tr;
   tr.build(store, parents_first(store, blocks));
   auto keep = hfc_mask(store, tr, current, gj, gf);
   std::vector<block_t> out;
   for (std::size_t i = 0; i < tr.ids.size(); ++i)
      if (keep[i]) out.push_back(tr.ids[i]);
   return out;
}

head_info compute_heads(const view& v, slot_t current, const params& p, block_t boosted, bool want_lmd) {
   const block_store& store = v.store();
   head_info out;
   out.gj = gj_view(store, v.blocks(), current);
   out.gf = gf_view(store, v.blocks(), current);
   const block& gjb = store.get(out.gj.block);
   const balances& weights = *gjb.eba;
   rational bw = boost_weight(p.boost_score, store.time().slots_per_epoch, gjb.total);
   const wide scale = bw.den();

   tree& tr = scratch_tree;
   tr.build(store, v.blocks());
   const std::size_t n = tr.ids.size();
   std::vector<wide> acc(n, 0);
   thread_local std::vector<block_t> latest;
   v.latest_votes(current, latest);
   for (std::size_t s = 0; s < latest.size(); ++s) {
      if (latest[s] == no_block) continue;
      int li = tr.find(latest[s]);
      if (li >= 0) acc[static_cast<std::size_t>(li)] += static_cast<wide>(weights[s]) * scale;
   }
   int bl = tr.find(boosted);
   if (bl >= 0 && store.get(boosted).slot != current) bl = -1;
   if (p.subtree_boost && bl >= 0) acc[static_cast<std::size_t>(bl)] += bw.num();
   accumulate(tr, acc);
   auto keep = hfc_mask(store, tr, current, out.gj, out.gf);
   const int walk_boost = p.subtree_boost ? -1 : bl;
   out.head = walk(store, tr, acc, current, walk_boost, bw.num(), &keep);
   out.lmd_head = want_lmd ? walk(store, tr, acc, current, walk_boost, bw.num(), nullptr) : out.head;
   return out;
}

}  // namespace gasper::fork_choice

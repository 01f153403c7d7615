#include "gasper/committee.hpp"

#include <algorithm>
#include <string>

namespace gasper {

const std::vector<validator_t> committee_schedule::empty_{};

std::uint64_t mix64(std::uint64_t x) {
   x += 0x9e3779b97f4a7c15ULL;
   x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
   x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
   return x ^ (x >> 31);
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL)); }

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
   if (n <= 1) return 0;
   const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
   std::uint64_t x;
   do {
      x = rng();
   } while (x >= limit);
   return x % n;
}

committee_schedule::committee_schedule(timing tm, std::uint64_t seed, const balance_schedule* schedule,
                                       std::vector<validator_t> adversaries, bool balanced)
    : tm_(tm), seed_(seed), schedule_(schedule), n_(schedule->initial().size()), adversarial_(n_, 0),
      balanced_(balanced) {
   for (auto a : adversaries) {
      if (a < 0 || static_cast<std::size_t>(a) >= n_) throw config_error("adversary id out of range");
      adversarial_[a] = 1;
   }
}

void committee_schedule::set_override(epoch_t e, epoch_committees c) {
   if (static_cast<std::int64_t>(c.by_slot.size()) != tm_.slots_per_epoch ||
       static_cast<std::int64_t>(c.proposers.size()) != tm_.slots_per_epoch)
      throw config_error("schedule override for epoch " + std::to_string(e) + " must list one committee and proposer per slot");
   std::vector<char> seen(n_, 0);
   for (const auto& com : c.by_slot)
      for (auto v : com) {
         if (v < 0 || static_cast<std::size_t>(v) >= n_ || seen[v])
            throw config_error("schedule override for epoch " + std::to_string(e) + " is not a partition");
         seen[v] = 1;
      }
   overrides_[e] = std::move(c);
   cache_.erase(e);
}

committee_schedule::entry committee_schedule::build(epoch_t e) const {
   entry out;
   out.slot_of.assign(n_, -1);
   const auto E = static_cast<std::size_t>(tm_.slots_per_epoch);
   if (auto it = overrides_.find(e); it != overrides_.end()) {
      out.committees = it->second;
   } else {
      const balances& bal = schedule_->at(e);
      std::vector<validator_t> honest, adv;
      for (std::size_t v = 0; v < n_; ++v) {
         if (bal[v] <= 0) continue;
         (balanced_ && adversarial_[v] ? adv : honest).push_back(static_cast<validator_t>(v));
      }
      std::mt19937_64 rng(mix64(seed_, static_cast<std::uint64_t>(e) * 2 + 1));
      fisher_yates(honest, rng);
      fisher_yates(adv, rng);
      out.committees.by_slot.resize(E);
      auto deal = [&](const std::vector<validator_t>& ids) {
         for (std::size_t i = 0; i < E; ++i) {
            std::size_t lo = i * ids.size() / E, hi = (i + 1) * ids.size() / E;
            for (std::size_t k = lo; k < hi; ++k) out.committees.by_slot[i].push_back(ids[k]);
         }
      };
      deal(honest);
      deal(adv);
      std::vector<validator_t> active = honest;
      active.insert(active.end(), adv.begin(), adv.end());
      std::sort(active.begin(), active.end());
      std::mt19937_64 prng(mix64(seed_, static_cast<std::uint64_t>(e) * 2 + 2));
      out.committees.proposers.resize(E, 0);
      for (std::size_t i = 0; i < E; ++i)
         out.committees.proposers[i] = active.empty() ? 0 : active[uniform_below(prng, active.size())];
   }
   for (std::size_t i = 0; i < out.committees.by_slot.size(); ++i) {
      std::sort(out.committees.by_slot[i].begin(), out.committees.by_slot[i].end());
      for (auto v : out.committees.by_slot[i]) out.slot_of[v] = static_cast<std::int32_t>(i);
   }
   return out;
}

const committee_schedule::entry& committee_schedule::get(epoch_t e) const {
   if (auto it = cache_.find(e); it != cache_.end()) return it->second;
   return cache_.emplace(e, build(e)).first->second;
}

const epoch_committees& committee_schedule::at_epoch(epoch_t e) const { return get(e).committees; }

const std::vector<validator_t>& committee_schedule::committee(slot_t s) const {
   if (s < 0) return empty_;
   const auto& c = get(tm_.epoch_of(s)).committees;
   return c.by_slot[static_cast<std::size_t>(s - tm_.first_slot(tm_.epoch_of(s)))];
}

validator_t committee_schedule::proposer(slot_t s) const {
   const auto& c = get(tm_.epoch_of(s)).committees;
   return c.proposers[static_cast<std::size_t>(s - tm_.first_slot(tm_.epoch_of(s)))];
}

std::optional<slot_t> committee_schedule::assigned_slot(validator_t v, epoch_t e) const {
   if (e < 0 || v < 0 || static_cast<std::size_t>(v) >= n_) return std::nullopt;
   auto off = get(e).slot_of[v];
   if (off < 0) return std::nullopt;
   return tm_.first_slot(e) + off;
}

bool committee_schedule::in_committee(validator_t v, slot_t s) const {
   if (s < 0) return false;
   auto a = assigned_slot(v, tm_.epoch_of(s));
   return a && *a == s;
}

std::vector<char> committee_schedule::union_mask(slot_t from, slot_t to) const {
   std::vector<char> mask(n_, 0);
   from = std::max<slot_t>(from, 0);
   for (slot_t s = from; s <= to; ++s)
      for (auto v : committee(s)) mask[v] = 1;
   return mask;
}

std::vector<validator_t> committee_schedule::committee_union(slot_t from, slot_t to) const {
   auto mask = union_mask(from, to);
   std::vector<validator_t> out;
   for (std::size_t v = 0; v < n_; ++v)
      if (mask[v]) out.push_back(static_cast<validator_t>(v));
   return out;
}

}  // namespace gasper

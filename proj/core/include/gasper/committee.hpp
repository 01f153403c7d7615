#pragma once

#include "gasper/balances.hpp"
#include "gasper/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace gasper {

/// splitmix64 finalizer, used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

/// Uniform integer in [0, n) by rejection sampling; portable across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
   for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_below(rng, i);
      std::swap(v[i - 1], v[j]);
   }
}

struct epoch_committees {
   std::vector<std::vector<validator_t>> by_slot;  ///< one committee per slot of the epoch
   std::vector<validator_t> proposers;             ///< one proposer per slot
};

/// Per-epoch partition of the active set into slot committees plus proposers.
/// Deterministic in (seed, epoch). With balanced placement the adversary ids
/// are dealt evenly over the committees.
class committee_schedule {
 public:
   committee_schedule(timing tm, std::uint64_t seed, const balance_schedule* schedule,
                      std::vector<validator_t> adversaries = {}, bool balanced = false);

   const timing& time() const { return tm_; }
   std::size_t num_validators() const { return n_; }

   void set_override(epoch_t e, epoch_committees c);

   const epoch_committees& at_epoch(epoch_t e) const;
   const std::vector<validator_t>& committee(slot_t s) const;
   validator_t proposer(slot_t s) const;
   /// Slot assigned to v in epoch e, if v is active then.
   std::optional<slot_t> assigned_slot(validator_t v, epoch_t e) const;
   bool in_committee(validator_t v, slot_t s) const;

   /// Membership mask of the union of committees of slots [from, to]. Empty if from > to.
   std::vector<char> union_mask(slot_t from, slot_t to) const;
   std::vector<validator_t> committee_union(slot_t from, slot_t to) const;

 private:
   struct entry {
      epoch_committees committees;
      std::vector<std::int32_t> slot_of;  ///< per validator offset in epoch or -1
   };
   const entry& get(epoch_t e) const;
   entry build(epoch_t e) const;

   timing tm_;
   std::uint64_t seed_;
   const balance_schedule* schedule_;
   std::size_t n_;
   std::vector<char> adversarial_;
   bool balanced_;
   std::map<epoch_t, epoch_committees> overrides_;
   mutable std::map<epoch_t, entry> cache_;
   static const std::vector<validator_t> empty_;
};

}  // namespace gasper

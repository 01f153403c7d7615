#pragma once

#include "gasper/rational.hpp"
#include "gasper/time.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace gasper {

/// Effective-balance assignment: weight per validator index, 0 = not in the set.
using balances = std::vector<std::int64_t>;

std::int64_t total_weight(const balances& b);

enum class churn_kind { reward, penalty, exit, entry };

const char* to_string(churn_kind k);
churn_kind churn_kind_from_string(const std::string& s);

struct churn_entry {
   epoch_t epoch = 0;
   validator_t validator = 0;
   churn_kind kind = churn_kind::reward;
   rational rate{0};          ///< reward / penalty fraction
   std::int64_t amount = 0;   ///< entry balance
};

/// Applies one entry. Deltas are floored so that realized changes never exceed
/// the configured rate.
balances churn_step(const balances& b, const churn_entry& entry);

/// Reduces v's balance by floor(sigma * balance).
void apply_slash_penalty(balances& b, validator_t v, const rational& sigma);

struct churn_rates {
   rational chi{0};
   rational rho{0};
   rational pi{0};
};

/// Initial balances plus per-epoch churn entries, applied at epoch boundaries.
class balance_schedule {
 public:
   balance_schedule() = default;
   balance_schedule(balances initial, std::vector<churn_entry> entries);

   const balances& initial() const { return initial_; }
   const std::vector<churn_entry>& entries() const { return entries_; }
   bool empty() const { return entries_.empty(); }

   /// Unslashed assignment in force during epoch e.
   const balances& at(epoch_t e) const;

   /// Applies every entry with from < epoch <= to, in listed order.
   void apply_range(balances& b, epoch_t from, epoch_t to) const;

   /// Throws config_error if any epoch step exceeds the given rates.
   void check_rates(const churn_rates& rates) const;

 private:
   balances initial_;
   std::vector<churn_entry> entries_;
   mutable std::map<epoch_t, balances> cache_;
};

}  // namespace gasper

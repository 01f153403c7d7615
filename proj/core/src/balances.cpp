#include "gasper/balances.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace gasper {

std::int64_t total_weight(const balances& b) { return std::accumulate(b.begin(), b.end(), std::int64_t{0}); }

const char* to_string(churn_kind k) {
   switch (k) {
      case churn_kind::reward: return "reward";
      case churn_kind::penalty: return "penalty";
      case churn_kind::exit: return "exit";
      case churn_kind::entry: return "entry";
   }
   return "?";
}

churn_kind churn_kind_from_string(const std::string& s) {
   if (s == "reward") return churn_kind::reward;
   if (s == "penalty") return churn_kind::penalty;
   if (s == "exit") return churn_kind::exit;
   if (s == "entry") return churn_kind::entry;
   throw config_error("unknown churn kind: " + s);
}

balances churn_step(const balances& b, const churn_entry& entry) {
   if (entry.validator < 0 || static_cast<std::size_t>(entry.validator) >= b.size())
      throw config_error("churn entry for unknown validator " + std::to_string(entry.validator));
   balances out = b;
   auto& w = out[entry.validator];
   switch (entry.kind) {
      case churn_kind::reward: w += (entry.rate * rational(w)).floor(); break;
      case churn_kind::penalty: w -= (entry.rate * rational(w)).floor(); break;
      case churn_kind::exit: w = 0; break;
      case churn_kind::entry:
         if (w != 0) throw config_error("entry for already active validator " + std::to_string(entry.validator));
         w = entry.amount;
         break;
   }
   return out;
}

void apply_slash_penalty(balances& b, validator_t v, const rational& sigma) {
   b[v] -= (sigma * rational(b[v])).floor();
}

balance_schedule::balance_schedule(balances initial, std::vector<churn_entry> entries)
    : initial_(std::move(initial)), entries_(std::move(entries)) {
   std::stable_sort(entries_.begin(), entries_.end(),
                    [](const churn_entry& a, const churn_entry& b) { return a.epoch < b.epoch; });
   for (const auto& e : entries_) {
      if (e.epoch < 1) throw config_error("churn entries must start at epoch >= 1");
      if (e.validator < 0 || static_cast<std::size_t>(e.validator) >= initial_.size())
         throw config_error("churn entry for unknown validator " + std::to_string(e.validator));
      if (e.rate < rational(0)) throw config_error("churn rate must be non-negative");
   }
}

const balances& balance_schedule::at(epoch_t e) const {
   if (entries_.empty() || e <= 0) return initial_;
   if (auto it = cache_.find(e); it != cache_.end()) return it->second;
   balances b = initial_;
   apply_range(b, 0, e);
   return cache_.emplace(e, std::move(b)).first->second;
}

void balance_schedule::apply_range(balances& b, epoch_t from, epoch_t to) const {
   for (const auto& e : entries_) {
      if (e.epoch > from && e.epoch <= to) b = churn_step(b, e);
   }
}

void balance_schedule::check_rates(const churn_rates& rates) const {
   std::map<epoch_t, std::vector<const churn_entry*>> by_epoch;
   for (const auto& e : entries_) by_epoch[e.epoch].push_back(&e);
   for (const auto& [epoch, list] : by_epoch) {
      const balances& before = at(epoch - 1);
      rational total(total_weight(before));
      std::int64_t exited = 0, entered = 0;
      for (const auto* e : list) {
         switch (e->kind) {
            case churn_kind::reward:
               if (e->rate > rates.rho) throw config_error("reward rate above rho at epoch " + std::to_string(epoch));
               break;
            case churn_kind::penalty:
               if (e->rate > rates.pi) throw config_error("penalty rate above pi at epoch " + std::to_string(epoch));
               break;
            case churn_kind::exit: exited += before[e->validator]; break;
            case churn_kind::entry: entered += e->amount; break;
         }
      }
      if (rational(exited) > rates.chi * total)
         throw config_error("exited weight above chi at epoch " + std::to_string(epoch));
      if (rational(entered) > rates.chi * total)
         throw config_error("entered weight above chi at epoch " + std::to_string(epoch));
   }
}

}  // namespace gasper

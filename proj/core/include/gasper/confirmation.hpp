#pragma once

#include "gasper/chain.hpp"
#include "gasper/fork_choice.hpp"
#include "gasper/rational.hpp"
#include "gasper/view.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace gasper::confirm {

/// lmd: LMD-GHOST rule; hfc: LMD-GHOST-HFC rule; churn: changing-balances
/// variant; appendix: variant with full FFG history and finality short-circuit.
enum class rule { lmd, hfc, churn, appendix };

inline constexpr rule all_rules[] = {rule::lmd, rule::hfc, rule::churn, rule::appendix};

const char* to_string(rule r);
rule rule_from_string(const std::string& s);

struct safety_params {
   rational beta{0};
   std::optional<rational> lambda;  ///< absent = unbounded
   rational epsilon{0};
   rational rho{0};
   rational pi{0};
   rational chi{0};
   rational sigma{0};
   rational w_lower{1};
   int max_lookahead = 2;
};

// Threshold formulas.
rational hon_ffg_ratio(const rational& beta);
rational hon_ffg_ratio_var(const rational& beta, const rational& rho, const rational& pi, const rational& chi);
/// 1/4 (1 - p/E)
rational lmd_beta_bound(const rational& boost_score, std::int64_t slots_per_epoch);
/// (5 - sqrt(9 + 16 p/E)) / 8, as a double for reporting.
double appendix_beta_bound(const rational& boost_score, std::int64_t slots_per_epoch);
/// Exact test of beta < (5 - sqrt(9 + 16 p/E)) / 8.
bool below_appendix_bound(const rational& beta, const rational& boost_score, std::int64_t slots_per_epoch);

/// Required LMD support weight: strictly more than this passes.
rational lmd_support_threshold(std::int64_t window, const rational& boost, const rational& beta);
rational lmd_support_threshold_full(std::int64_t window, std::int64_t total, const rational& boost,
                                    const safety_params& sp);
/// Required received-plus-projected FFG weight: at least this passes.
rational justification_threshold(std::int64_t total, const safety_params& sp);
rational justification_threshold_full(std::int64_t total, const safety_params& sp);

struct admissibility {
   bool ok = true;
   std::string reason;
};
admissibility check_admissible(rule r, const safety_params& sp, const rational& boost_score,
                               std::int64_t slots_per_epoch);

/// One observer's evaluation context at a slot start.
class evaluator {
 public:
   evaluator(const view& v, tick_t t, const fork_choice::params& fc, const safety_params& sp);

   const block_store& store() const { return store_; }
   const view& observed() const { return v_; }
   tick_t time() const { return t_; }
   slot_t slot() const { return slot_; }
   epoch_t epoch() const { return epoch_; }
   const checkpoint& gj() const { return gj_; }
   const checkpoint& gf() const { return gf_; }

   /// Support / window weights of b over committees [ps+1(b), s'] under `weights`;
   /// nullopt when the window is empty.
   std::optional<std::pair<std::int64_t, std::int64_t>> q_parts(block_t b, slot_t s, const balances& weights) const;
   std::optional<rational> q_indicator(block_t b, slot_t s, const balances& weights) const;
   /// Same ratio counting only validators in `honest`.
   std::optional<rational> p_indicator(block_t b, slot_t s, const balances& weights, const std::vector<char>& honest) const;

   bool is_lmd_ghost_safe(block_t b, const checkpoint& c, bool full = false);
   bool will_chkp_be_justified(block_t b, epoch_t e, bool full = false);
   bool is_confirmed_no_caching(rule r, block_t b);

   /// Highest block on the chain of `head` passing the no-caching check.
   block_t highest_passing(rule r, block_t head);
   /// Highest block on the chain of `head` passing isLMDGHOSTSafe under gjView.
   block_t highest_raw_safe(block_t head);

 private:
   const std::vector<char>& pass_vector(block_t tip, const checkpoint& c, bool full);
   std::int64_t mask_weight(const std::vector<char>& mask, const balances& w) const;
   bool in_snapshot(block_t b) const;

   const view& v_;
   const block_store& store_;
   tick_t t_;
   slot_t slot_;
   epoch_t epoch_;
   fork_choice::params fc_;
   safety_params sp_;
   checkpoint gj_, gf_;
   std::vector<block_t> latest_;
   std::map<std::tuple<block_t, checkpoint, bool>, std::vector<char>> pass_cache_;
};

/// Per-observer cache of the highest block confirmed at each slot start.
class executor {
 public:
   explicit executor(rule r) : rule_(r) {}
   rule which() const { return rule_; }

   struct result {
      block_t best = no_block;    ///< highest block passing at this slot start
      std::vector<block_t> tips;  ///< confirmed set = ancestors of these
   };

   /// Evaluates at the slot start of `ev`; `head` is the rule's head.
   result on_slot_start(evaluator& ev, block_t head);

 private:
   rule rule_;
   std::map<slot_t, block_t> best_;
};

}  // namespace gasper::confirm

#include "gasper/confirmation.hpp"
#include "gasper/view.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gasper;
using namespace gasper::confirm;

namespace {

// 16 validators, E = 2; slot 0 committee {0..7}, slot 1 committee {8..15}.
struct q_setup {
   timing tm;
   balance_schedule bal{balances(16, 1), {}};
   block_store store;
   committee_schedule sched;
   view v;
   block_t b, c;

   q_setup()
       : tm([] {
            timing t;
            t.slots_per_epoch = 2;
            return t;
         }()),
         store(tm, &bal, rational(0)),
         sched(tm, 1, &bal),
         v(store, sched) {
      epoch_committees ec;
      ec.by_slot = {{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}};
      ec.proposers = {0, 8};
      sched.set_override(0, ec);
      b = store.add_block(store.genesis(), 1, 8);
      c = store.add_block(store.genesis(), 1, 8, {}, {}, 1);
      v.receive_block(store.genesis(), 0);
      v.receive_block(b, tm.slot_start(1));
      v.receive_block(c, tm.slot_start(1));
      for (validator_t s = 8; s < 14; ++s) vote(s, b);
   }
   void vote(validator_t s, block_t x) { v.receive_ghost(store.add_ghost_vote({s, 1, x}), tm.vote_time(1)); }
};

fork_choice::params boost_one_eightieth() {
   fork_choice::params p;
   p.boost_score = rational(1, 40);  // p / E = 1/80 with E = 2
   return p;
}

}  // namespace

TEST_CASE("honest FFG ratio") {
   CHECK(hon_ffg_ratio(rational(0)) == rational(2, 3));
   CHECK(hon_ffg_ratio(rational(1, 6)) == rational(1));
   CHECK(hon_ffg_ratio(rational(1, 10)) == (rational(2, 3) + rational(1, 10)) / rational(9, 10));
   CHECK_THROWS_AS(hon_ffg_ratio(rational(1, 5)), std::domain_error);
   CHECK(hon_ffg_ratio_var(rational(1, 12), rational(0), rational(0), rational(0)) == hon_ffg_ratio(rational(1, 12)));
   CHECK(hon_ffg_ratio_var(rational(0), rational(1, 100), rational(1, 100), rational(1, 100)) > rational(2, 3));
}

TEST_CASE("beta bounds") {
   const rational p(2, 5);
   CHECK(lmd_beta_bound(p, 32) == rational(79, 320));
   CHECK(std::fabs(rational(79, 320).to_double() - 0.246) < 1e-3);
   const double app = appendix_beta_bound(p, 32);
   CHECK(std::fabs(app - (5.0 - std::sqrt(9.0 + 16.0 / 80.0)) / 8.0) < 1e-15);
   CHECK(std::fabs(app - 0.246) < 1e-3);
   CHECK(below_appendix_bound(rational(245, 1000), p, 32));
   CHECK_FALSE(below_appendix_bound(rational(246, 1000), p, 32));
}

TEST_CASE("support and justification thresholds") {
   // beta 0, p/E = 1/80, window = the whole set of 80: half of (1 + 1/80)
   CHECK(lmd_support_threshold(80, rational(1), rational(0)) / rational(80) == rational(81, 160));

   safety_params sp;
   sp.rho = sp.pi = sp.chi = rational(1, 100);
   const rational full = lmd_support_threshold_full(8000, 8000, rational(100), sp) / rational(8000);
   const rational expect = rational(101, 198) * (rational(1) + rational(1, 80) * rational(102, 100)) + rational(1, 100);
   CHECK(full == expect);
   CHECK(std::fabs(full.to_double() - 0.5267) < 1e-4);

   safety_params j;
   j.beta = rational(1, 10);
   CHECK(justification_threshold(90, j) == rational(69));
   j.lambda = rational(0);
   CHECK(justification_threshold(90, j) == rational(60));
   j.lambda = rational(4);
   CHECK(justification_threshold(90, j) == rational(64));
}

TEST_CASE("changing balance thresholds collapse at zero rates") {
   std::mt19937_64 rng(99);
   for (int i = 0; i < 1000; ++i) {
      safety_params sp;
      sp.beta = rational(static_cast<std::int64_t>(uniform_below(rng, 17)), 100);
      if (uniform_below(rng, 2)) sp.lambda = rational(static_cast<std::int64_t>(uniform_below(rng, 1000)));
      const auto total = 1 + static_cast<std::int64_t>(uniform_below(rng, 1'000'000));
      const auto window = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(total)));
      const rational boost(static_cast<std::int64_t>(uniform_below(rng, 100000)), 1 + static_cast<std::int64_t>(uniform_below(rng, 80)));
      CHECK(lmd_support_threshold_full(window, total, boost, sp) == lmd_support_threshold(window, boost, sp.beta));
      CHECK(justification_threshold_full(total, sp) == justification_threshold(total, sp));
      CHECK(hon_ffg_ratio_var(sp.beta, 0, 0, 0) == hon_ffg_ratio(sp.beta));
   }
}

TEST_CASE("support thresholds grow with beta and boost") {
   std::mt19937_64 rng(5);
   for (int i = 0; i < 200; ++i) {
      const auto w = 1 + static_cast<std::int64_t>(uniform_below(rng, 1000));
      const rational b1(static_cast<std::int64_t>(uniform_below(rng, 50)), 100), b2 = b1 + rational(1, 100);
      const rational p1(static_cast<std::int64_t>(uniform_below(rng, 50))), p2 = p1 + rational(1);
      CHECK(lmd_support_threshold(w, p1, b1) <= lmd_support_threshold(w, p1, b2));
      CHECK(lmd_support_threshold(w, p1, b1) <= lmd_support_threshold(w, p2, b1));
   }
}

TEST_CASE("admissibility") {
   safety_params sp;
   const rational p(2, 5);
   sp.beta = rational(24, 100);
   CHECK(check_admissible(rule::lmd, sp, p, 32).ok);
   sp.beta = rational(79, 320);
   CHECK_FALSE(check_admissible(rule::lmd, sp, p, 32).ok);
   sp.beta = rational(1, 6);
   CHECK_FALSE(check_admissible(rule::hfc, sp, p, 32).ok);
   sp.beta = rational(1, 10);
   sp.epsilon = rational(1, 4);
   CHECK_FALSE(check_admissible(rule::hfc, sp, p, 32).ok);
   sp.epsilon = rational(1, 20);
   CHECK(check_admissible(rule::hfc, sp, p, 32).ok);
   CHECK(check_admissible(rule::appendix, sp, p, 32).ok);
   sp.rho = sp.pi = sp.chi = rational(1, 100);
   sp.sigma = rational(1, 32);
   CHECK(check_admissible(rule::churn, sp, p, 32).ok);
   sp.chi = rational(1, 2);
   CHECK_FALSE(check_admissible(rule::churn, sp, p, 32).ok);
   sp.chi = rational(1, 100);
   sp.sigma = rational(0);
   CHECK_FALSE(check_admissible(rule::churn, sp, p, 32).ok);
}

TEST_CASE("rule names round trip") {
   for (auto r : all_rules) CHECK(rule_from_string(to_string(r)) == r);
   CHECK_THROWS_AS(rule_from_string("fast"), config_error);
}

TEST_CASE("Q indicator counts filtered supporters over the window") {
   q_setup q;
   evaluator ev(q.v, q.tm.slot_start(2), boost_one_eightieth(), {});
   const balances w(16, 1);
   CHECK(ev.q_indicator(q.b, 1, w) == rational(3, 4));
   CHECK(ev.q_indicator(q.c, 1, w) == rational(0));
   // empty window: undefined
   CHECK_FALSE(ev.q_indicator(q.b, 0, w).has_value());
   // beta 0, p/E = 1/80: 6 > (8 + 16/80) / 2
   CHECK(ev.is_lmd_ghost_safe(q.b, {q.store.genesis(), 0}));

   std::vector<char> honest(16, 1);
   honest[14] = honest[15] = 0;
   q.vote(14, q.b);
   q.v.receive_ghost(q.store.add_ghost_vote({12, 1, q.b}), q.tm.vote_time(1));  // duplicate, harmless
   evaluator ev2(q.v, q.tm.slot_start(2), boost_one_eightieth(), {});
   CHECK(ev2.q_indicator(q.b, 1, w) == rational(7, 8));
   std::vector<char> honest_six(16, 0);
   for (validator_t v : {8, 9, 10, 11, 12, 15}) honest_six[static_cast<std::size_t>(v)] = 1;
   CHECK(ev2.p_indicator(q.b, 1, w, honest_six) == rational(5, 6));
   CHECK(ev2.p_indicator(q.b, 1, w, honest) == rational(6, 6));
}

TEST_CASE("equivocators leave the numerator") {
   q_setup q;
   q.vote(12, q.c);
   q.vote(13, q.c);
   evaluator ev(q.v, q.tm.slot_start(2), boost_one_eightieth(), {});
   const balances w(16, 1);
   CHECK(ev.q_indicator(q.b, 1, w) == rational(1, 2));
   // 4 is not above (8 + 1/5) / 2
   CHECK_FALSE(ev.is_lmd_ghost_safe(q.b, {q.store.genesis(), 0}));
}

TEST_CASE("genesis is vacuously safe") {
   q_setup q;
   evaluator ev(q.v, q.tm.slot_start(2), boost_one_eightieth(), {});
   CHECK(ev.is_lmd_ghost_safe(q.store.genesis(), {q.store.genesis(), 0}));
}

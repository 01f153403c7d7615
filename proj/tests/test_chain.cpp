#include "gasper/chain.hpp"
#include "gasper/committee.hpp"

#include <doctest.h>

#include <algorithm>

using namespace gasper;

namespace {

timing epochs_of(std::int64_t e) {
   timing tm;
   tm.slots_per_epoch = e;
   return tm;
}

struct fixture {
   balance_schedule bal;
   block_store store;
   explicit fixture(std::size_t n = 4, std::int64_t e = 8)
       : bal(balances(n, 1), {}), store(epochs_of(e), &bal, rational(0)) {}
   std::int32_t vote(validator_t v, checkpoint s, checkpoint t) { return store.add_ffg_vote({v, s, t, 0}); }
};

}  // namespace

TEST_CASE("rational arithmetic is exact") {
   CHECK(rational::parse("0.16") == rational(4, 25));
   CHECK(rational::parse("-2/6") == rational(-1, 3));
   CHECK(rational::parse("1e-3") == rational(1, 1000));
   CHECK(rational(1, 3) + rational(1, 6) == rational(1, 2));
   CHECK(rational(7, 2).floor() == 3);
   CHECK(rational(-7, 2).floor() == -4);
   CHECK(rational(7, 2).ceil() == 4);
   CHECK(rational(2, 3) < rational(3, 4));
   CHECK_THROWS_AS(rational(1, 0), std::domain_error);
   rational big(static_cast<rational::int_t>(1) << 100, 1);
   CHECK_THROWS_AS(big * big, arithmetic_overflow);
}

TEST_CASE("slot and epoch arithmetic") {
   timing tm = epochs_of(4);
   CHECK(tm.epoch_of(7) == 1);
   CHECK(tm.first_slot(2) == 8);
   CHECK(tm.last_slot(0) == 3);
   CHECK(tm.slot_at(-1) == -1);
   // GST in epoch 0 before the start of its last slot: next epoch
   CHECK(tm.ggst(0) == tm.epoch_start(1));
   CHECK(tm.ggst(tm.slot_start(3)) == tm.epoch_start(1));
   // GST inside the last slot: one more epoch
   CHECK(tm.ggst(tm.slot_start(3) + 1) == tm.epoch_start(2));
   CHECK_THROWS_AS(epochs_of(1).validate(0), config_error);
   CHECK_THROWS_AS(tm.validate(8), config_error);
}

TEST_CASE("checkpoints are epoch boundary blocks") {
   fixture f;
   auto& st = f.store;
   const block_t g = st.genesis();
   CHECK(st.checkpoint_of(g, 0) == checkpoint{g, 0});
   block_t b1 = st.add_block(g, 3, 0);
   CHECK(st.checkpoint_of(b1, 0) == checkpoint{g, 0});
   CHECK(st.checkpoint_of(b1, 1) == checkpoint{b1, 1});
   block_t b2 = st.add_block(b1, 9, 1);
   CHECK(st.checkpoint_of(b2, 1) == checkpoint{b1, 1});
   CHECK(st.checkpoint_of(b2, 2) == checkpoint{b2, 2});
   for (epoch_t e = 0; e <= 3; ++e) {
      auto c = st.checkpoint_of(b2, e);
      CHECK(st.checkpoint_of(c.block, e) == c);
   }
   CHECK_THROWS_AS(st.checkpoint_of(99, 0), lookup_error);
}

TEST_CASE("ancestry and conflicts") {
   fixture f;
   auto& st = f.store;
   const block_t g = st.genesis();
   block_t a = st.add_block(g, 1, 0);
   block_t b = st.add_block(a, 2, 0);
   block_t c = st.add_block(g, 1, 1);
   CHECK(st.is_ancestor(g, g));
   CHECK(st.is_ancestor(a, b));
   CHECK_FALSE(st.is_ancestor(b, a));
   CHECK(st.conflicts(b, c));
   CHECK(st.conflicts(c, b));
   CHECK_FALSE(st.conflicts(a, b));
   CHECK(st.ancestor_at_depth(b, 1) == a);
   CHECK(st.ancestor_at_slot(b, 1) == a);
   CHECK(st.add_block(a, 2, 0) == b);  // content addressed
   CHECK_THROWS_AS(st.add_block(b, 2, 0), std::invalid_argument);
   CHECK_THROWS_AS(st.is_ancestor(g, 42), lookup_error);
}

TEST_CASE("committees partition every epoch") {
   timing tm = epochs_of(4);
   balance_schedule bal(balances(22, 1), {});
   committee_schedule sched(tm, 7, &bal);
   for (epoch_t e = 0; e < 5; ++e) {
      std::vector<int> count(22, 0);
      for (const auto& c : sched.at_epoch(e).by_slot) {
         CHECK((c.size() == 5 || c.size() == 6));
         for (auto v : c) ++count[static_cast<std::size_t>(v)];
      }
      CHECK(std::all_of(count.begin(), count.end(), [](int k) { return k == 1; }));
   }
   CHECK(sched.committee_union(5, 4).empty());
   CHECK(sched.committee_union(5, 5) == [&] {
      auto c = sched.committee(5);
      std::sort(c.begin(), c.end());
      return c;
   }());
   committee_schedule again(tm, 7, &bal);
   CHECK(again.at_epoch(3).by_slot == sched.at_epoch(3).by_slot);
}

TEST_CASE("union over one epoch covers the set") {
   balance_schedule bal(balances(8, 1), {});
   committee_schedule sched(epochs_of(2), 3, &bal);
   CHECK(sched.committee(0).size() == 4);
   CHECK(sched.committee_union(0, 1).size() == 8);
   auto mask = sched.union_mask(0, 0);
   CHECK(std::count(mask.begin(), mask.end(), 1) == 4);
}

TEST_CASE("balanced placement deals adversaries evenly") {
   balance_schedule bal(balances(64, 1), {});
   committee_schedule sched(epochs_of(8), 11, &bal, {58, 59, 60, 61, 62, 63, 0, 1}, true);
   for (epoch_t e = 0; e < 3; ++e)
      for (const auto& c : sched.at_epoch(e).by_slot) {
         int adv = 0;
         for (auto v : c) adv += v >= 58 || v <= 1;
         CHECK(adv == 1);
      }
}

TEST_CASE("justification needs two thirds of the checkpoint's balances") {
   fixture f;
   auto& st = f.store;
   const block_t g = st.genesis();
   CHECK(st.is_justified_in({g, 0}, g));
   CHECK(st.get(g).ffg->finalized.front() == checkpoint{g, 0});
   block_t b1 = st.add_block(g, 8, 0);
   const checkpoint c1{b1, 1};
   std::vector<std::int32_t> two{f.vote(0, {g, 0}, c1), f.vote(1, {g, 0}, c1)};
   block_t weak = st.add_block(b1, 9, 1, two);
   CHECK_FALSE(st.is_justified_in(c1, weak));
   auto three = two;
   three.push_back(f.vote(2, {g, 0}, c1));
   block_t b2 = st.add_block(b1, 9, 1, three, {}, 1);
   CHECK(st.is_justified_in(c1, b2));
   CHECK(st.get(b2).gu == c1);
   CHECK(st.get(b2).gj == checkpoint{g, 0});

   // voting source: GU for later epochs, GJ for its own epoch
   CHECK(st.voting_source(b2, 1) == checkpoint{g, 0});
   CHECK(st.voting_source(b2, 2) == c1);
   CHECK_THROWS_AS(st.voting_source(b2, 0), std::domain_error);

   // consecutive supermajority link finalizes the source
   block_t b3 = st.add_block(b2, 16, 2);
   const checkpoint c2{b3, 2};
   std::vector<std::int32_t> link{f.vote(0, c1, c2), f.vote(1, c1, c2), f.vote(3, c1, c2)};
   block_t b4 = st.add_block(b3, 17, 3, link);
   CHECK(st.is_justified_in(c2, b4));
   const auto& fin = st.get(b4).ffg->finalized;
   CHECK(std::find(fin.begin(), fin.end(), c1) != fin.end());
   CHECK(st.get(b4).gj == c1);
   for (const auto& c : fin) CHECK(st.is_justified_in(c, b4));
}

TEST_CASE("gu epoch never exceeds the block epoch") {
   fixture f;
   auto& st = f.store;
   block_t b = st.genesis();
   for (slot_t s = 1; s < 40; s += 3) {
      b = st.add_block(b, s, static_cast<validator_t>(s % 4));
      CHECK(st.get(b).gu.epoch <= st.get(b).epoch);
      CHECK(st.is_justified_in({st.genesis(), 0}, b));
   }
}

TEST_CASE("double and surround votes are slashable") {
   fixture f;
   auto& st = f.store;
   const block_t g = st.genesis();
   block_t a = st.add_block(g, 8, 0);
   block_t c = st.add_block(g, 8, 1);
   block_t d = st.add_block(a, 24, 2);
   ffg_vote v1{3, {g, 0}, {a, 1}, 0}, v2{3, {g, 0}, {c, 1}, 0};
   CHECK(st.is_slashable(v1, v2));
   ffg_vote inner{3, {a, 1}, {a, 2}, 0}, outer{3, {g, 0}, {d, 3}, 0};
   CHECK(st.is_slashable(inner, outer));
   CHECK_FALSE(st.is_slashable(v1, v1));
   ffg_vote other{2, {g, 0}, {c, 1}, 0};
   CHECK_FALSE(st.is_slashable(v1, other));

   auto i1 = st.add_ffg_vote(v1), i2 = st.add_ffg_vote(v2);
   block_t s = st.add_block(a, 9, 0, {}, {{i1, i2}});
   CHECK((*st.get(s).slashed)[3]);
   block_t later = st.add_block(s, 10, 0);
   CHECK((*st.get(later).slashed)[3]);
   CHECK_FALSE((*st.get(a).slashed)[3]);
   CHECK_THROWS_AS(st.add_block(a, 9, 1, {}, {{i1, i1}}), std::invalid_argument);
}

TEST_CASE("churn steps floor toward the configured rate") {
   balances b{100, 100, 100};
   auto r = churn_step(b, {1, 0, churn_kind::reward, rational(1, 3), 0});
   CHECK(r[0] == 133);
   auto p = churn_step(b, {1, 1, churn_kind::penalty, rational(1, 3), 0});
   CHECK(p[1] == 67);
   auto x = churn_step(b, {1, 2, churn_kind::exit, rational(0), 0});
   CHECK(x[2] == 0);
   balance_schedule sched(b, {{2, 0, churn_kind::reward, rational(1, 10), 0}});
   CHECK(sched.at(1)[0] == 100);
   CHECK(sched.at(2)[0] == 110);
   CHECK_THROWS_AS(sched.check_rates({rational(0), rational(1, 20), rational(0)}), config_error);
   CHECK_NOTHROW(sched.check_rates({rational(0), rational(1, 10), rational(0)}));
   balances s{32};
   apply_slash_penalty(s, 0, rational(1, 32));
   CHECK(s[0] == 31);
}

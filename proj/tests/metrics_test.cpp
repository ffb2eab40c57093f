#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cbsf/metrics.hpp"
#include "test_support.hpp"

namespace cbsf {
namespace {

using testing::matrix;

GroupSpec group_of(std::vector<UserIndex> members) {
  GroupSpec g;
  g.members = std::move(members);
  return g;
}

TEST(MaeRmse, Examples) {
  // Test ratings 3 and 4 for user 1; predictions 4 and 3.
  const auto test = matrix({{1, 1, 3}, {1, 2, 4}});
  PredictionMatrix pm(std::vector<UserIndex>{0}, 2);
  pm.set(0, 0, 4.0, Provenance::kPredicted);
  pm.set(0, 1, 3.0, Provenance::kPredicted);
  auto r = mae_rmse(pm, test);
  EXPECT_DOUBLE_EQ(r.mae, 1.0);
  EXPECT_DOUBLE_EQ(r.rmse, 1.0);
  EXPECT_EQ(r.evaluated, 2u);

  pm.set(0, 0, 3.0, Provenance::kPredicted);
  pm.set(0, 1, 2.0, Provenance::kPredicted);
  r = mae_rmse(pm, test);
  EXPECT_DOUBLE_EQ(r.mae, 1.0);
  EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(2.0));
}

TEST(MaeRmse, SkipsMissingAndObservedCells) {
  const auto test = matrix({{1, 1, 3}, {1, 2, 4}, {1, 3, 5}});
  PredictionMatrix pm(std::vector<UserIndex>{0}, 3);
  pm.set(0, 0, 3.5, Provenance::kPredicted);
  pm.set(0, 1, 4.0, Provenance::kObserved);
  const auto r = mae_rmse(pm, test);
  EXPECT_EQ(r.evaluated, 1u);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_DOUBLE_EQ(r.mae, 0.5);
  EXPECT_TRUE(std::isnan(mae_rmse(PredictionMatrix(std::vector<UserIndex>{0}, 3), test).mae));
}

TEST(GroupPref, MeanOfMemberMeans) {
  PredictionMatrix pm(std::vector<UserIndex>{0, 1}, 2);
  pm.set(0, 0, 4.0, Provenance::kPredicted);
  pm.set(1, 0, 2.0, Provenance::kPredicted);
  const std::vector<ItemIndex> one{0};
  EXPECT_DOUBLE_EQ(group_pref(group_of({0, 1}), one, pm), 3.0);
  // Item 1 has a single rating; the missing member is left out.
  pm.set(1, 1, 5.0, Provenance::kObserved);
  const std::vector<ItemIndex> both{0, 1};
  EXPECT_DOUBLE_EQ(group_pref(group_of({0, 1}), both, pm), 4.0);
}

TEST(GroupDeviation, MaeAndRmseOfChoquetMinusMean) {
  // Five items; users 1 and 2 rate three and two at constant values, so the
  // capacity is additive with weights 0.6 and 0.4 and the Choquet score is
  // the weighted mean. Values (1.5, 0.5) and (1, 2) deviate by +0.1, -0.1.
  const auto train = matrix({{1, 1, 4}, {1, 2, 4}, {1, 3, 4}, {2, 4, 3}, {2, 5, 3}});
  const auto g = group_of({0, 1});
  const FuzzyCapacity cap(g, train);
  PredictionMatrix pm(g.members, 2);
  pm.set(0, 0, 1.5, Provenance::kPredicted);
  pm.set(1, 0, 0.5, Provenance::kPredicted);
  pm.set(0, 1, 1.0, Provenance::kPredicted);
  pm.set(1, 1, 2.0, Provenance::kPredicted);
  const std::vector<ItemIndex> items{0, 1};
  EXPECT_NEAR(mae_g(g, items, pm, cap), 0.1, 1e-12);
  EXPECT_NEAR(rmse_g(g, items, pm, cap), 0.1, 1e-12);
}

TEST(Fairness, JainAndVariance) {
  const std::vector<double> s{1.0, 0.0};
  EXPECT_DOUBLE_EQ(jain_index(s), 0.5);
  EXPECT_DOUBLE_EQ(one_minus_variance(s), 0.75);
  const std::vector<double> equal{3.0, 3.0, 3.0};
  EXPECT_DOUBLE_EQ(jain_index(equal), 1.0);
  EXPECT_DOUBLE_EQ(one_minus_variance(equal), 1.0);
  EXPECT_TRUE(std::isnan(jain_index({})));

  PredictionMatrix pm(std::vector<UserIndex>{0, 1}, 1);
  pm.set(0, 0, 1.0, Provenance::kPredicted);
  pm.set(1, 0, 0.0, Provenance::kPredicted);
  const std::vector<ItemIndex> items{0};
  EXPECT_DOUBLE_EQ(fairness_jain(group_of({0, 1}), items, pm), 0.5);
  EXPECT_DOUBLE_EQ(fairness_var(group_of({0, 1}), items, pm), 0.75);
}

TEST(Fairness, JainBounds) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(std::uniform_int_distribution<int>(1, 30)(rng));
    for (auto& x : s) x = value(rng);
    const double j = jain_index(s);
    EXPECT_GE(j, 1.0 / s.size() - 1e-12);
    EXPECT_LE(j, 1.0 + 1e-12);
  }
}

// Four users; item 1 rated by all, item 2 by user 1 only, item 3 by users
// 2 and 3.
RatingMatrix four_users() {
  return matrix({{1, 1, 3}, {2, 1, 4}, {3, 1, 5}, {4, 1, 2}, {1, 2, 4}, {2, 3, 1}, {3, 3, 2}});
}

TEST(Novelty, Endpoints) {
  const auto m = four_users();
  const std::vector<ItemIndex> everyone{*m.find_item(1)};
  const std::vector<ItemIndex> single{*m.find_item(2)};
  EXPECT_DOUBLE_EQ(novelty(everyone, m), 0.0);
  EXPECT_DOUBLE_EQ(novelty(single, m), 1.0);
  const std::vector<ItemIndex> pair{*m.find_item(3)};
  EXPECT_DOUBLE_EQ(novelty(pair, m), 0.5);
}

TrustGraph edges(std::vector<TrustEdge> list) {
  TrustGraph tg;
  tg.edges = std::move(list);
  return tg;
}

TEST(Ntc, CountsTrustedRatersOnly) {
  const auto m = four_users();
  // Users 2 and 3 are trusted; the edge from unknown user 9 is ignored.
  const auto tg = edges({{1, 2, 1.0}, {1, 3, 0.5}, {9, 4, 1.0}});
  const auto trusted = trusted_users(m, tg);
  EXPECT_EQ(trusted, (std::vector<bool>{false, true, true, false}));
  const std::vector<ItemIndex> pair{*m.find_item(3)};
  EXPECT_DOUBLE_EQ(ntc(pair, m, tg), 0.5);
  // No trusted rater: the count is floored at 1.
  const std::vector<ItemIndex> single{*m.find_item(2)};
  EXPECT_DOUBLE_EQ(ntc(single, m, tg), 1.0);
  EXPECT_DOUBLE_EQ(ntc(single, m, edges({})), 1.0);
}

TEST(Ntr, TrustWeightedSimilarity) {
  const auto m = four_users();
  SimilarityTable t(4);
  t.at(1, 2).score = 0.5;
  const std::vector<ItemIndex> pair{*m.find_item(3)};
  EXPECT_DOUBLE_EQ(ntr(pair, m, edges({}), t), 1.0);
  EXPECT_DOUBLE_EQ(ntr(pair, m, edges({{2, 3, 1.0}}), t), 0.5);
  // The edge endpoints never co-rate item 2.
  const std::vector<ItemIndex> single{*m.find_item(2)};
  EXPECT_DOUBLE_EQ(ntr(single, m, edges({{2, 3, 1.0}}), t), 1.0);
}

TEST(MetricReport, CsvRoundTrip) {
  MetricReport r;
  r.dataset = "movielens100k";
  r.method = "cbs";
  r.strategy = "topsis";
  r.n_top = 25;
  r.satisfaction = 4.123456789012345;
  r.rmse_g = 0.1;
  r.mae_g = 1.0 / 3;
  r.fairness1 = 0.99;
  r.fairness2 = -0.5;
  r.novelty = 0.7;
  r.ntc = std::numeric_limits<double>::quiet_NaN();
  r.ntr = std::numeric_limits<double>::quiet_NaN();
  r.skipped = 12;
  const auto line = to_csv(r);
  EXPECT_EQ(line.substr(line.size() - 4), ",,12");
  const auto back = parse_metric_report(line);
  EXPECT_EQ(back.dataset, r.dataset);
  EXPECT_EQ(back.n_top, r.n_top);
  EXPECT_EQ(back.satisfaction, r.satisfaction);
  EXPECT_EQ(back.mae_g, r.mae_g);
  EXPECT_EQ(back.fairness2, r.fairness2);
  EXPECT_TRUE(std::isnan(back.ntc));
  EXPECT_TRUE(std::isnan(back.ntr));
  EXPECT_EQ(back.skipped, 12u);
  EXPECT_EQ(to_csv(back), line);
  EXPECT_THROW(parse_metric_report("a,b,c"), ParseError);
  EXPECT_THROW(parse_metric_report("a,b,c,x,1,1,1,1,1,1,1,1,0"), ParseError);
}

TEST(GroupMetrics, InvariantToItemAndMemberOrder) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> value(1, 5);
  std::bernoulli_distribution missing(0.1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto train = testing::random_matrix(rng, 10, 30, 0.4);
    std::vector<UserIndex> users(std::uniform_int_distribution<std::size_t>(2, 6)(rng));
    std::iota(users.begin(), users.end(), 0);
    PredictionMatrix pm(users, 30);
    for (std::size_t r = 0; r < users.size(); ++r)
      for (ItemIndex i = 0; i < 30; ++i)
        if (!missing(rng)) pm.set(r, i, value(rng), Provenance::kPredicted);
    std::vector<ItemIndex> items(30);
    std::iota(items.begin(), items.end(), 0);
    std::shuffle(items.begin(), items.end(), rng);
    items.resize(8);

    const auto g = group_of(users);
    const FuzzyCapacity cap(g, train);
    auto shuffled_items = items;
    std::shuffle(shuffled_items.begin(), shuffled_items.end(), rng);
    auto shuffled_members = users;
    std::shuffle(shuffled_members.begin(), shuffled_members.end(), rng);
    const auto h = group_of(shuffled_members);
    const FuzzyCapacity cap_h(h, train);

    for (const auto& [grp, c, list] :
         {std::tuple{&g, &cap, &shuffled_items}, std::tuple{&h, &cap_h, &items}}) {
      EXPECT_NEAR(group_pref(*grp, *list, pm), group_pref(g, items, pm), 1e-12);
      EXPECT_NEAR(mae_g(*grp, *list, pm, *c), mae_g(g, items, pm, cap), 1e-12);
      EXPECT_NEAR(rmse_g(*grp, *list, pm, *c), rmse_g(g, items, pm, cap), 1e-12);
      EXPECT_NEAR(fairness_jain(*grp, *list, pm), fairness_jain(g, items, pm), 1e-12);
      EXPECT_NEAR(fairness_var(*grp, *list, pm), fairness_var(g, items, pm), 1e-12);
    }
    EXPECT_NEAR(novelty(shuffled_items, train), novelty(items, train), 1e-12);
  }
}

}  // namespace
}  // namespace cbsf

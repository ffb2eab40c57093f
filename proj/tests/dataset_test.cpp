#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "cbsf/dataset.hpp"
#include "test_support.hpp"

namespace cbsf {
namespace {

using testing::matrix;
using testing::random_matrix;

RatingMatrix parse(const std::string& text, RatingFormat format) {
  std::istringstream in(text);
  return parse_ratings(in, format);
}

TEST(ParseRatings, MovieLensTabIgnoresTimestamp) {
  const auto m = parse("1\t10\t3\t881250949\n2\t10\t5\t0\n1\t20\t4\t1\n",
                       RatingFormat::kMovieLensTab);
  EXPECT_EQ(m.num_users(), 2u);
  EXPECT_EQ(m.num_items(), 2u);
  EXPECT_EQ(m.num_ratings(), 3u);
  EXPECT_EQ(m.r_min(), 3.0);
  EXPECT_EQ(m.r_max(), 5.0);
  EXPECT_EQ(*m.rating(*m.find_user(1), *m.find_item(20)), 4.0);
}

TEST(ParseRatings, FilmTrustSpaceSeparated) {
  const auto m = parse("1 1 2.5\n1 2 0.5\n2 1 4\n", RatingFormat::kFilmTrustSpace);
  EXPECT_EQ(m.num_ratings(), 3u);
  EXPECT_EQ(m.r_min(), 0.5);
  EXPECT_EQ(m.r_max(), 4.0);
}

TEST(ParseRatings, DuplicatePairKeepsLastRating) {
  const auto m = parse("1 1 3\n1 1 4\n", RatingFormat::kFilmTrustSpace);
  ASSERT_EQ(m.num_ratings(), 1u);
  EXPECT_EQ(*m.rating(0, 0), 4.0);
}

TEST(ParseRatings, MalformedLineReportsLineNumber) {
  try {
    parse("1 1 3\n\n2 x 4\n", RatingFormat::kFilmTrustSpace);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("1 1\n", RatingFormat::kFilmTrustSpace), ParseError);
  EXPECT_THROW(parse("1 1 3 7\n", RatingFormat::kFilmTrustSpace), ParseError);
  EXPECT_THROW(parse("1\t1\n", RatingFormat::kMovieLensTab), ParseError);
}

TEST(ParseRatings, EmptyInputIsAnError) {
  EXPECT_THROW(parse("", RatingFormat::kMovieLensTab), ParseError);
  EXPECT_THROW(parse("\n\n", RatingFormat::kFilmTrustSpace), ParseError);
}

TEST(LoadRatings, MissingFileIsIoError) {
  EXPECT_THROW(load_ratings("/nonexistent/cbsf/u.data", RatingFormat::kMovieLensTab), IoError);
}

TEST(ParseTrust, KeepsDirectedEdgesAndDropsSelfLoops) {
  std::istringstream in("1 2 1.0\n2 1 0.5\n3 3 0.5\n4 5 1.5\n");
  const auto tg = parse_trust(in);
  ASSERT_EQ(tg.edges.size(), 3u);
  EXPECT_EQ(tg.dropped_self_loops, 1u);
  EXPECT_EQ(tg.clamped, 1u);
  EXPECT_EQ(tg.edges[0].truster, 1);
  EXPECT_EQ(tg.edges[0].trustee, 2);
  EXPECT_EQ(tg.edges[1].truster, 2);
  EXPECT_EQ(tg.edges[1].trust, 0.5);
  EXPECT_EQ(tg.edges[2].trust, 1.0);
}

TEST(ParseTrust, SingleEdge) {
  std::istringstream in("1 2 1.0\n");
  EXPECT_EQ(parse_trust(in).edges.size(), 1u);
}

TEST(ParseTrust, MalformedLine) {
  std::istringstream in("1 2 1\n1 2\n");
  try {
    parse_trust(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RatingMatrix, RowAndColumnViewsAgree) {
  std::mt19937_64 rng(7);
  const auto m = random_matrix(rng, 30, 40, 0.2);
  std::size_t by_rows = 0, by_cols = 0;
  for (UserIndex u = 0; u < m.num_users(); ++u) {
    for (const auto& e : m.user_ratings(u)) {
      ++by_rows;
      const auto col = m.item_ratings(e.item);
      EXPECT_TRUE(std::any_of(col.begin(), col.end(), [&](const UserRating& r) {
        return r.user == u && r.rating == e.rating;
      }));
    }
  }
  for (ItemIndex i = 0; i < m.num_items(); ++i) by_cols += m.item_ratings(i).size();
  EXPECT_EQ(by_rows, m.num_ratings());
  EXPECT_EQ(by_cols, m.num_ratings());
}

TEST(RatingMatrix, MeanAndMedian) {
  const auto m = matrix({{1, 1, 1}, {1, 2, 2}, {1, 3, 5}, {1, 4, 4}, {2, 1, 3}});
  EXPECT_DOUBLE_EQ(m.mean(0), 3.0);
  EXPECT_DOUBLE_EQ(m.median(0), 2.0);  // lower of the middle pair (2, 4)
  EXPECT_DOUBLE_EQ(m.median(1), 3.0);
}

TEST(WriteRatings, RoundTripsBothFormats) {
  std::mt19937_64 rng(11);
  const auto m = random_matrix(rng, 20, 30, 0.3, {0.5, 1.0, 2.25, 3.5, 4.0});
  for (const auto format : {RatingFormat::kMovieLensTab, RatingFormat::kFilmTrustSpace}) {
    std::ostringstream out;
    write_ratings(out, m, format);
    const auto back = parse(out.str(), format);
    const auto a = m.records();
    const auto b = back.records();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_EQ(a[j].user, b[j].user);
      EXPECT_EQ(a[j].item, b[j].item);
      EXPECT_EQ(a[j].rating, b[j].rating);
    }
  }
}

TEST(NormalizeScale, EndpointsAndInterior) {
  const auto m = matrix({{1, 1, 0.5}, {1, 2, 4.0}, {2, 1, 2.25}});
  const auto n = normalize_scale(m, 1.0, 5.0);
  EXPECT_DOUBLE_EQ(*n.rating(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(*n.rating(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(*n.rating(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(n.r_min(), 1.0);
  EXPECT_DOUBLE_EQ(n.r_max(), 5.0);
}

TEST(NormalizeScale, IdentityOnSameScale) {
  const auto m = matrix({{1, 1, 1}, {1, 2, 5}, {2, 1, 3.5}});
  const auto n = normalize_scale(m, 1.0, 5.0);
  for (UserIndex u = 0; u < m.num_users(); ++u)
    for (const auto& e : m.user_ratings(u)) EXPECT_EQ(*n.rating(u, e.item), e.rating);
}

TEST(NormalizeScale, RejectsDegenerateScales) {
  EXPECT_THROW(normalize_scale(matrix({{1, 1, 3}, {2, 1, 3}}), 1, 5), InvalidArgument);
  EXPECT_THROW(normalize_scale(matrix({{1, 1, 1}, {2, 1, 3}}), 5, 1), InvalidArgument);
}

// Ten ratings per user on items 1..10, plus a second user so no item is
// single-rated.
RatingMatrix two_users_ten_items() {
  std::vector<RatingRecord> records;
  for (int u = 1; u <= 2; ++u)
    for (int i = 1; i <= 10; ++i) records.push_back({u, i, static_cast<double>(1 + i % 5)});
  return matrix(records);
}

TEST(SplitPerUser, FloorOfRatio) {
  const auto s = split_per_user(two_users_ten_items(), 0.2, 3);
  EXPECT_EQ(s.train.user_ratings(0).size(), 8u);
  EXPECT_EQ(s.test.user_ratings(0).size(), 2u);
}

TEST(SplitPerUser, FiveRatingsStayInTrain) {
  std::vector<RatingRecord> records;
  for (int i = 1; i <= 5; ++i) records.push_back({1, i, 3.0});
  for (int i = 1; i <= 5; ++i) records.push_back({2, i, 4.0});
  const auto s = split_per_user(matrix(records), 0.5, 1);
  EXPECT_EQ(s.train.user_ratings(0).size(), 5u);
  EXPECT_EQ(s.test.num_ratings(), 0u);
}

TEST(SplitPerUser, SingleRaterItemIsRepaired) {
  // User 1 has 10 items; item 10 is rated by nobody else. With ratio 0.9
  // the cap keeps only five in train, so some seed puts item 10 in test.
  std::vector<RatingRecord> records;
  for (int i = 1; i <= 10; ++i) records.push_back({1, i, 4.0});
  for (int i = 1; i <= 9; ++i) records.push_back({2, i, 3.0});
  const auto m = matrix(records);
  const ItemIndex lonely = *m.find_item(10);
  bool saw_repair = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split_per_user(m, 0.9, seed);
    EXPECT_FALSE(s.test.has_rating(0, lonely));
    EXPECT_TRUE(s.train.has_rating(0, lonely));
    saw_repair |= s.repaired > 0;
  }
  EXPECT_TRUE(saw_repair);
}

TEST(SplitPerUser, RejectsBadRatio) {
  EXPECT_THROW(split_per_user(two_users_ten_items(), 0.0, 1), InvalidArgument);
  EXPECT_THROW(split_per_user(two_users_ten_items(), 1.0, 1), InvalidArgument);
}

TEST(SplitPerUser, InvariantsOnRandomMatrices) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = random_matrix(rng, 25, 30, 0.35);
    const double ratio = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const auto s = split_per_user(m, ratio, rng());
    ASSERT_EQ(s.train.num_users(), m.num_users());
    ASSERT_EQ(s.train.num_ratings() + s.test.num_ratings(), m.num_ratings());
    for (UserIndex u = 0; u < m.num_users(); ++u) {
      const auto all = m.user_ratings(u).size();
      EXPECT_GE(s.train.user_ratings(u).size(), std::min<std::size_t>(all, kMinTrainRatings));
      if (all <= kMinTrainRatings) EXPECT_TRUE(s.test.user_ratings(u).empty());
      for (const auto& e : s.test.user_ratings(u)) {
        EXPECT_FALSE(s.train.has_rating(u, e.item));
        EXPECT_EQ(*m.rating(u, e.item), e.rating);
      }
    }
    for (ItemIndex i = 0; i < m.num_items(); ++i)
      if (!s.test.item_ratings(i).empty()) EXPECT_FALSE(s.train.item_ratings(i).empty());
  }
}

TEST(SplitPerUser, DeterministicForSeed) {
  std::mt19937_64 rng(5);
  const auto m = random_matrix(rng, 30, 30, 0.4);
  std::ostringstream a, b, c;
  write_split_manifest(a, split_per_user(m, 0.2, 77));
  write_split_manifest(b, split_per_user(m, 0.2, 77));
  write_split_manifest(c, split_per_user(m, 0.2, 78));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(SplitPerUser, TrainingStatisticsIgnoreTestRatings) {
  std::mt19937_64 rng(9);
  const auto m = random_matrix(rng, 20, 30, 0.5);
  const auto s = split_per_user(m, 0.3, 4);
  auto records = m.records();
  for (auto& r : records) {
    const auto u = *m.find_user(r.user);
    const auto i = *m.find_item(r.item);
    if (s.test.has_rating(u, i)) r.rating = r.rating == 5 ? 1 : 5;
  }
  const auto perturbed = split_per_user(RatingMatrix::from_records(records), 0.3, 4);
  for (UserIndex u = 0; u < m.num_users(); ++u) {
    EXPECT_EQ(std::isnan(s.train.mean(u)), std::isnan(perturbed.train.mean(u)));
    if (std::isnan(s.train.mean(u))) continue;
    EXPECT_EQ(s.train.mean(u), perturbed.train.mean(u));
    EXPECT_EQ(s.train.median(u), perturbed.train.median(u));
  }
  EXPECT_EQ(s.train.r_min(), perturbed.train.r_min());
  EXPECT_EQ(s.train.r_max(), perturbed.train.r_max());
}

TEST(SplitManifest, Format) {
  const auto m = matrix({{7, 1, 3}, {7, 2, 4}});
  std::ostringstream out;
  write_split_manifest(out, split_per_user(m, 0.5, 1));
  EXPECT_EQ(out.str(), "7,1,train\n7,2,train\n");
}

TEST(GenerateGroups, SizesMembersAndDeterminism) {
  std::mt19937_64 rng(3);
  const auto m = random_matrix(rng, 60, 10, 0.3);
  const auto groups = generate_groups(m, 120, 3, 30, 99);
  ASSERT_EQ(groups.size(), 120u);
  for (const auto& g : groups) {
    EXPECT_GE(g.members.size(), 3u);
    EXPECT_LE(g.members.size(), 30u);
    EXPECT_TRUE(std::is_sorted(g.members.begin(), g.members.end()));
    EXPECT_EQ(std::set<UserIndex>(g.members.begin(), g.members.end()).size(), g.members.size());
    for (const auto u : g.members) EXPECT_LT(u, m.num_users());
  }
  const auto again = generate_groups(m, 120, 3, 30, 99);
  for (std::size_t j = 0; j < groups.size(); ++j) EXPECT_EQ(groups[j].members, again[j].members);
}

TEST(GenerateGroups, ExactSize) {
  const auto m = two_users_ten_items();
  const auto more = matrix({{1, 1, 1}, {2, 1, 1}, {3, 1, 1}});
  const auto groups = generate_groups(more, 1, 3, 3, 1);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].members.size(), 3u);
  EXPECT_THROW(generate_groups(m, 1, 3, 3, 1), InvalidArgument);
}

}  // namespace
}  // namespace cbsf

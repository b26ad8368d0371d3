#include <gtest/gtest.h>

#include <map>
#include <random>
#include <thread>

#include "addictfree/community/community.hpp"
#include "addictfree/core/error.hpp"
#include "addictfree/geo/geofence.hpp"

using namespace addictfree;
using namespace addictfree::community;

namespace {

const Timestamp kNow = parse_timestamp("2024-03-01T12:00:00Z");
const GeoPoint kLubbock(33.58, -101.87);

UserProfile person(const std::string& id, RecoveryStage stage, std::set<Substance> kinds,
                   std::optional<GeoPoint> home) {
  UserProfile u;
  u.user_id = id;
  u.display_name = "name-" + id;
  u.recovery_stage = stage;
  u.addiction_kinds = std::move(kinds);
  u.home_region = home;
  return u;
}

// About `km` kilometres due north of `p`.
GeoPoint north(const GeoPoint& p, double km) {
  return GeoPoint(p.lat() + km * 1000.0 / geo::kEarthRadiusM * 180.0 / 3.141592653589793, p.lon());
}

class CommunityTest : public ::testing::Test {
 protected:
  CommunityTest()
      : community_(store_, [this](const UserId& id) -> std::optional<UserProfile> {
          auto it = users_.find(id);
          if (it == users_.end()) return std::nullopt;
          return it->second;
        }) {
    users_["ana"] = person("ana", RecoveryStage::EarlyRecovery, {Substance::Alcohol}, kLubbock);
    users_["bo"] = person("bo", RecoveryStage::EarlyRecovery, {Substance::Tobacco}, {});
  }

  ErrorCode code_of(const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
  }

  store::Store store_;
  std::map<UserId, UserProfile> users_;
  Community community_;
};

}  // namespace

TEST(Suggest, SameStageSharedAddictionNearby) {
  const auto u = person("u", RecoveryStage::EarlyRecovery, {Substance::Alcohol}, kLubbock);
  auto c = person("c", RecoveryStage::EarlyRecovery, {Substance::Alcohol, Substance::Tobacco},
                  north(kLubbock, 10));
  auto s = score_candidate(u, c);
  EXPECT_NEAR(s.score, 0.9, 1e-12);
  EXPECT_EQ(s.basis, (std::set<Basis>{Basis::SameStage, Basis::SameAddiction, Basis::Vicinity}));
  // Identical stage with a therapist candidate: both sides are therapists.
  auto tu = u;
  tu.recovery_stage = RecoveryStage::Therapist;
  c.recovery_stage = RecoveryStage::Therapist;
  s = score_candidate(tu, c);
  EXPECT_NEAR(s.score, 1.0, 1e-12);
  EXPECT_TRUE(s.basis.count(Basis::Therapist));
  // A therapist candidate at a different stage keeps only the other terms.
  EXPECT_NEAR(score_candidate(u, c).score, 0.6, 1e-12);
}

TEST(Suggest, VicinityDecaysLinearly) {
  const auto a = person("a", RecoveryStage::ActiveUse, {}, kLubbock);
  for (double km : {0.0, 30.0, 49.0, 100.0, 275.0, 499.0, 600.0}) {
    const auto b = person("b", RecoveryStage::ActiveUse, {}, north(kLubbock, km));
    const double d = geo::haversine_m(*a.home_region, *b.home_region) / 1000.0;
    const double expected = d <= 50 ? 1.0 : d >= 500 ? 0.0 : (500 - d) / 450;
    EXPECT_NEAR(vicinity(a, b), expected, 1e-9) << km;
    EXPECT_EQ(vicinity(a, b), vicinity(b, a));
  }
  EXPECT_EQ(vicinity(a, person("x", RecoveryStage::ActiveUse, {}, {})), 0.0);
}

TEST(Suggest, RankingAndEdgeCases) {
  std::vector<UserProfile> all{
      person("me", RecoveryStage::EarlyRecovery, {Substance::Alcohol}, kLubbock),
      person("zed", RecoveryStage::ActiveUse, {Substance::Tobacco}, {}),
      person("amy", RecoveryStage::ActiveUse, {Substance::Tobacco}, {}),
      person("max", RecoveryStage::EarlyRecovery, {Substance::Alcohol}, kLubbock),
  };
  const auto top = suggest_connections("me", all, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].candidate_id, "max");
  EXPECT_EQ(top[1].candidate_id, "amy");  // 0 vs 0: name order
  EXPECT_EQ(top[2].candidate_id, "zed");
  EXPECT_EQ(top[1].score, 0.0);
  EXPECT_EQ(suggest_connections("me", all, 1).size(), 1u);
  EXPECT_TRUE(suggest_connections("me", {all[0]}, 3).empty());
  EXPECT_THROW(suggest_connections("ghost", all, 3), Error);
  EXPECT_THROW(suggest_connections("me", all, 0), Error);
}

TEST(Suggest, RandomPopulationsStayInBounds) {
  std::mt19937_64 rng(5);
  std::vector<UserProfile> all;
  for (int i = 0; i < 60; ++i) {
    std::set<Substance> kinds;
    if (rng() % 2) kinds.insert(Substance::Alcohol);
    if (rng() % 2) kinds.insert(Substance::Tobacco);
    std::optional<GeoPoint> home;
    if (rng() % 3) home = north(kLubbock, static_cast<double>(rng() % 800));
    all.push_back(person("p" + std::to_string(i), static_cast<RecoveryStage>(rng() % 5), kinds, home));
  }
  for (const auto& u : all) {
    const auto s = suggest_connections(u.user_id, all, 100);
    EXPECT_EQ(s.size(), all.size() - 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NE(s[i].candidate_id, u.user_id);
      EXPECT_GE(s[i].score, 0.0);
      EXPECT_LE(s[i].score, 1.0);
      if (i) {
        EXPECT_GE(s[i - 1].score, s[i].score);
      }
    }
  }
}

TEST_F(CommunityTest, PostAppearsInFeed) {
  const auto p = community_.create_post("ana", "Day 10", "Still going.", kNow);
  EXPECT_EQ(p.author_name, "name-ana");
  const auto feed = community_.list_feed();
  ASSERT_EQ(feed.size(), 1u);
  EXPECT_EQ(feed[0], p);
  EXPECT_EQ(community_.get_post(p.post_id), p);
}

TEST_F(CommunityTest, PostValidation) {
  EXPECT_EQ(code_of([&] { community_.create_post("ana", "t", " \n", kNow); }), ErrorCode::EmptyBody);
  EXPECT_EQ(code_of([&] { community_.create_post("ana", "", "b", kNow); }), ErrorCode::EmptyTitle);
  EXPECT_EQ(code_of([&] { community_.create_post("ghost", "t", "b", kNow); }), ErrorCode::UnknownUser);
}

TEST_F(CommunityTest, FeedOrder) {
  const auto later = community_.create_post("bo", "b", "b", kNow + std::chrono::minutes{1});
  const auto a = community_.create_post("ana", "a", "a", kNow);
  const auto b = community_.create_post("bo", "a2", "a2", kNow);
  const auto feed = community_.list_feed();
  ASSERT_EQ(feed.size(), 3u);
  EXPECT_EQ(feed[0].post_id, a.post_id);
  EXPECT_EQ(feed[1].post_id, b.post_id);
  EXPECT_LT(a.post_id, b.post_id);
  EXPECT_EQ(feed[2].post_id, later.post_id);
}

TEST_F(CommunityTest, Comments) {
  const auto p = community_.create_post("ana", "t", "b", kNow);
  community_.add_comment(p.post_id, "bo", "second", kNow + std::chrono::minutes{5});
  community_.add_comment(p.post_id, "ana", "first", kNow + std::chrono::minutes{2});
  const auto got = community_.get_post(p.post_id);
  ASSERT_EQ(got->comments.size(), 2u);
  EXPECT_EQ(got->comments[0].body, "first");
  EXPECT_EQ(got->comments[1].body, "second");
  EXPECT_EQ(code_of([&] { community_.add_comment("nope", "bo", "x", kNow); }), ErrorCode::UnknownPost);
  EXPECT_EQ(code_of([&] { community_.add_comment(p.post_id, "bo", "", kNow); }), ErrorCode::EmptyBody);
}

TEST_F(CommunityTest, HundredConcurrentComments) {
  const auto p = community_.create_post("ana", "t", "b", kNow);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        community_.add_comment(p.post_id, t % 2 ? "ana" : "bo", std::to_string(t * 25 + i),
                               kNow + std::chrono::seconds{i});
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto got = community_.get_post(p.post_id);
  ASSERT_EQ(got->comments.size(), 100u);
  std::set<std::string> bodies;
  for (std::size_t i = 0; i < got->comments.size(); ++i) {
    bodies.insert(got->comments[i].body);
    if (i) {
      EXPECT_LE(got->comments[i - 1].created_at, got->comments[i].created_at);
    }
  }
  EXPECT_EQ(bodies.size(), 100u);
}

TEST_F(CommunityTest, Inbox) {
  community_.send_message("ana", "bo", "hi", kNow);
  community_.send_message("ana", "bo", "again", kNow + std::chrono::seconds{1});
  const auto inbox = community_.inbox("bo");
  ASSERT_EQ(inbox.size(), 2u);
  EXPECT_EQ(inbox[0].body, "hi");
  EXPECT_EQ(inbox[1].from, "ana");
  EXPECT_TRUE(community_.inbox("ana").empty());
  EXPECT_EQ(code_of([&] { community_.send_message("ana", "ghost", "x", kNow); }), ErrorCode::UnknownUser);
}

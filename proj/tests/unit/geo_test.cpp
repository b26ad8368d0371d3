#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "addictfree/core/error.hpp"
#include "addictfree/geo/fence_machine.hpp"
#include "addictfree/geo/geofence.hpp"
#include "addictfree/sim/simulator.hpp"

namespace addictfree::geo {
namespace {

using std::chrono::seconds;
using Kind = FenceEventKind;

const Timestamp kT0 = parse_timestamp("2024-01-01T10:00:00Z");

Geofence fence(const std::string& id, GeoPoint c, double r, std::optional<DurationConstraint> dc = {},
               FenceKind kind = FenceKind::AlcoholSpot) {
  Geofence f;
  f.fence_id = id;
  f.center = c;
  f.radius_m = r;
  f.kind = kind;
  f.state_constraint = dc;
  return f;
}

LocationFix fix_at(GeoPoint p, long offset_s) { return LocationFix{"u1", p, kT0 + seconds{offset_s}, {}}; }

std::vector<Kind> kinds(const std::vector<FenceEvent>& evs) {
  std::vector<Kind> out;
  for (const auto& e : evs) out.push_back(e.kind);
  return out;
}

GeoPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(-89.9, 89.9);
  std::uniform_real_distribution<double> lon(-180, 180);
  return {lat(rng), lon(rng)};
}

TEST(Haversine, IdentityAndEquatorDegree) {
  const GeoPoint a(33.58, -101.87);
  EXPECT_EQ(haversine_m(a, a), 0.0);
  // One degree of longitude on the equator is R * pi / 180.
  const double expected = kEarthRadiusM * std::numbers::pi / 180.0;
  EXPECT_NEAR(expected, 111194.93, 0.01);
  EXPECT_NEAR(haversine_m({0, 0}, {0, 1}), expected, 1e-6);
}

TEST(Haversine, SymmetricOnRandomPairs) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    EXPECT_EQ(haversine_m(a, b), haversine_m(b, a));
    EXPECT_GE(haversine_m(a, b), 0.0);
  }
}

TEST(Haversine, MatchesSphericalLawOfCosines) {
  // Independent formula; agreement is loose near zero where it loses precision.
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    const double d2r = std::numbers::pi / 180.0;
    const double c = std::sin(a.lat() * d2r) * std::sin(b.lat() * d2r) +
                     std::cos(a.lat() * d2r) * std::cos(b.lat() * d2r) *
                         std::cos((b.lon() - a.lon()) * d2r);
    const double ref = kEarthRadiusM * std::acos(std::clamp(c, -1.0, 1.0));
    EXPECT_NEAR(haversine_m(a, b), ref, 1e-6 * ref + 1e-3);
  }
}

TEST(Haversine, TriangleInequality) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    const auto c = random_point(rng);
    const double ab = haversine_m(a, b);
    const double lhs = haversine_m(a, c) + haversine_m(c, b);
    EXPECT_LE(ab, lhs * (1 + 1e-6) + 1e-9);
  }
}

TEST(FenceContains, CenterBoundaryAndFar) {
  const GeoPoint c(0, 0);
  EXPECT_TRUE(fence_contains(fence("f", c, 1e-3), c));
  EXPECT_FALSE(fence_contains(fence("f", c, 100), GeoPoint(0, 1)));
  const GeoPoint p(0.001, 0.002);
  EXPECT_TRUE(fence_contains(fence("f", c, haversine_m(c, p)), p));
  EXPECT_FALSE(fence_contains(fence("f", c, std::nextafter(haversine_m(c, p), 0.0)), p));
}

TEST(ValidateConstraints, BoundaryExamples) {
  const GeoPoint c(0, 0);
  const auto bad_state = validate_constraints(
      {fence("f", c, 10, DurationConstraint{300, 300, ConstraintScope::FenceState})},
      std::vector<DurationConstraint>{});
  ASSERT_EQ(bad_state.size(), 1u);
  EXPECT_EQ(bad_state[0].source, ConstraintViolation::Source::FenceState);
  EXPECT_EQ(bad_state[0].index, 0u);

  const auto zero_transition = validate_constraints(
      {}, std::vector<DurationConstraint>{{0, 0, ConstraintScope::Transition}});
  ASSERT_EQ(zero_transition.size(), 1u);
  EXPECT_EQ(zero_transition[0].source, ConstraintViolation::Source::Transition);

  EXPECT_TRUE(validate_constraints({fence("f", c, 10, DurationConstraint{0, 600})},
                                   std::vector<DurationConstraint>{})
                  .empty());
  EXPECT_TRUE(validate_constraints(
                  {}, std::vector<DurationConstraint>{{300, 300, ConstraintScope::Transition}})
                  .empty());
}

TEST(ValidateConstraints, ReportsEveryViolationWithIndex) {
  const GeoPoint c(0, 0);
  std::vector<Geofence> fences = {fence("a", c, 10, DurationConstraint{0, 600}),
                                  fence("b", c, 10, DurationConstraint{-1, 600}),
                                  fence("c", c, 10),
                                  fence("d", c, 10, DurationConstraint{700, 600})};
  std::vector<DurationConstraint> tr = {{0, 10, ConstraintScope::Transition},
                                        {5, 4, ConstraintScope::Transition},
                                        {0, -1, ConstraintScope::Transition}};
  const auto v = validate_constraints(fences, tr);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0].index, 1u);
  EXPECT_EQ(v[1].index, 3u);
  EXPECT_EQ(v[2].index, 1u);
  EXPECT_EQ(v[3].index, 2u);
}

TEST(ValidateFence, RadiusMustBePositive) {
  EXPECT_THROW(validate_fence(fence("f", {0, 0}, 0)), Error);
  EXPECT_THROW(validate_fence(fence("f", {0, 0}, 10, DurationConstraint{5, 5})), Error);
  EXPECT_NO_THROW(validate_fence(fence("f", {0, 0}, 10)));
}

TEST(Step, EnterThenConfirmAfterMinimumDwell) {
  const GeoPoint c(33.58, -101.87);
  FenceSet fs({fence("F", c, 50, DurationConstraint{300, 3600})});
  FenceMachine m{"u1", FenceMachine::Outside{}, {}};
  auto r1 = step(m, fs, fix_at(c, 0));
  EXPECT_EQ(kinds(r1.events), std::vector<Kind>{Kind::Entered});
  auto r2 = step(r1.machine, fs, fix_at(c, 200));
  EXPECT_TRUE(r2.events.empty());
  auto r3 = step(r2.machine, fs, fix_at(c, 400));
  EXPECT_EQ(kinds(r3.events), std::vector<Kind>{Kind::DwellConfirmed});
  EXPECT_EQ(r3.events[0].at, kT0 + seconds{400});
  auto r4 = step(r3.machine, fs, fix_at(c, 500));
  EXPECT_TRUE(r4.events.empty());
}

TEST(Step, ExitReturnsToOutside) {
  const GeoPoint c(33.58, -101.87);
  FenceSet fs({fence("F", c, 50, DurationConstraint{0, 3600})});
  FenceMachine m{"u1", FenceMachine::Outside{}, {}};
  m = step(m, fs, fix_at(c, 0)).machine;
  m = step(m, fs, fix_at(c, 60)).machine;
  auto r = step(m, fs, fix_at(GeoPoint(33.60, -101.87), 120));
  EXPECT_EQ(kinds(r.events), std::vector<Kind>{Kind::Exited});
  EXPECT_FALSE(std::holds_alternative<FenceMachine::Inside>(r.machine.mode));
}

TEST(Step, ImmediateHopEmitsExitEnterTransit) {
  const GeoPoint f(0, 0);
  const GeoPoint g(0, 0.01);
  FenceSet fs({fence("F", f, 100), fence("G", g, 100)});
  FenceMachine m{"u1", FenceMachine::Outside{}, {}};
  m = step(m, fs, fix_at(f, 0)).machine;
  auto r = step(m, fs, fix_at(g, 60));
  EXPECT_EQ(kinds(r.events),
            (std::vector<Kind>{Kind::Exited, Kind::Entered, Kind::TransitCompleted}));
  EXPECT_EQ(r.events[1].fence_id, "G");
  EXPECT_EQ(r.events[2].fence_id, "F");
  EXPECT_EQ(r.events[2].to_fence, "G");
}

TEST(Step, TransitionRuleViolations) {
  const GeoPoint f(0, 0);
  const GeoPoint g(0, 0.05);
  const GeoPoint mid(0, 0.025);
  FenceSet fs({fence("F", f, 100), fence("G", g, 100)},
              {TransitionRule{"F", "G", {600, 1200, ConstraintScope::Transition}}});
  const auto run = [&](long travel) {
    FenceMachine m{"u1", FenceMachine::Outside{}, {}};
    m = step(m, fs, fix_at(f, 0)).machine;
    m = step(m, fs, fix_at(mid, 60)).machine;
    return kinds(step(m, fs, fix_at(g, 60 + travel)).events);
  };
  EXPECT_EQ(run(300), (std::vector<Kind>{Kind::Entered, Kind::TransitViolation}));
  EXPECT_EQ(run(900), (std::vector<Kind>{Kind::Entered, Kind::TransitCompleted}));
  EXPECT_EQ(run(1500), (std::vector<Kind>{Kind::Entered, Kind::TransitViolation}));
}

TEST(Step, DwellViolationFiresOnce) {
  const GeoPoint c(0, 0);
  FenceSet fs({fence("F", c, 50, DurationConstraint{60, 600})});
  FenceMachine m{"u1", FenceMachine::Outside{}, {}};
  std::vector<FenceEvent> all;
  for (long t = 0; t <= 1200; t += 60) {
    auto r = step(m, fs, fix_at(c, t));
    m = r.machine;
    all.insert(all.end(), r.events.begin(), r.events.end());
  }
  EXPECT_EQ(kinds(all),
            (std::vector<Kind>{Kind::Entered, Kind::DwellConfirmed, Kind::DwellViolation}));
  EXPECT_EQ(all[2].at, kT0 + seconds{660});
}

TEST(Step, GapClosesVisitAtLastFix) {
  const GeoPoint c(0, 0);
  FenceSet fs({fence("F", c, 50)});
  FenceMachine m{"u1", FenceMachine::Outside{}, {}};
  m = step(m, fs, fix_at(c, 0)).machine;
  m = step(m, fs, fix_at(c, 60)).machine;
  auto r = step(m, fs, fix_at(c, 60 + 1801));
  ASSERT_EQ(kinds(r.events), (std::vector<Kind>{Kind::Exited, Kind::Entered}));
  EXPECT_EQ(r.events[0].at, kT0 + seconds{60});
  EXPECT_EQ(r.events[1].at, kT0 + seconds{1861});
}

TEST(Step, Errors) {
  const GeoPoint c(0, 0);
  FenceSet fs({fence("F", c, 50)});
  FenceMachine m{"u1", FenceMachine::Outside{}, {}};
  m = step(m, fs, fix_at(c, 100)).machine;
  try {
    step(m, fs, fix_at(c, 99));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrderFix);
  }
  FenceSet overlapping({fence("A", c, 50), fence("B", GeoPoint(0, 0.0001), 50)});
  try {
    step(FenceMachine{"u1", FenceMachine::Outside{}, {}}, overlapping, fix_at(c, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousFences);
  }
  EXPECT_NO_THROW(step(m, fs, fix_at(c, 100)));
}

TEST(ActiveFences, KindAndOwnershipFilter) {
  UserProfile u;
  u.user_id = "u1";
  u.addiction_kinds = {Substance::Alcohol};
  auto a = fence("A", {0, 0}, 10, {}, FenceKind::AlcoholSpot);
  auto t = fence("T", {1, 0}, 10, {}, FenceKind::TobaccoSpot);
  auto mine = fence("M", {2, 0}, 10, {}, FenceKind::Custom);
  mine.owner = "u1";
  auto theirs = fence("X", {3, 0}, 10, {}, FenceKind::AlcoholSpot);
  theirs.owner = "u2";
  const auto active = active_fences_for(u, {a, t, mine, theirs});
  std::vector<std::string> ids;
  for (const auto& f : active) ids.push_back(f.fence_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"A", "M"}));
}

TEST(Replay, MatchesOracleOnRandomWalks) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Geofence> fences;
    std::vector<TransitionRule> rules;
    for (int i = 0; i < 3; ++i) {
      const double lmin = static_cast<double>(rng() % 900);
      fences.push_back(fence("F" + std::to_string(i), GeoPoint(40.0, -74.0 + 0.01 * i), 200,
                             DurationConstraint{lmin, lmin + 60 + static_cast<double>(rng() % 1800)}));
    }
    rules.push_back({"F0", "F1", {120, 900, ConstraintScope::Transition}});
    FenceSet fs(fences, rules);
    std::vector<LocationFix> fixes;
    long t = 0;
    for (int k = 0; k < 300; ++k) {
      t += 30 + static_cast<long>(rng() % 240);
      if (rng() % 50 == 0) t += 2400;
      const int where = static_cast<int>(rng() % 5);
      const GeoPoint p = where < 3 ? GeoPoint(40.0, -74.0 + 0.01 * where)
                                   : GeoPoint(40.0 + 0.005 * where, -74.0);
      fixes.push_back(fix_at(p, t));
    }
    EXPECT_EQ(replay("u1", fs, fixes), sim::oracle_fence_events("u1", fixes, fs)) << trial;
  }
}

}  // namespace
}  // namespace addictfree::geo

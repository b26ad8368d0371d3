#include <gtest/gtest.h>

#include <random>

#include "addictfree/core/error.hpp"
#include "addictfree/stats/stats.hpp"

using namespace addictfree;
using namespace addictfree::stats;
using std::chrono::day;
using std::chrono::month;
using std::chrono::year;

namespace {

ConsumptionEvent ev(Substance s, double q, const std::string& at) {
  static int n = 0;
  ConsumptionEvent e;
  e.event_id = "e" + std::to_string(++n);
  e.user_id = "u";
  e.substance = s;
  e.quantity = q;
  e.at = parse_timestamp(at);
  return e;
}

Date ymd(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

std::vector<ConsumptionEvent> random_stream(std::mt19937_64& rng, Timestamp from, int days) {
  std::vector<ConsumptionEvent> out;
  const int n = static_cast<int>(rng() % 200);
  for (int i = 0; i < n; ++i) {
    ConsumptionEvent e;
    e.event_id = "r" + std::to_string(i);
    e.user_id = "u";
    e.substance = rng() % 2 ? Substance::Alcohol : Substance::Tobacco;
    e.quantity = e.substance == Substance::Alcohol ? static_cast<double>(rng() % 400) / 10.0
                                                   : static_cast<double>(rng() % 20);
    e.at = from + std::chrono::seconds{static_cast<long>(rng() % (days * 86400L))};
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(DailySummary, Empty) {
  const auto s = daily_summary({}, ymd(2024, 3, 1));
  EXPECT_EQ(s, (DailySummary{ymd(2024, 3, 1), 0, 0.0, 0, 0.0}));
}

TEST(DailySummary, SumsOneDate) {
  const std::vector<ConsumptionEvent> events{
      ev(Substance::Alcohol, 12, "2024-03-01T10:00:00Z"),
      ev(Substance::Alcohol, 4, "2024-03-01T20:00:00Z"),
      ev(Substance::Tobacco, 3, "2024-03-01T21:00:00Z"),
      ev(Substance::Alcohol, 8, "2024-03-02T01:00:00Z"),
  };
  const auto s = daily_summary(events, ymd(2024, 3, 1));
  EXPECT_EQ(s.alcohol_times, 2);
  EXPECT_EQ(s.alcohol_oz, 16.0);
  EXPECT_EQ(s.tobacco_times, 1);
  EXPECT_EQ(s.cigarettes, 3.0);
}

TEST(DailySummary, LocalDateAtPlusTwo) {
  // 23:30 local on 1 March at +02:00 is 21:30 UTC the same day; 00:30 local on
  // 2 March is 22:30 UTC on 1 March.
  const std::vector<ConsumptionEvent> events{ev(Substance::Tobacco, 1, "2024-03-01T21:30:00Z"),
                                             ev(Substance::Tobacco, 2, "2024-03-01T22:30:00Z")};
  EXPECT_EQ(daily_summary(events, ymd(2024, 3, 1), 120).cigarettes, 1.0);
  EXPECT_EQ(daily_summary(events, ymd(2024, 3, 2), 120).cigarettes, 2.0);
  EXPECT_EQ(daily_summary(events, ymd(2024, 3, 1), 0).cigarettes, 3.0);
}

TEST(Scores, SubstanceAnchors) {
  EXPECT_EQ(substance_score(0.0, 6.0), 10.0);
  EXPECT_EQ(substance_score(6.0, 6.0), 1.0);
  EXPECT_EQ(substance_score(60.0, 6.0), 1.0);
  EXPECT_DOUBLE_EQ(substance_score(3.0, 6.0), 5.5);
  // The baseline never drops below one unit.
  EXPECT_DOUBLE_EQ(substance_score(0.5, 0.1), 5.5);
}

TEST(Scores, Fitness) {
  DailyFeedback fb;
  fb.stress_level = 3;
  EXPECT_EQ(fitness_score(nullptr), 1.0);
  EXPECT_EQ(fitness_score(&fb), 5.5);
  fb.stress_level = 2;
  EXPECT_EQ(fitness_score(&fb), 10.0);
}

TEST(Baseline, MeanOverFirstFourteenDays) {
  std::vector<ConsumptionEvent> events;
  // 28 oz in the first fortnight, plus a later binge that must be ignored.
  events.push_back(ev(Substance::Alcohol, 20, "2024-01-01T18:00:00Z"));
  events.push_back(ev(Substance::Alcohol, 8, "2024-01-14T18:00:00Z"));
  events.push_back(ev(Substance::Alcohol, 100, "2024-01-15T18:00:00Z"));
  events.push_back(ev(Substance::Tobacco, 7, "2024-01-03T18:00:00Z"));
  const auto b = personal_baseline(events);
  EXPECT_DOUBLE_EQ(b.alcohol_oz, 2.0);
  EXPECT_DOUBLE_EQ(b.cigarettes, 1.0);  // floor
}

TEST(Weekly, CleanWeekScoresTen) {
  std::vector<ConsumptionEvent> events{ev(Substance::Alcohol, 30, "2024-01-01T18:00:00Z")};
  const auto w = weekly_scores(events, {}, ymd(2024, 2, 5));
  for (const auto& d : w.days) {
    EXPECT_EQ(d.alcohol_score, 10.0);
    EXPECT_EQ(d.smoking_score, 10.0);
    EXPECT_EQ(d.fitness_score, 1.0);
  }
  EXPECT_EQ(w.days[6].date, ymd(2024, 2, 11));
}

TEST(Weekly, HalfBaselineScoresFiveAndAHalf) {
  // Baseline: 28 cigarettes over the first 14 days = 2 per day.
  std::vector<ConsumptionEvent> events{ev(Substance::Tobacco, 28, "2024-01-01T08:00:00Z"),
                                       ev(Substance::Tobacco, 1, "2024-01-17T08:00:00Z"),
                                       ev(Substance::Tobacco, 2, "2024-01-18T08:00:00Z")};
  DailyFeedback fb;
  fb.user_id = "u";
  fb.date = ymd(2024, 1, 16);
  fb.stress_level = 1;
  const auto w = weekly_scores(events, {fb}, ymd(2024, 1, 15));
  EXPECT_EQ(w.days[0].smoking_score, 10.0);
  EXPECT_EQ(w.days[1].fitness_score, 10.0);
  EXPECT_DOUBLE_EQ(w.days[2].smoking_score, 5.5);
  EXPECT_EQ(w.days[3].smoking_score, 1.0);
}

TEST(Weekly, MustStartOnMonday) {
  EXPECT_THROW(weekly_scores({}, {}, ymd(2024, 2, 6)), Error);
}

TEST(Weekly, AddingAnEventOnlyTouchesItsDay) {
  std::mt19937_64 rng(4);
  auto events = random_stream(rng, parse_timestamp("2024-01-01T00:00:00Z"), 40);
  // Keep the baseline fixed: the added event falls after the first 14 days.
  events.push_back(ev(Substance::Alcohol, 1, "2024-01-01T00:00:00Z"));
  const auto before = weekly_scores(events, {}, ymd(2024, 1, 29));
  events.push_back(ev(Substance::Alcohol, 3, "2024-01-31T12:00:00Z"));
  const auto after = weekly_scores(events, {}, ymd(2024, 1, 29));
  for (int d = 0; d < 7; ++d) {
    if (d == 2) continue;
    EXPECT_EQ(before.days[d].alcohol_score, after.days[d].alcohol_score) << d;
  }
}

TEST(Monthly, EmptyMonthHasOneRowPerDay) {
  EXPECT_EQ(monthly_series({}, Month{year{2024}, month{2}}).days.size(), 29u);
  EXPECT_EQ(monthly_series({}, Month{year{2023}, month{2}}).days.size(), 28u);
  EXPECT_EQ(monthly_series({}, Month{year{2024}, month{4}}).days.size(), 30u);
  const auto s = monthly_series({}, Month{year{2024}, month{1}});
  ASSERT_EQ(s.days.size(), 31u);
  EXPECT_EQ(s.days[30].date, ymd(2024, 1, 31));
  EXPECT_EQ(s.totals().alcohol_times, 0);
}

TEST(Monthly, SingleEventOneNonzeroRow) {
  const auto s = monthly_series({ev(Substance::Tobacco, 4, "2024-05-09T12:00:00Z")},
                                Month{year{2024}, month{5}});
  int nonzero = 0;
  for (const auto& d : s.days) nonzero += d.tobacco_times > 0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(s.days[8].cigarettes, 4.0);
}

TEST(Monthly, TotalsMatchDailySummaries) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int offset = static_cast<int>(rng() % 1441) - 720;
    const auto events = random_stream(rng, parse_timestamp("2024-02-25T00:00:00Z"), 40);
    const Month m{year{2024}, month{3}};
    const auto series = monthly_series(events, m, offset);
    DailySummary sum;
    for (unsigned d = 1; d <= 31; ++d) {
      const auto s = daily_summary(events, ymd(2024, 3, d), offset);
      EXPECT_EQ(s, series.days[d - 1]);
      sum.alcohol_times += s.alcohol_times;
      sum.alcohol_oz += s.alcohol_oz;
      sum.tobacco_times += s.tobacco_times;
      sum.cigarettes += s.cigarettes;
    }
    const auto t = series.totals();
    EXPECT_EQ(t.alcohol_times, sum.alcohol_times);
    EXPECT_DOUBLE_EQ(t.alcohol_oz, sum.alcohol_oz);
    EXPECT_EQ(t.tobacco_times, sum.tobacco_times);
    EXPECT_DOUBLE_EQ(t.cigarettes, sum.cigarettes);
  }
}

TEST(Monthly, Csv) {
  const auto s = monthly_series({ev(Substance::Alcohol, 12.5, "2024-02-01T12:00:00Z")},
                                Month{year{2024}, month{2}});
  const auto csv = monthly_csv(s);
  EXPECT_EQ(csv.rfind("date,substance,times,quantity\n", 0), 0u);
  EXPECT_NE(csv.find("2024-02-01,alcohol,1,12.5\n"), std::string::npos);
  EXPECT_NE(csv.find("2024-02-01,tobacco,0,0\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 29);
}

TEST(Scores, BoundsOnRandomStreams) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto events = random_stream(rng, parse_timestamp("2024-01-01T00:00:00Z"), 35);
    std::vector<DailyFeedback> fb;
    for (unsigned d = 1; d <= 31; d += 2) {
      DailyFeedback f;
      f.user_id = "u";
      f.date = ymd(2024, 1, d);
      f.stress_level = 1 + static_cast<int>(rng() % 5);
      fb.push_back(f);
    }
    const auto w = weekly_scores(events, fb, ymd(2024, 1, 22));
    const auto again = weekly_scores(events, fb, ymd(2024, 1, 22));
    for (int d = 0; d < 7; ++d) {
      for (double v : {w.days[d].alcohol_score, w.days[d].smoking_score, w.days[d].fitness_score}) {
        EXPECT_GE(v, 1.0);
        EXPECT_LE(v, 10.0);
      }
      EXPECT_EQ(w.days[d].alcohol_score, again.days[d].alcohol_score);
    }
  }
}

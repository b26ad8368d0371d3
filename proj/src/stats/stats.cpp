#include "addictfree/stats/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "addictfree/core/error.hpp"

namespace addictfree::stats {

using std::chrono::days;
using std::chrono::sys_days;

namespace {

void add(DailySummary& s, const ConsumptionEvent& e) {
  if (e.substance == Substance::Alcohol) {
    ++s.alcohol_times;
    s.alcohol_oz += e.quantity;
  } else {
    ++s.tobacco_times;
    s.cigarettes += e.quantity;
  }
}

std::map<sys_days, DailySummary> bucket(const std::vector<ConsumptionEvent>& events,
                                        sys_days from, sys_days to, int offset) {
  std::map<sys_days, DailySummary> out;
  for (const auto& e : events) {
    const sys_days d{local_date(e.at, offset)};
    if (d < from || d >= to) continue;
    auto& s = out[d];
    s.date = Date{d};
    add(s, e);
  }
  return out;
}

}  // namespace

DailySummary daily_summary(const std::vector<ConsumptionEvent>& events, Date date,
                           int utc_offset_minutes) {
  DailySummary s;
  s.date = date;
  for (const auto& e : events) {
    if (local_date(e.at, utc_offset_minutes) == date) add(s, e);
  }
  return s;
}

Baseline personal_baseline(const std::vector<ConsumptionEvent>& events, int utc_offset_minutes) {
  Baseline b;
  if (events.empty()) return b;
  auto first = std::min_element(events.begin(), events.end(),
                                [](const auto& a, const auto& c) { return a.at < c.at; });
  const sys_days start{local_date(first->at, utc_offset_minutes)};
  double oz = 0.0;
  double cigs = 0.0;
  for (const auto& [day, s] : bucket(events, start, start + days{kBaselineDays}, utc_offset_minutes)) {
    oz += s.alcohol_oz;
    cigs += s.cigarettes;
  }
  b.alcohol_oz = std::max(1.0, oz / kBaselineDays);
  b.cigarettes = std::max(1.0, cigs / kBaselineDays);
  return b;
}

double substance_score(double consumption, double baseline) {
  const double ratio = std::min(1.0, std::max(0.0, consumption) / std::max(1.0, baseline));
  return std::clamp(10.0 - 9.0 * ratio, 1.0, 10.0);
}

double fitness_score(const DailyFeedback* feedback) {
  double score = 1.0;
  if (feedback) {
    score += 9.0 * 0.5;
    if (feedback->stress_level <= 2) score += 4.5;
  }
  return std::clamp(score, 1.0, 10.0);
}

WeeklyScores weekly_scores(const std::vector<ConsumptionEvent>& events,
                           const std::vector<DailyFeedback>& feedback, Date week_start,
                           int utc_offset_minutes) {
  if (!week_start.ok() || iso_weekday_index(week_start) != 0) {
    throw Error(ErrorCode::InvalidArgument, "week_start must be a Monday");
  }
  const Baseline baseline = personal_baseline(events, utc_offset_minutes);
  const sys_days start{week_start};
  const auto buckets = bucket(events, start, start + days{7}, utc_offset_minutes);

  WeeklyScores w;
  w.week_start = week_start;
  for (int i = 0; i < 7; ++i) {
    const sys_days d = start + days{i};
    DailySummary s;
    if (auto it = buckets.find(d); it != buckets.end()) s = it->second;
    const DailyFeedback* fb = nullptr;
    for (const auto& f : feedback) {
      if (sys_days{f.date} == d) fb = &f;
    }
    auto& day = w.days[static_cast<std::size_t>(i)];
    day.date = Date{d};
    day.alcohol_score = substance_score(s.alcohol_oz, baseline.alcohol_oz);
    day.smoking_score = substance_score(s.cigarettes, baseline.cigarettes);
    day.fitness_score = fitness_score(fb);
  }
  return w;
}

DailySummary MonthlySeries::totals() const {
  DailySummary t;
  for (const auto& d : days) {
    t.alcohol_times += d.alcohol_times;
    t.alcohol_oz += d.alcohol_oz;
    t.tobacco_times += d.tobacco_times;
    t.cigarettes += d.cigarettes;
  }
  return t;
}

MonthlySeries monthly_series(const std::vector<ConsumptionEvent>& events, Month month,
                             int utc_offset_minutes) {
  MonthlySeries out;
  out.month = month;
  const sys_days first{month / std::chrono::day{1}};
  const int n = days_in_month(month);
  const auto buckets = bucket(events, first, first + days{n}, utc_offset_minutes);
  out.days.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const sys_days d = first + days{i};
    if (auto it = buckets.find(d); it != buckets.end()) {
      out.days.push_back(it->second);
    } else {
      DailySummary s;
      s.date = Date{d};
      out.days.push_back(s);
    }
  }
  return out;
}

std::string monthly_csv(const MonthlySeries& series) {
  std::string out = "date,substance,times,quantity\n";
  char buf[128];
  for (const auto& d : series.days) {
    const std::string date = format_date(d.date);
    std::snprintf(buf, sizeof buf, "%s,alcohol,%d,%.17g\n", date.c_str(), d.alcohol_times,
                  d.alcohol_oz);
    out += buf;
    std::snprintf(buf, sizeof buf, "%s,tobacco,%d,%.17g\n", date.c_str(), d.tobacco_times,
                  d.cigarettes);
    out += buf;
  }
  return out;
}

}  // namespace addictfree::stats

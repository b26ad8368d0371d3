#pragma once

#include <array>
#include <string>
#include <vector>

#include "addictfree/core/types.hpp"

namespace addictfree::stats {

struct DailySummary {
  Date date{};
  int alcohol_times = 0;
  double alcohol_oz = 0.0;
  int tobacco_times = 0;
  double cigarettes = 0.0;

  friend bool operator==(const DailySummary&, const DailySummary&) = default;
};

/// Events bucketed by their local date at the given UTC offset.
DailySummary daily_summary(const std::vector<ConsumptionEvent>& events, Date date,
                           int utc_offset_minutes = 0);

/// Mean daily quantity per substance over the 14 local days starting at the
/// first logged event, floored at one unit.
struct Baseline {
  double alcohol_oz = 1.0;
  double cigarettes = 1.0;
};

inline constexpr int kBaselineDays = 14;

Baseline personal_baseline(const std::vector<ConsumptionEvent>& events,
                           int utc_offset_minutes = 0);

/// 10 for a clean day, falling linearly to 1 at the personal baseline.
double substance_score(double consumption, double baseline);

/// 1 without feedback, 5.5 with feedback, 10 with feedback reporting
/// stress <= 2.
double fitness_score(const DailyFeedback* feedback);

struct DayScores {
  Date date{};
  double alcohol_score = 10.0;
  double smoking_score = 10.0;
  double fitness_score = 1.0;
};

struct WeeklyScores {
  Date week_start{};
  std::array<DayScores, 7> days{};
};

/// Throws Error{InvalidArgument} unless week_start is a Monday.
WeeklyScores weekly_scores(const std::vector<ConsumptionEvent>& events,
                           const std::vector<DailyFeedback>& feedback, Date week_start,
                           int utc_offset_minutes = 0);

struct MonthlySeries {
  Month month{};
  std::vector<DailySummary> days;  // one per calendar day

  DailySummary totals() const;
};

MonthlySeries monthly_series(const std::vector<ConsumptionEvent>& events, Month month,
                             int utc_offset_minutes = 0);

/// Header "date,substance,times,quantity", two rows per day.
std::string monthly_csv(const MonthlySeries& series);

}  // namespace addictfree::stats

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "addictfree/core/time.hpp"

namespace addictfree {

using UserId = std::string;
using EventId = std::string;
using FenceId = std::string;

enum class Substance { Alcohol, Tobacco };

enum class RecoveryStage { ActiveUse, EarlyRecovery, SustainedRecovery, Recovered, Therapist };

enum class InterestTheme { Food, Fitness, Shopping, Entertainment, Other };

enum class EventSource { Manual, SurveyBackfill };

/// WGS84 degrees; ranges are checked on construction.
class GeoPoint {
 public:
  GeoPoint() = default;
  GeoPoint(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

struct InterestTag {
  InterestTheme theme = InterestTheme::Other;
  std::string subcategory;

  friend bool operator==(const InterestTag&, const InterestTag&) = default;
};

struct UserProfile {
  UserId user_id;
  std::string display_name;
  std::set<Substance> addiction_kinds;
  RecoveryStage recovery_stage = RecoveryStage::ActiveUse;
  std::vector<InterestTag> interests;
  std::optional<GeoPoint> home_region;
  Timestamp created_at{};
  // Fixed offset used for daily bucketing and local schedules.
  int utc_offset_minutes = 0;

  bool is_therapist() const { return recovery_stage == RecoveryStage::Therapist; }
};

struct ConsumptionEvent {
  EventId event_id;
  UserId user_id;
  Substance substance = Substance::Alcohol;
  double quantity = 0.0;  // fluid ounces or cigarette count
  Timestamp at{};
  std::optional<GeoPoint> location;
  EventSource source = EventSource::Manual;

  friend bool operator==(const ConsumptionEvent&, const ConsumptionEvent&) = default;
};

struct LocationFix {
  UserId user_id;
  GeoPoint point;
  Timestamp at{};
  std::optional<double> accuracy_m;

  friend bool operator==(const LocationFix&, const LocationFix&) = default;
};

struct DailyFeedback {
  UserId user_id;
  Date date{};
  int stress_level = 3;  // 1..5
  bool consumed_unlogged = false;
  std::vector<ConsumptionEvent> backfill_events;
  std::string notes;

  friend bool operator==(const DailyFeedback&, const DailyFeedback&) = default;
};

// Enum <-> wire-name helpers; parsers throw Error{InvalidArgument}.
std::string_view to_string(Substance s);
std::string_view to_string(RecoveryStage s);
std::string_view to_string(InterestTheme t);
std::string_view to_string(EventSource s);
Substance parse_substance(std::string_view text);
RecoveryStage parse_recovery_stage(std::string_view text);
InterestTheme parse_interest_theme(std::string_view text);
EventSource parse_event_source(std::string_view text);

}  // namespace addictfree

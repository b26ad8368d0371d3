#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "addictfree/core/types.hpp"
#include "addictfree/geo/fence_machine.hpp"

namespace addictfree::sim {

/// Pass-through stop on the daily route.
struct Waypoint {
  GeoPoint point;
  double speed_mps = 1.4;  // speed of the leg arriving here
  double dwell_s = 0.0;
};

/// Optional stop visited after the commute with the given probability.
struct FavoriteSpot {
  GeoPoint point;
  double dwell_min_s = 600.0;
  double dwell_max_s = 1800.0;
  double visit_probability = 1.0;
};

struct UserBehavior {
  UserId user_id;
  Substance substance = Substance::Alcohol;
  double quantity_per_event = 1.0;
  std::map<int, double> relapse_hours;  // UTC hour of day -> probability per day

  GeoPoint home;
  int depart_minute = 8 * 60;  // minutes after UTC midnight
  std::vector<Waypoint> commute;
  std::vector<FavoriteSpot> favorite_spots;
  double travel_speed_mps = 1.4;  // legs to favorite spots and back home

  double fix_dropout = 0.0;          // chance of losing an individual fix
  double outage_probability = 0.0;   // chance per day of a 30-120 min outage
  double feedback_probability = 0.0; // chance per day of a feedback survey
};

struct Scenario {
  std::uint64_t seed = 0;
  int days = 0;
  Timestamp start = from_epoch(1'704'067'200);  // 2024-01-01T00:00:00Z
  std::vector<UserBehavior> users;
  std::vector<geo::Geofence> fences;
  std::vector<geo::TransitionRule> transitions;
};

inline constexpr Seconds kFixInterval{60};

struct GeneratedData {
  std::vector<ConsumptionEvent> events;  // per user, time ordered; users in scenario order
  std::vector<LocationFix> fixes;        // per user, time ordered
  std::vector<DailyFeedback> feedback;
};

/// Throws Error{InvalidArgument} on probabilities outside [0,1] or
/// non-positive speeds.
void validate_scenario(const Scenario& s);

/// Deterministic in the seed: fixes every 60 s along a piecewise linear daily
/// route, events at the configured relapse hours located on the route.
GeneratedData generate(const Scenario& s);

/// Reference fence events computed from inside-intervals over the whole fix
/// sequence, independent of the incremental machine.
std::vector<geo::FenceEvent> oracle_fence_events(const UserId& user,
                                                 const std::vector<LocationFix>& fixes,
                                                 const geo::FenceSet& fences,
                                                 const geo::MachineOptions& options = {});

/// Exact ROC AUC by pairwise comparison; ties count one half. Labels >= 0.5
/// are positive. Throws Error{DegenerateLabels} without both classes.
double oracle_auc(const std::vector<double>& predictions, const std::vector<double>& labels);

}  // namespace addictfree::sim

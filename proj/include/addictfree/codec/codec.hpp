#pragma once

// JSON mapping of the domain types. Timestamps are written as
// "YYYY-MM-DDTHH:MM:SSZ" and read from that form, any ISO offset, or integer
// epoch seconds. Malformed documents throw Error{InvalidArgument}.

#include "json.hpp"

#include "addictfree/core/error.hpp"

#include "addictfree/core/types.hpp"
#include "addictfree/diversion/diversion.hpp"
#include "addictfree/geo/fence_machine.hpp"
#include "addictfree/geo/geofence.hpp"
#include "addictfree/predictor/features.hpp"
#include "addictfree/predictor/training.hpp"
#include "addictfree/sim/simulator.hpp"
#include "addictfree/stats/stats.hpp"

namespace addictfree {

using Json = nlohmann::json;

Json time_to_json(Timestamp t);
Timestamp time_from_json(const Json& j);

/// Parses text, mapping syntax errors to Error{InvalidArgument}.
Json parse_json(std::string_view text);

void to_json(Json& j, const GeoPoint& p);
void from_json(const Json& j, GeoPoint& p);
void to_json(Json& j, const InterestTag& t);
void from_json(const Json& j, InterestTag& t);
void to_json(Json& j, const UserProfile& u);
void from_json(const Json& j, UserProfile& u);
void to_json(Json& j, const ConsumptionEvent& e);
void from_json(const Json& j, ConsumptionEvent& e);
void to_json(Json& j, const LocationFix& f);
void from_json(const Json& j, LocationFix& f);
void to_json(Json& j, const DailyFeedback& f);
void from_json(const Json& j, DailyFeedback& f);

namespace geo {
void to_json(Json& j, const DurationConstraint& c);
void from_json(const Json& j, DurationConstraint& c);
void to_json(Json& j, const Geofence& f);
void from_json(const Json& j, Geofence& f);
void to_json(Json& j, const TransitionRule& r);
void from_json(const Json& j, TransitionRule& r);
void to_json(Json& j, const FenceEvent& e);
void from_json(const Json& j, FenceEvent& e);
void to_json(Json& j, const FenceMachine& m);
void from_json(const Json& j, FenceMachine& m);
}  // namespace geo

namespace diversion {
void to_json(Json& j, const PointOfInterest& p);
void from_json(const Json& j, PointOfInterest& p);
void to_json(Json& j, const Notification& n);
void from_json(const Json& j, Notification& n);
}  // namespace diversion

namespace stats {
void to_json(Json& j, const DailySummary& s);
void to_json(Json& j, const WeeklyScores& w);
void to_json(Json& j, const MonthlySeries& m);
}  // namespace stats

namespace predictor {
void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);
void to_json(Json& j, const Forecast& f);
}  // namespace predictor

namespace sim {
void to_json(Json& j, const Scenario& s);
void from_json(const Json& j, Scenario& s);
}  // namespace sim

/// Decodes `j` as T, rethrowing nlohmann errors as Error{InvalidArgument}.
template <typename T>
T decode(const Json& j) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
}

}  // namespace addictfree

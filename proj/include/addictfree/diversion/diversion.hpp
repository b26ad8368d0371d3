#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "addictfree/core/types.hpp"
#include "addictfree/geo/fence_machine.hpp"
#include "addictfree/predictor/features.hpp"

namespace addictfree::diversion {

struct PointOfInterest {
  std::string poi_id;
  std::string name;
  GeoPoint location;
  InterestTheme theme = InterestTheme::Other;
  bool open = true;

  friend bool operator==(const PointOfInterest&, const PointOfInterest&) = default;
};

enum class NotificationKind {
  FenceEntryDiversion,
  PreRelapseDiversion,
  DwellViolation,
  Motivational,
  FeedbackRequest,
};

std::string_view to_string(NotificationKind k);
NotificationKind parse_notification_kind(std::string_view text);

/// Why a notification exists: the fence that triggered it, or the predicted
/// peak it anticipates.
struct NotificationReason {
  std::optional<FenceId> fence_id;
  std::optional<Timestamp> peak_hour;
  std::optional<double> probability;

  friend bool operator==(const NotificationReason&, const NotificationReason&) = default;
};

struct Notification {
  std::string notif_id;
  UserId user_id;
  NotificationKind kind = NotificationKind::Motivational;
  std::string body;
  std::optional<PointOfInterest> recommendation;
  std::vector<std::string> suggestions;
  Timestamp scheduled_for{};
  std::optional<Timestamp> delivered_at;
  std::optional<Timestamp> expires_at;
  NotificationReason reason;

  friend bool operator==(const Notification&, const Notification&) = default;
};

inline constexpr double kDiversionRadiusM = 2000.0;
inline constexpr Seconds kEntryRateLimit{3600};
inline constexpr Seconds kPreRelapseLead{600};
inline constexpr Seconds kSuggestionValidity{3600};
inline constexpr int kFeedbackLocalHour = 21;
inline constexpr double kDefaultThreshold = 0.5;

/// Rows "poi_id,name,lat,lon,theme,open" with a header line; `open` is
/// true/false or 1/0. Throws Error{InvalidArgument} naming the bad line.
std::vector<PointOfInterest> parse_poi_csv(std::string_view text);

/// Nearest open POI within kDiversionRadiusM whose theme matches one of the
/// user's interests; equal distances resolve to the smaller poi_id.
std::optional<PointOfInterest> recommend_diversion(const UserProfile& user, const GeoPoint& at,
                                                   const std::vector<PointOfInterest>& pois);

/// Short activity prompts derived from the user's interests.
std::vector<std::string> suggested_activities(const UserProfile& user);

/// Pre-relapse diversion ten minutes before the most likely hour (earliest on
/// ties), or nothing when the peak is below `threshold` or the notification
/// would land before `now`.
std::optional<Notification> schedule_prerelapse(
    const std::vector<predictor::HourlyProbability>& predictions, double threshold,
    const UserProfile& user, Timestamp now);

/// Stateful part of diversion: per (user, fence) rate limiting and one
/// feedback request / motivational quote per user per local day.
class DiversionPlanner {
 public:
  std::optional<Notification> on_fence_event(const geo::FenceEvent& event,
                                             const geo::Geofence& fence,
                                             const UserProfile& user,
                                             const std::vector<PointOfInterest>& pois,
                                             Timestamp now);

  /// Scheduled at 21:00 user-local on `local_day`; repeated calls for the
  /// same day return the first notification.
  Notification daily_feedback_request(const UserProfile& user, Date local_day);

  Notification motivational(const UserProfile& user, Date local_day);

 private:
  std::mutex mu_;
  std::map<std::pair<UserId, FenceId>, Timestamp> last_entry_;
  std::map<std::pair<UserId, std::string>, Notification> daily_;
};

}  // namespace addictfree::diversion

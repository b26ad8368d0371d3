#include "addictfree/diversion/diversion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "addictfree/core/error.hpp"
#include "addictfree/geo/geofence.hpp"

namespace addictfree::diversion {

namespace {

constexpr std::array<std::string_view, 5> kKindNames = {
    "fence-entry-diversion", "pre-relapse-diversion", "dwell-violation", "motivational",
    "feedback-request"};

constexpr std::array<std::string_view, 8> kQuotes = {
    "One hour at a time is still progress.",
    "Cravings peak and pass. Give this one fifteen minutes.",
    "You have made it through hard days before.",
    "Small steps count. Log today, rest tonight.",
    "Call someone you trust when the urge shows up.",
    "A walk around the block changes more than you expect.",
    "Every clean day makes the next one easier.",
    "Be as patient with yourself as you would be with a friend.",
};

bool wants(const UserProfile& user, InterestTheme theme) {
  return std::any_of(user.interests.begin(), user.interests.end(),
                     [&](const InterestTag& t) { return t.theme == theme; });
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string activity_for(const InterestTag& tag) {
  if (!tag.subcategory.empty()) return "Spend some time on " + tag.subcategory;
  switch (tag.theme) {
    case InterestTheme::Food: return "Grab a snack or a coffee somewhere new";
    case InterestTheme::Fitness: return "Go for a 15 minute walk or workout";
    case InterestTheme::Shopping: return "Browse a shop you like";
    case InterestTheme::Entertainment: return "Put on a show or a game";
    case InterestTheme::Other: break;
  }
  return "Do something you enjoy for a few minutes";
}

std::string hhmm(Timestamp t, int offset) {
  const auto local = t + std::chrono::minutes{offset};
  const auto secs = to_epoch(local);
  const auto day_secs = ((secs % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(day_secs / 3600),
                static_cast<int>(day_secs % 3600 / 60));
  return buf;
}

}  // namespace

std::string_view to_string(NotificationKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

NotificationKind parse_notification_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<NotificationKind>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown notification kind: " + std::string(text));
}

std::vector<PointOfInterest> parse_poi_csv(std::string_view text) {
  std::vector<PointOfInterest> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (lineno == 1 && trim(line).rfind("poi_id", 0) == 0) continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      cols.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    const auto bad = [&](const std::string& why) {
      return Error(ErrorCode::InvalidArgument,
                   "poi csv line " + std::to_string(lineno) + ": " + why);
    };
    if (cols.size() != 6) throw bad("expected 6 columns");
    if (cols[0].empty()) throw bad("empty poi_id");
    PointOfInterest p;
    p.poi_id = cols[0];
    p.name = cols[1];
    try {
      std::size_t used = 0;
      const double lat = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw bad("bad lat");
      const double lon = std::stod(cols[3], &used);
      if (used != cols[3].size()) throw bad("bad lon");
      p.location = GeoPoint(lat, lon);
    } catch (const std::logic_error&) {
      throw bad("bad coordinates");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidGeoPoint) throw bad("coordinates out of range");
      throw;
    }
    try {
      p.theme = parse_interest_theme(cols[4]);
    } catch (const Error&) {
      throw bad("unknown theme " + cols[4]);
    }
    if (cols[5] == "true" || cols[5] == "1") {
      p.open = true;
    } else if (cols[5] == "false" || cols[5] == "0") {
      p.open = false;
    } else {
      throw bad("bad open flag " + cols[5]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::optional<PointOfInterest> recommend_diversion(const UserProfile& user, const GeoPoint& at,
                                                   const std::vector<PointOfInterest>& pois) {
  const PointOfInterest* best = nullptr;
  double best_d = 0.0;
  for (const auto& p : pois) {
    if (!p.open || !wants(user, p.theme)) continue;
    const double d = geo::haversine_m(at, p.location);
    if (d > kDiversionRadiusM) continue;
    if (!best || d < best_d || (d == best_d && p.poi_id < best->poi_id)) {
      best = &p;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::vector<std::string> suggested_activities(const UserProfile& user) {
  std::vector<std::string> out;
  for (const auto& tag : user.interests) {
    auto a = activity_for(tag);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
  }
  if (out.empty()) out.push_back("Step away for a few minutes and drink a glass of water");
  return out;
}

std::optional<Notification> schedule_prerelapse(
    const std::vector<predictor::HourlyProbability>& predictions, double threshold,
    const UserProfile& user, Timestamp now) {
  if (predictions.empty()) return std::nullopt;
  const predictor::HourlyProbability* peak = &predictions.front();
  for (const auto& h : predictions) {
    if (h.probability > peak->probability ||
        (h.probability == peak->probability && h.hour_start < peak->hour_start)) {
      peak = &h;
    }
  }
  if (!(peak->probability >= threshold)) return std::nullopt;
  const Timestamp when = peak->hour_start - kPreRelapseLead;
  if (when < now) return std::nullopt;

  Notification n;
  n.notif_id = "pre-relapse/" + user.user_id + "/" + std::to_string(to_epoch(peak->hour_start));
  n.user_id = user.user_id;
  n.kind = NotificationKind::PreRelapseDiversion;
  n.suggestions = suggested_activities(user);
  const int pct = static_cast<int>(std::lround(peak->probability * 100.0));
  n.body = "Cravings are likely around " + hhmm(peak->hour_start, user.utc_offset_minutes) +
           " (" + std::to_string(pct) + "%). Try this instead: " + n.suggestions.front() + ".";
  n.scheduled_for = when;
  n.expires_at = peak->hour_start + std::chrono::hours{1};
  n.reason.peak_hour = peak->hour_start;
  n.reason.probability = peak->probability;
  return n;
}

std::optional<Notification> DiversionPlanner::on_fence_event(
    const geo::FenceEvent& event, const geo::Geofence& fence, const UserProfile& user,
    const std::vector<PointOfInterest>& pois, Timestamp now) {
  const Timestamp when = std::max(event.at, now);
  const std::string stamp = std::to_string(to_epoch(event.at));
  if (event.kind == geo::FenceEventKind::Entered) {
    std::lock_guard lock(mu_);
    const auto key = std::make_pair(event.user_id, event.fence_id);
    if (auto it = last_entry_.find(key); it != last_entry_.end() &&
                                         event.at >= it->second &&
                                         event.at - it->second < kEntryRateLimit) {
      return std::nullopt;
    }
    last_entry_[key] = event.at;

    Notification n;
    n.notif_id = "fence-entry/" + event.user_id + "/" + event.fence_id + "/" + stamp;
    n.user_id = event.user_id;
    n.kind = NotificationKind::FenceEntryDiversion;
    n.recommendation = recommend_diversion(user, fence.center, pois);
    const std::string where = fence.label.empty() ? std::string("a risk zone") : fence.label;
    if (n.recommendation) {
      const double d = geo::haversine_m(fence.center, n.recommendation->location);
      n.body = "You are near " + where + ". " + n.recommendation->name + " is " +
               std::to_string(static_cast<long>(std::lround(d))) + " m away, why not go there?";
    } else {
      n.suggestions = suggested_activities(user);
      n.body = "You are near " + where + ". " + n.suggestions.front() + ".";
    }
    n.scheduled_for = when;
    n.expires_at = when + kSuggestionValidity;
    n.reason.fence_id = event.fence_id;
    return n;
  }
  if (event.kind == geo::FenceEventKind::DwellViolation) {
    Notification n;
    n.notif_id = "dwell-violation/" + event.user_id + "/" + event.fence_id + "/" + stamp;
    n.user_id = event.user_id;
    n.kind = NotificationKind::DwellViolation;
    n.suggestions = suggested_activities(user);
    const std::string where = fence.label.empty() ? std::string("this place") : fence.label;
    n.body = "You have been at " + where + " for a while. Time to head out? " +
             n.suggestions.front() + ".";
    n.scheduled_for = when;
    n.reason.fence_id = event.fence_id;
    return n;
  }
  return std::nullopt;
}

Notification DiversionPlanner::daily_feedback_request(const UserProfile& user, Date local_day) {
  std::lock_guard lock(mu_);
  const auto key = std::make_pair(user.user_id, "feedback/" + format_date(local_day));
  if (auto it = daily_.find(key); it != daily_.end()) return it->second;
  Notification n;
  n.notif_id = "feedback/" + user.user_id + "/" + format_date(local_day);
  n.user_id = user.user_id;
  n.kind = NotificationKind::FeedbackRequest;
  n.body = "How did today go? Take a minute to fill in your daily check-in.";
  n.scheduled_for = local_midnight(local_day, user.utc_offset_minutes) +
                    std::chrono::hours{kFeedbackLocalHour};
  daily_.emplace(key, n);
  return n;
}

Notification DiversionPlanner::motivational(const UserProfile& user, Date local_day) {
  std::lock_guard lock(mu_);
  const auto key = std::make_pair(user.user_id, "motivational/" + format_date(local_day));
  if (auto it = daily_.find(key); it != daily_.end()) return it->second;
  const auto day_index = std::chrono::sys_days{local_day}.time_since_epoch().count();
  const auto idx = static_cast<std::size_t>(((day_index % static_cast<long>(kQuotes.size())) +
                                             static_cast<long>(kQuotes.size())) %
                                            static_cast<long>(kQuotes.size()));
  Notification n;
  n.notif_id = "motivational/" + user.user_id + "/" + format_date(local_day);
  n.user_id = user.user_id;
  n.kind = NotificationKind::Motivational;
  n.body = std::string(kQuotes[idx]);
  n.scheduled_for = local_midnight(local_day, user.utc_offset_minutes) + std::chrono::hours{9};
  daily_.emplace(key, n);
  return n;
}

}  // namespace addictfree::diversion

#include "addictfree/codec/codec.hpp"

namespace addictfree {

namespace {

template <typename T>
std::optional<T> opt(const Json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
  return std::nullopt;
}

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
  return fallback;
}

std::optional<Timestamp> opt_time(const Json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return time_from_json(*it);
  return std::nullopt;
}

Json opt_json(const std::optional<Timestamp>& t) { return t ? time_to_json(*t) : Json(nullptr); }

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be an object");
}

int whole(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be an integer");
  }
  return v.get<int>();
}

}  // namespace

Json time_to_json(Timestamp t) { return format_timestamp(t); }

Timestamp time_from_json(const Json& j) {
  if (j.is_number_integer()) return from_epoch(j.get<std::int64_t>());
  if (j.is_string()) return parse_timestamp(j.get<std::string>());
  throw Error(ErrorCode::InvalidArgument, "timestamp must be an ISO string or epoch seconds");
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
}

void to_json(Json& j, const GeoPoint& p) { j = Json{{"lat", p.lat()}, {"lon", p.lon()}}; }

void from_json(const Json& j, GeoPoint& p) {
  require_object(j, "point");
  p = GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>());
}

void to_json(Json& j, const InterestTag& t) {
  j = Json{{"theme", to_string(t.theme)}, {"subcategory", t.subcategory}};
}

void from_json(const Json& j, InterestTag& t) {
  if (j.is_string()) {
    t = InterestTag{parse_interest_theme(j.get<std::string>()), {}};
    return;
  }
  t.theme = parse_interest_theme(j.at("theme").get<std::string>());
  t.subcategory = value_or<std::string>(j, "subcategory", "");
}

void to_json(Json& j, const UserProfile& u) {
  Json kinds = Json::array();
  for (auto s : u.addiction_kinds) kinds.push_back(to_string(s));
  j = Json{{"user_id", u.user_id},
           {"display_name", u.display_name},
           {"addiction_kinds", kinds},
           {"recovery_stage", to_string(u.recovery_stage)},
           {"interests", u.interests},
           {"home_region", u.home_region ? Json(*u.home_region) : Json(nullptr)},
           {"created_at", time_to_json(u.created_at)},
           {"utc_offset_minutes", u.utc_offset_minutes}};
}

void from_json(const Json& j, UserProfile& u) {
  require_object(j, "user");
  u.user_id = value_or<std::string>(j, "user_id", "");
  u.display_name = value_or<std::string>(j, "display_name", "");
  u.addiction_kinds.clear();
  if (auto it = j.find("addiction_kinds"); it != j.end()) {
    for (const auto& k : *it) u.addiction_kinds.insert(parse_substance(k.get<std::string>()));
  }
  u.recovery_stage = parse_recovery_stage(value_or<std::string>(j, "recovery_stage", "active-use"));
  u.interests = value_or<std::vector<InterestTag>>(j, "interests", {});
  u.home_region = opt<GeoPoint>(j, "home_region");
  u.created_at = opt_time(j, "created_at").value_or(Timestamp{});
  u.utc_offset_minutes = j.contains("utc_offset_minutes") ? whole(j, "utc_offset_minutes") : 0;
}

void to_json(Json& j, const ConsumptionEvent& e) {
  j = Json{{"event_id", e.event_id},
           {"user_id", e.user_id},
           {"substance", to_string(e.substance)},
           {"quantity", e.quantity},
           {"at", time_to_json(e.at)},
           {"location", e.location ? Json(*e.location) : Json(nullptr)},
           {"source", to_string(e.source)}};
}

void from_json(const Json& j, ConsumptionEvent& e) {
  require_object(j, "event");
  e.event_id = value_or<std::string>(j, "event_id", "");
  e.user_id = value_or<std::string>(j, "user_id", "");
  e.substance = parse_substance(j.at("substance").get<std::string>());
  e.quantity = j.at("quantity").get<double>();
  e.at = time_from_json(j.at("at"));
  e.location = opt<GeoPoint>(j, "location");
  e.source = parse_event_source(value_or<std::string>(j, "source", "manual"));
}

void to_json(Json& j, const LocationFix& f) {
  j = Json{{"user_id", f.user_id},
           {"point", f.point},
           {"at", time_to_json(f.at)},
           {"accuracy_m", f.accuracy_m ? Json(*f.accuracy_m) : Json(nullptr)}};
}

void from_json(const Json& j, LocationFix& f) {
  require_object(j, "fix");
  f.user_id = value_or<std::string>(j, "user_id", "");
  f.point = j.at("point").get<GeoPoint>();
  f.at = time_from_json(j.at("at"));
  f.accuracy_m = opt<double>(j, "accuracy_m");
  if (f.accuracy_m && !(*f.accuracy_m >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "accuracy_m must be non-negative");
  }
}

void to_json(Json& j, const DailyFeedback& f) {
  j = Json{{"user_id", f.user_id},
           {"date", format_date(f.date)},
           {"stress_level", f.stress_level},
           {"consumed_unlogged", f.consumed_unlogged},
           {"backfill_events", f.backfill_events},
           {"notes", f.notes}};
}

void from_json(const Json& j, DailyFeedback& f) {
  require_object(j, "feedback");
  f.user_id = value_or<std::string>(j, "user_id", "");
  f.date = parse_date(j.at("date").get<std::string>());
  f.stress_level = whole(j, "stress_level");
  f.consumed_unlogged = value_or(j, "consumed_unlogged", false);
  f.backfill_events = value_or<std::vector<ConsumptionEvent>>(j, "backfill_events", {});
  f.notes = value_or<std::string>(j, "notes", "");
}

namespace geo {

void to_json(Json& j, const DurationConstraint& c) {
  j = Json{{"l_min", c.l_min}, {"l_max", c.l_max}, {"applies_to", to_string(c.applies_to)}};
}

void from_json(const Json& j, DurationConstraint& c) {
  c.l_min = j.at("l_min").get<double>();
  c.l_max = j.at("l_max").get<double>();
  c.applies_to = parse_constraint_scope(value_or<std::string>(j, "applies_to", "fence-state"));
}

void to_json(Json& j, const Geofence& f) {
  j = Json{{"fence_id", f.fence_id},
           {"owner", f.owner ? Json(*f.owner) : Json(nullptr)},
           {"center", f.center},
           {"radius_m", f.radius_m},
           {"kind", to_string(f.kind)},
           {"state_constraint", f.state_constraint ? Json(*f.state_constraint) : Json(nullptr)},
           {"label", f.label}};
}

void from_json(const Json& j, Geofence& f) {
  require_object(j, "fence");
  f.fence_id = value_or<std::string>(j, "fence_id", "");
  f.owner = opt<std::string>(j, "owner");
  f.center = j.at("center").get<GeoPoint>();
  f.radius_m = j.at("radius_m").get<double>();
  f.kind = parse_fence_kind(value_or<std::string>(j, "kind", "custom"));
  f.state_constraint = opt<DurationConstraint>(j, "state_constraint");
  if (f.state_constraint) f.state_constraint->applies_to = ConstraintScope::FenceState;
  f.label = value_or<std::string>(j, "label", "");
}

void to_json(Json& j, const TransitionRule& r) {
  j = Json{{"from", r.from}, {"to", r.to}, {"l_min", r.bounds.l_min}, {"l_max", r.bounds.l_max}};
}

void from_json(const Json& j, TransitionRule& r) {
  r.from = j.at("from").get<std::string>();
  r.to = j.at("to").get<std::string>();
  r.bounds = DurationConstraint{j.at("l_min").get<double>(), j.at("l_max").get<double>(),
                                ConstraintScope::Transition};
}

void to_json(Json& j, const FenceEvent& e) {
  j = Json{{"user_id", e.user_id},
           {"fence_id", e.fence_id},
           {"to_fence", e.to_fence ? Json(*e.to_fence) : Json(nullptr)},
           {"kind", to_string(e.kind)},
           {"at", time_to_json(e.at)}};
}

void from_json(const Json& j, FenceEvent& e) {
  e.user_id = j.at("user_id").get<std::string>();
  e.fence_id = j.at("fence_id").get<std::string>();
  e.to_fence = opt<std::string>(j, "to_fence");
  const auto kind = j.at("kind").get<std::string>();
  bool found = false;
  for (auto k : {FenceEventKind::Entered, FenceEventKind::DwellConfirmed, FenceEventKind::Exited,
                 FenceEventKind::DwellViolation, FenceEventKind::TransitCompleted,
                 FenceEventKind::TransitViolation}) {
    if (to_string(k) == kind) {
      e.kind = k;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::InvalidArgument, "unknown fence event kind " + kind);
  e.at = time_from_json(j.at("at"));
}

void to_json(Json& j, const FenceMachine& m) {
  j = Json{{"user_id", m.user_id}, {"last_fix_at", opt_json(m.last_fix_at)}};
  if (const auto* in = std::get_if<FenceMachine::Inside>(&m.mode)) {
    j["mode"] = "inside";
    j["fence"] = in->fence;
    j["since"] = time_to_json(in->since);
    j["confirmed"] = in->confirmed;
    j["violated"] = in->violated;
  } else if (const auto* tr = std::get_if<FenceMachine::Transit>(&m.mode)) {
    j["mode"] = "transit";
    j["from"] = tr->from;
    j["since"] = time_to_json(tr->since);
  } else {
    j["mode"] = "outside";
  }
}

void from_json(const Json& j, FenceMachine& m) {
  m.user_id = j.at("user_id").get<std::string>();
  m.last_fix_at = opt_time(j, "last_fix_at");
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "inside") {
    m.mode = FenceMachine::Inside{j.at("fence").get<std::string>(), time_from_json(j.at("since")),
                                  j.at("confirmed").get<bool>(), j.at("violated").get<bool>()};
  } else if (mode == "transit") {
    m.mode = FenceMachine::Transit{j.at("from").get<std::string>(), time_from_json(j.at("since"))};
  } else if (mode == "outside") {
    m.mode = FenceMachine::Outside{};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown machine mode " + mode);
  }
}

}  // namespace geo

namespace diversion {

void to_json(Json& j, const PointOfInterest& p) {
  j = Json{{"poi_id", p.poi_id},
           {"name", p.name},
           {"location", p.location},
           {"theme", to_string(p.theme)},
           {"open", p.open}};
}

void from_json(const Json& j, PointOfInterest& p) {
  p.poi_id = j.at("poi_id").get<std::string>();
  p.name = value_or<std::string>(j, "name", "");
  p.location = j.at("location").get<GeoPoint>();
  p.theme = parse_interest_theme(j.at("theme").get<std::string>());
  p.open = value_or(j, "open", true);
}

void to_json(Json& j, const Notification& n) {
  Json reason = Json::object();
  if (n.reason.fence_id) reason["fence_id"] = *n.reason.fence_id;
  if (n.reason.peak_hour) reason["peak_hour"] = time_to_json(*n.reason.peak_hour);
  if (n.reason.probability) reason["probability"] = *n.reason.probability;
  j = Json{{"notif_id", n.notif_id},
           {"user_id", n.user_id},
           {"kind", to_string(n.kind)},
           {"body", n.body},
           {"recommendation", n.recommendation ? Json(*n.recommendation) : Json(nullptr)},
           {"suggestions", n.suggestions},
           {"scheduled_for", time_to_json(n.scheduled_for)},
           {"delivered_at", opt_json(n.delivered_at)},
           {"expires_at", opt_json(n.expires_at)},
           {"reason", reason}};
}

void from_json(const Json& j, Notification& n) {
  n.notif_id = j.at("notif_id").get<std::string>();
  n.user_id = j.at("user_id").get<std::string>();
  n.kind = parse_notification_kind(j.at("kind").get<std::string>());
  n.body = value_or<std::string>(j, "body", "");
  n.recommendation = opt<PointOfInterest>(j, "recommendation");
  n.suggestions = value_or<std::vector<std::string>>(j, "suggestions", {});
  n.scheduled_for = time_from_json(j.at("scheduled_for"));
  n.delivered_at = opt_time(j, "delivered_at");
  n.expires_at = opt_time(j, "expires_at");
  n.reason = {};
  if (auto it = j.find("reason"); it != j.end() && it->is_object()) {
    n.reason.fence_id = opt<std::string>(*it, "fence_id");
    n.reason.peak_hour = opt_time(*it, "peak_hour");
    n.reason.probability = opt<double>(*it, "probability");
  }
}

}  // namespace diversion

namespace stats {

void to_json(Json& j, const DailySummary& s) {
  j = Json{{"date", format_date(s.date)},
           {"alcohol", {{"times", s.alcohol_times}, {"oz", s.alcohol_oz}}},
           {"tobacco", {{"times", s.tobacco_times}, {"cigarettes", s.cigarettes}}}};
}

void to_json(Json& j, const WeeklyScores& w) {
  Json days = Json::array();
  for (const auto& d : w.days) {
    days.push_back({{"date", format_date(d.date)},
                    {"alcohol_score", d.alcohol_score},
                    {"smoking_score", d.smoking_score},
                    {"fitness_score", d.fitness_score}});
  }
  j = Json{{"week_start", format_date(w.week_start)}, {"days", days}};
}

void to_json(Json& j, const MonthlySeries& m) {
  j = Json{{"month", format_month(m.month)}, {"days", m.days}, {"totals", m.totals()}};
  j["totals"].erase("date");
}

}  // namespace stats

namespace predictor {

void to_json(Json& j, const TrainConfig& c) {
  j = Json{{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
           {"seed", c.seed},                   {"gradient_clip", c.gradient_clip},
           {"window_hours", c.window_hours},   {"hidden_size", c.hidden_size},
           {"minibatch", c.minibatch},         {"pool_users", c.pool_users}};
}

void from_json(const Json& j, TrainConfig& c) {
  const TrainConfig d;
  c.learning_rate = value_or(j, "learning_rate", d.learning_rate);
  c.epochs = value_or(j, "epochs", d.epochs);
  c.seed = value_or(j, "seed", d.seed);
  c.gradient_clip = value_or(j, "gradient_clip", d.gradient_clip);
  c.window_hours = value_or(j, "window_hours", d.window_hours);
  c.hidden_size = value_or(j, "hidden_size", d.hidden_size);
  c.minibatch = value_or(j, "minibatch", d.minibatch);
  c.pool_users = value_or(j, "pool_users", d.pool_users);
}

void to_json(Json& j, const Forecast& f) {
  Json hours = Json::array();
  for (const auto& h : f.hours) {
    hours.push_back({{"hour_start", time_to_json(h.hour_start)}, {"probability", h.probability}});
  }
  j = Json{{"hours", hours}};
  if (!f.hours.empty()) {
    j["peak"] = {{"hour_start", time_to_json(f.peak_hour().hour_start)},
                 {"probability", f.peak_hour().probability}};
  }
}

}  // namespace predictor

namespace sim {

namespace {

GeoPoint point_of(const Json& j) { return GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>()); }

}  // namespace

void to_json(Json& j, const Scenario& s) {
  Json users = Json::array();
  for (const auto& u : s.users) {
    Json hours = Json::object();
    for (const auto& [h, p] : u.relapse_hours) hours[std::to_string(h)] = p;
    Json commute = Json::array();
    for (const auto& w : u.commute) {
      commute.push_back({{"lat", w.point.lat()}, {"lon", w.point.lon()},
                         {"speed_mps", w.speed_mps}, {"dwell_s", w.dwell_s}});
    }
    Json spots = Json::array();
    for (const auto& f : u.favorite_spots) {
      spots.push_back({{"lat", f.point.lat()}, {"lon", f.point.lon()},
                       {"dwell_min_s", f.dwell_min_s}, {"dwell_max_s", f.dwell_max_s},
                       {"visit_probability", f.visit_probability}});
    }
    users.push_back({{"user_id", u.user_id},
                     {"substance", to_string(u.substance)},
                     {"quantity_per_event", u.quantity_per_event},
                     {"relapse_hours", hours},
                     {"home", u.home},
                     {"depart_minute", u.depart_minute},
                     {"commute", commute},
                     {"favorite_spots", spots},
                     {"travel_speed_mps", u.travel_speed_mps},
                     {"fix_dropout", u.fix_dropout},
                     {"outage_probability", u.outage_probability},
                     {"feedback_probability", u.feedback_probability}});
  }
  j = Json{{"seed", s.seed},          {"days", s.days},   {"start", time_to_json(s.start)},
           {"users", users},          {"fences", s.fences}, {"transitions", s.transitions}};
}

void from_json(const Json& j, Scenario& s) {
  require_object(j, "scenario");
  s = Scenario{};
  s.seed = value_or<std::uint64_t>(j, "seed", 0);
  s.days = j.contains("days") ? whole(j, "days") : 0;
  if (auto t = opt_time(j, "start")) s.start = *t;
  for (const auto& ju : j.value("users", Json::array())) {
    UserBehavior u;
    u.user_id = ju.at("user_id").get<std::string>();
    u.substance = parse_substance(value_or<std::string>(ju, "substance", "alcohol"));
    u.quantity_per_event = value_or(ju, "quantity_per_event", u.quantity_per_event);
    const Json hours = ju.value("relapse_hours", Json::object());
    for (const auto& [h, p] : hours.items()) {
      int hour = -1;
      try {
        hour = std::stoi(h);
      } catch (const std::exception&) {
      }
      if (hour < 0 || hour > 23) throw Error(ErrorCode::InvalidArgument, "bad relapse hour " + h);
      u.relapse_hours[hour] = p.get<double>();
    }
    u.home = ju.at("home").get<GeoPoint>();
    u.depart_minute = value_or(ju, "depart_minute", u.depart_minute);
    for (const auto& w : ju.value("commute", Json::array())) {
      u.commute.push_back(Waypoint{point_of(w), value_or(w, "speed_mps", 1.4), value_or(w, "dwell_s", 0.0)});
    }
    for (const auto& f : ju.value("favorite_spots", Json::array())) {
      u.favorite_spots.push_back(FavoriteSpot{point_of(f), value_or(f, "dwell_min_s", 600.0),
                                              value_or(f, "dwell_max_s", 1800.0),
                                              value_or(f, "visit_probability", 1.0)});
    }
    u.travel_speed_mps = value_or(ju, "travel_speed_mps", u.travel_speed_mps);
    u.fix_dropout = value_or(ju, "fix_dropout", 0.0);
    u.outage_probability = value_or(ju, "outage_probability", 0.0);
    u.feedback_probability = value_or(ju, "feedback_probability", 0.0);
    s.users.push_back(std::move(u));
  }
  s.fences = value_or<std::vector<geo::Geofence>>(j, "fences", {});
  s.transitions = value_or<std::vector<geo::TransitionRule>>(j, "transitions", {});
}

}  // namespace sim

}  // namespace addictfree

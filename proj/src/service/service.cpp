#include "addictfree/service/service.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "addictfree/codec/codec.hpp"
#include "addictfree/core/error.hpp"
#include "addictfree/core/validation.hpp"
#include "addictfree/predictor/checkpoint.hpp"
#include "addictfree/predictor/features.hpp"
#include "addictfree/predictor/training.hpp"

namespace addictfree::service {

using store::Namespace;

namespace {

constexpr std::string_view kTokenPrefix = "~token/";
constexpr std::string_view kMachinePrefix = "~machine/";
constexpr std::string_view kRulePrefix = "~rule/";
constexpr std::string_view kNotifIndex = "~id/";
constexpr std::string_view kModelMeta = "~meta/";
constexpr int kMaxClaims = 10000;

/// An HTTP failure that is not a domain error.
struct HttpFailure {
  int status;
  std::string code;
  std::string message;
};

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidGeoPoint:
    case ErrorCode::SerializationError:
      return 400;
    case ErrorCode::Unauthorized:
      return 401;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownUser:
    case ErrorCode::UnknownPost:
      return 404;
    case ErrorCode::DuplicateFeedback:
    case ErrorCode::OutOfOrderFix:
    case ErrorCode::AmbiguousFences:
    case ErrorCode::VersionConflict:
    case ErrorCode::InsufficientHistory:
      return 409;
    case ErrorCode::FutureTimestamp:
    case ErrorCode::NegativeQuantity:
    case ErrorCode::FractionalCigarette:
    case ErrorCode::DuplicateInterest:
    case ErrorCode::InvalidFence:
    case ErrorCode::EmptyTitle:
    case ErrorCode::EmptyBody:
    case ErrorCode::EmptyWindow:
    case ErrorCode::DegenerateLabels:
      return 422;
    default:
      return 500;
  }
}

Response json_response(int status, const Json& j) { return Response{status, j.dump(), "application/json"}; }

Response error_response(int status, std::string_view code, std::string_view message) {
  return json_response(status, Json{{"error", code}, {"message", message}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto slash = path.find('/', pos);
    const auto end = slash == std::string::npos ? path.size() : slash;
    if (end > pos) out.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

void check_user_id(const UserId& id) {
  if (id.empty() || id.size() > 64) {
    throw Error(ErrorCode::InvalidArgument, "user_id must be 1-64 characters");
  }
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) throw Error(ErrorCode::InvalidArgument, "user_id may only use [A-Za-z0-9._-]");
  }
}

std::string random_hex(std::size_t bytes) {
  static std::mutex mu;
  static std::random_device rd;
  std::lock_guard lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes; ++i) {
    const auto b = rd() & 0xff;
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

bool is_meta(const std::string& key) { return !key.empty() && key.front() == '~'; }

int query_int(const Request& r, const std::string& key, int fallback) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, key + " must be an integer");
}

std::optional<Timestamp> query_time(const Request& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end() || it->second.empty()) return std::nullopt;
  const auto& v = it->second;
  if (std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return from_epoch(std::stoll(v));
  }
  return parse_timestamp(v);
}

Json suggestion_json(const community::ConnectionSuggestion& s, const UserProfile* candidate) {
  Json basis = Json::array();
  for (auto b : s.basis) basis.push_back(community::to_string(b));
  Json j{{"user_id", s.user_id},
         {"candidate_id", s.candidate_id},
         {"score", s.score},
         {"basis", basis}};
  if (candidate) {
    j["display_name"] = candidate->display_name;
    j["recovery_stage"] = to_string(candidate->recovery_stage);
  }
  return j;
}

Json post_json(const community::Post& p) {
  Json comments = Json::array();
  for (const auto& c : p.comments) {
    comments.push_back({{"comment_id", c.comment_id},
                        {"author", c.author},
                        {"author_name", c.author_name},
                        {"body", c.body},
                        {"created_at", time_to_json(c.created_at)}});
  }
  return Json{{"post_id", p.post_id},         {"author", p.author},
              {"author_name", p.author_name}, {"title", p.title},
              {"body", p.body},               {"created_at", time_to_json(p.created_at)},
              {"comments", comments}};
}

Json message_json(const community::Message& m) {
  return Json{{"message_id", m.message_id},
              {"from", m.from},
              {"to", m.to},
              {"body", m.body},
              {"sent_at", time_to_json(m.sent_at)}};
}

std::string rule_key(const geo::TransitionRule& r, const std::optional<UserId>& owner) {
  return std::string(kRulePrefix) + owner.value_or("public") + "/" + r.from + "/" + r.to;
}

}  // namespace

Service::Service(ServiceConfig config, store::Store& store, const Clock& clock)
    : config_(std::move(config)),
      store_(store),
      clock_(clock),
      community_(store, [this](const UserId& id) { return find_user(id); }) {
  for (const auto& r : store_.scan(Namespace::Pois, "")) {
    pois_.push_back(decode<diversion::PointOfInterest>(parse_json(r.value)));
  }
  if (config_.poi_csv_path) {
    std::ifstream in(*config_.poi_csv_path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + config_.poi_csv_path->string());
    std::ostringstream text;
    text << in.rdbuf();
    import_pois(diversion::parse_poi_csv(text.str()));
  }
  reload_pending();
}

// ---- users -----------------------------------------------------------------

std::pair<UserProfile, std::string> Service::create_user(UserProfile profile) {
  if (profile.user_id.empty()) profile.user_id = "user-" + random_hex(6);
  check_user_id(profile.user_id);
  validate_profile(profile);
  profile.created_at = clock_.now();
  store_.put(Namespace::Users, profile.user_id, Json(profile).dump(), 0);
  const std::string token = random_hex(16);
  store_.put(Namespace::Users, std::string(kTokenPrefix) + token, profile.user_id, 0);
  spdlog::info("created user {}", profile.user_id);
  return {profile, token};
}

std::optional<UserProfile> Service::find_user(const UserId& id) const {
  if (id.empty() || is_meta(id)) return std::nullopt;
  auto rec = store_.get(Namespace::Users, id);
  if (!rec) return std::nullopt;
  return decode<UserProfile>(parse_json(rec->value));
}

std::vector<UserProfile> Service::all_users() const {
  std::vector<UserProfile> out;
  for (const auto& r : store_.scan(Namespace::Users, "")) {
    if (is_meta(r.key)) continue;
    out.push_back(decode<UserProfile>(parse_json(r.value)));
  }
  return out;
}

UserProfile Service::require_user(const UserId& id) const {
  auto u = find_user(id);
  if (!u) throw Error(ErrorCode::UnknownUser, "unknown user " + id);
  return *u;
}

std::mutex& Service::user_lock(const UserId& user) {
  std::lock_guard lock(locks_mu_);
  auto& slot = user_locks_[user];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

// ---- ingestion -------------------------------------------------------------

ConsumptionEvent Service::log_event(const UserId& user, ConsumptionEvent raw) {
  if (raw.user_id.empty()) raw.user_id = user;
  if (raw.user_id != user) throw Error(ErrorCode::InvalidArgument, "event user_id does not match path");
  ConsumptionEvent e = validate_event(raw, clock_.now(),
                                      [this](const UserId& id) { return find_user(id).has_value(); });
  if (!e.event_id.empty()) {
    store_.put(Namespace::Events, store::time_key(user, e.at, e.event_id), Json(e).dump(), 0);
    return e;
  }
  for (int n = 1; n <= kMaxClaims; ++n) {
    e.event_id = "ev-" + std::to_string(to_epoch(e.at)) + "-" + std::to_string(n);
    try {
      store_.put(Namespace::Events, store::time_key(user, e.at, e.event_id), Json(e).dump(), 0);
      return e;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::VersionConflict) throw;
    }
  }
  throw Error(ErrorCode::VersionConflict, "could not allocate an event id");
}

FixOutcome Service::ingest_fix(const UserId& user, LocationFix fix) {
  std::lock_guard guard(user_lock(user));
  const UserProfile profile = require_user(user);
  if (fix.user_id.empty()) fix.user_id = user;
  if (fix.user_id != user) throw Error(ErrorCode::InvalidArgument, "fix user_id does not match path");
  const Timestamp now = clock_.now();
  if (fix.at > now) throw Error(ErrorCode::FutureTimestamp, "fix is in the future");

  const std::string machine_key = std::string(kMachinePrefix) + user;
  geo::FenceMachine machine{user, geo::FenceMachine::Outside{}, std::nullopt};
  if (auto rec = store_.get(Namespace::Fixes, machine_key)) {
    machine = decode<geo::FenceMachine>(parse_json(rec->value));
  }
  const geo::FenceSet fences = fence_set_for(profile);
  geo::StepResult result = geo::step(machine, fences, fix);

  for (int n = 1; n <= kMaxClaims; ++n) {
    try {
      store_.put(Namespace::Fixes, store::time_key(user, fix.at, "f" + std::to_string(n)),
                 Json(fix).dump(), 0);
      break;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::VersionConflict) throw;
    }
  }
  store_.put(Namespace::Fixes, machine_key, Json(result.machine).dump());

  FixOutcome out;
  out.events = result.events;
  const auto places = pois();
  for (const auto& ev : result.events) {
    const geo::Geofence* fence = fences.find(ev.fence_id);
    if (!fence) continue;
    if (auto n = planner_.on_fence_event(ev, *fence, profile, places, now)) {
      if (enqueue(*n)) out.notifications.push_back(*n);
    }
  }
  if (!out.notifications.empty()) dispatch_due(now);
  return out;
}

DailyFeedback Service::submit_feedback(const UserId& user, DailyFeedback feedback) {
  require_user(user);
  if (feedback.user_id.empty()) feedback.user_id = user;
  if (feedback.user_id != user) {
    throw Error(ErrorCode::InvalidArgument, "feedback user_id does not match path");
  }
  for (auto& e : feedback.backfill_events) {
    if (e.user_id.empty()) e.user_id = user;
    e.source = EventSource::SurveyBackfill;
  }
  const Timestamp now = clock_.now();
  validate_feedback(feedback, now);
  const std::string key = user + "/" + format_date(feedback.date);
  if (store_.get(Namespace::Feedback, key)) {
    throw Error(ErrorCode::DuplicateFeedback, "feedback for " + format_date(feedback.date) + " exists");
  }
  for (auto& e : feedback.backfill_events) e = log_event(user, e);
  store_.put(Namespace::Feedback, key, Json(feedback).dump(), 0);
  return feedback;
}

geo::Geofence Service::add_fence(geo::Geofence fence, const std::vector<geo::TransitionRule>& rules,
                                 const UserId& actor) {
  if (!actor.empty()) {
    if (!fence.owner) fence.owner = actor;
    if (*fence.owner != actor) {
      throw HttpFailure{403, "forbidden", "fences can only be created for yourself"};
    }
  }
  if (fence.owner) require_user(*fence.owner);

  std::lock_guard guard(fences_mu_);
  if (fence.fence_id.empty()) {
    for (int n = 1;; ++n) {
      const std::string id = "fence-" + std::to_string(n);
      if (!store_.get(Namespace::Fences, id)) {
        fence.fence_id = id;
        break;
      }
    }
  }
  geo::validate_fence(fence);
  std::vector<geo::Geofence> existing;
  for (const auto& r : store_.scan(Namespace::Fences, "")) {
    if (is_meta(r.key)) continue;
    auto f = decode<geo::Geofence>(parse_json(r.value));
    // Public fences can co-occur with anyone's; private ones only with the owner's.
    if (!fence.owner || f.is_public() || f.owner == fence.owner) existing.push_back(std::move(f));
  }
  if (is_meta(fence.fence_id)) throw Error(ErrorCode::InvalidFence, "fence_id may not start with ~");
  for (const auto& f : existing) {
    if (f.fence_id == fence.fence_id) {
      throw Error(ErrorCode::VersionConflict, "fence " + fence.fence_id + " exists");
    }
    if (geo::fences_overlap(f, fence)) {
      throw Error(ErrorCode::InvalidFence, "fence overlaps " + f.fence_id);
    }
  }
  const auto violations = geo::validate_constraints({fence}, rules);
  if (!violations.empty()) {
    throw Error(ErrorCode::InvalidFence, violations.front().reason);
  }
  for (const auto& r : rules) {
    if (r.from != fence.fence_id && r.to != fence.fence_id) {
      throw Error(ErrorCode::InvalidFence, "transition rules must involve the new fence");
    }
  }
  store_.put(Namespace::Fences, fence.fence_id, Json(fence).dump(), 0);
  for (const auto& r : rules) {
    Json j = r;
    j["owner"] = fence.owner ? Json(*fence.owner) : Json(nullptr);
    store_.put(Namespace::Fences, rule_key(r, fence.owner), j.dump());
  }
  return fence;
}

std::vector<geo::Geofence> Service::fences_for(const UserId& user) const {
  const UserProfile profile = require_user(user);
  return fence_set_for(profile).fences();
}

geo::FenceSet Service::fence_set_for(const UserProfile& user) const {
  std::vector<geo::Geofence> all;
  std::vector<geo::TransitionRule> rules;
  for (const auto& r : store_.scan(Namespace::Fences, "")) {
    if (r.key.rfind(kRulePrefix, 0) == 0) {
      const Json j = parse_json(r.value);
      const auto owner = j.contains("owner") && !j["owner"].is_null()
                             ? std::optional<UserId>(j["owner"].get<std::string>())
                             : std::nullopt;
      if (!owner || *owner == user.user_id) rules.push_back(decode<geo::TransitionRule>(j));
      continue;
    }
    if (is_meta(r.key)) continue;
    all.push_back(decode<geo::Geofence>(parse_json(r.value)));
  }
  auto active = geo::active_fences_for(user, all);
  std::erase_if(rules, [&](const geo::TransitionRule& r) {
    const auto has = [&](const FenceId& id) {
      return std::any_of(active.begin(), active.end(),
                         [&](const geo::Geofence& f) { return f.fence_id == id; });
    };
    return !has(r.from) || !has(r.to);
  });
  return geo::FenceSet(std::move(active), std::move(rules));
}

std::vector<ConsumptionEvent> Service::events_for(const UserId& user,
                                                  std::optional<store::TimeRange> range) const {
  std::vector<ConsumptionEvent> out;
  for (const auto& r : store_.scan(Namespace::Events, user + "/", range)) {
    out.push_back(decode<ConsumptionEvent>(parse_json(r.value)));
  }
  return out;
}

std::vector<DailyFeedback> Service::feedback_for(const UserId& user) const {
  std::vector<DailyFeedback> out;
  for (const auto& r : store_.scan(Namespace::Feedback, user + "/")) {
    out.push_back(decode<DailyFeedback>(parse_json(r.value)));
  }
  return out;
}

// ---- POIs ------------------------------------------------------------------

void Service::import_pois(const std::vector<diversion::PointOfInterest>& pois) {
  for (const auto& p : pois) {
    store_.put(Namespace::Pois, p.poi_id, Json(p).dump());
  }
  std::unique_lock lock(pois_mu_);
  for (const auto& p : pois) {
    auto it = std::find_if(pois_.begin(), pois_.end(),
                           [&](const auto& q) { return q.poi_id == p.poi_id; });
    if (it == pois_.end()) {
      pois_.push_back(p);
    } else {
      *it = p;
    }
  }
}

std::vector<diversion::PointOfInterest> Service::pois() const {
  std::shared_lock lock(pois_mu_);
  return pois_;
}

// ---- predictor -------------------------------------------------------------

Timestamp Service::history_start(const UserProfile& user) const {
  std::optional<Timestamp> first;
  for (const auto& e : events_for(user.user_id)) {
    if (!first || e.at < *first) first = e.at;
  }
  for (const auto& f : feedback_for(user.user_id)) {
    const Timestamp t = local_midnight(f.date, 0);
    if (!first || t < *first) first = t;
  }
  return floor_hour(first.value_or(user.created_at));
}

predictor::LstmParamsd Service::train_user(const UserId& user, Timestamp now) {
  const UserProfile profile = require_user(user);
  const auto& cfg = config_.predictor;
  const auto events = events_for(user);
  const auto feedback = feedback_for(user);
  const auto batch = predictor::training_windows(events, feedback, history_start(profile),
                                                 floor_hour(now), cfg.window_hours);
  const auto p0 = predictor::init_params(cfg.hidden_size, cfg.seed);
  auto params = predictor::train(p0, batch, cfg);
  store_.put(Namespace::Models, user, predictor::encode_checkpoint({params, cfg}));
  store_.put(Namespace::Models, std::string(kModelMeta) + user,
             Json{{"trained_at", time_to_json(now)}, {"windows", batch.size()}}.dump());
  spdlog::info("trained model for {} on {} windows", user, batch.size());
  return params;
}

std::optional<predictor::LstmParamsd> Service::model_for(const UserId& user) const {
  auto rec = store_.get(Namespace::Models, user);
  if (!rec) return std::nullopt;
  return predictor::decode_checkpoint(rec->value).params;
}

predictor::Forecast Service::predict(const UserId& user, Timestamp now, int horizon) {
  const UserProfile profile = require_user(user);
  if (horizon < 1 || horizon > 168) throw Error(ErrorCode::InvalidArgument, "horizon must be 1..168");
  auto model = model_for(user);
  if (!model) throw Error(ErrorCode::NotFound, "no model trained for " + user + " yet");
  return predictor::predict_next_hours(*model, events_for(user), feedback_for(user), now, horizon,
                                       history_start(profile), config_.predictor.window_hours);
}

TickReport Service::hourly_tick(Timestamp now) {
  std::lock_guard guard(tick_mu_);
  TickReport report;
  for (const auto& user : all_users()) {
    if (user.is_therapist()) continue;
    ++report.users;
    try {
      std::optional<Timestamp> trained_at;
      if (auto meta = store_.get(Namespace::Models, std::string(kModelMeta) + user.user_id)) {
        trained_at = time_from_json(parse_json(meta->value).at("trained_at"));
      }
      const bool enough =
          floor_hour(now) - history_start(user) >= std::chrono::hours{predictor::kMinHistoryHours};
      const bool nightly = trained_at && local_hour(now, user.utc_offset_minutes) == kRetrainLocalHour &&
                           local_date(*trained_at, user.utc_offset_minutes) !=
                               local_date(now, user.utc_offset_minutes);
      if (enough && (!trained_at || nightly)) {
        train_user(user.user_id, now);
        ++report.trained;
      }
      if (model_for(user.user_id)) {
        const auto forecast = predict(user.user_id, now, kDefaultHorizon);
        ++report.predicted;
        if (auto n = diversion::schedule_prerelapse(forecast.hours, config_.prediction_threshold,
                                                    user, now)) {
          if (enqueue(*n)) ++report.scheduled;
        }
      }
      const Date today = local_date(now, user.utc_offset_minutes);
      for (auto n : {planner_.daily_feedback_request(user, today), planner_.motivational(user, today)}) {
        if (n.scheduled_for >= now && enqueue(n)) ++report.scheduled;
      }
    } catch (const std::exception& e) {
      ++report.failures;
      spdlog::warn("tick failed for {}: {}", user.user_id, e.what());
    }
  }
  dispatch_due(now);
  return report;
}

// ---- notifications -----------------------------------------------------------

std::string Service::notification_key(const diversion::Notification& n) const {
  return store::time_key(n.user_id, n.scheduled_for, n.notif_id);
}

bool Service::enqueue(diversion::Notification n) {
  if (n.scheduled_for < clock_.now()) return false;
  try {
    store_.put(Namespace::Notifications, std::string(kNotifIndex) + n.notif_id, notification_key(n), 0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::VersionConflict) return false;
    throw;
  }
  store_.put(Namespace::Notifications, notification_key(n), Json(n).dump());
  queue_.push(std::move(n));
  return true;
}

void Service::reload_pending() {
  for (const auto& r : store_.scan(Namespace::Notifications, "")) {
    if (is_meta(r.key)) continue;
    auto n = decode<diversion::Notification>(parse_json(r.value));
    if (!n.delivered_at) queue_.push(std::move(n));
  }
}

std::vector<diversion::Notification> Service::dispatch_due(Timestamp now) {
  auto due = queue_.drain_due(now);
  for (const auto& n : due) {
    store_.put(Namespace::Notifications, notification_key(n), Json(n).dump());
  }
  return due;
}

std::vector<diversion::Notification> Service::notifications_for(
    const UserId& user, std::optional<Timestamp> since) const {
  std::vector<diversion::Notification> out;
  for (const auto& r : store_.scan(Namespace::Notifications, user + "/")) {
    auto n = decode<diversion::Notification>(parse_json(r.value));
    if (!n.delivered_at) continue;
    if (since && *n.delivered_at < *since) continue;
    out.push_back(std::move(n));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return *a.delivered_at < *b.delivered_at;
  });
  return out;
}

void Service::shutdown() {
  dispatch_due(clock_.now());
  spdlog::info("shutdown with {} notifications pending", queue_.size());
}

// ---- HTTP routing --------------------------------------------------------------

std::optional<UserId> Service::authenticate(const Request& request) const {
  if (config_.operator_token.empty()) return UserId{};
  if (request.bearer.empty()) return std::nullopt;
  if (request.bearer == config_.operator_token) return UserId{};
  if (auto rec = store_.get(Namespace::Users, std::string(kTokenPrefix) + request.bearer)) {
    return rec->value;
  }
  return std::nullopt;
}

void Service::require_access(const std::optional<UserId>& actor, const UserId& user) const {
  if (!actor) throw HttpFailure{401, "unauthorized", "missing or unknown bearer token"};
  if (!actor->empty() && *actor != user) {
    throw HttpFailure{403, "forbidden", "token does not grant access to " + user};
  }
}

Response Service::handle(const Request& request) {
  try {
    std::optional<UserId> actor;
    const auto parts = split_path(request.path);
    const bool health = request.method == "GET" &&
                        (parts == std::vector<std::string>{"health"} ||
                         parts == std::vector<std::string>{"v1", "health"});
    if (!health) {
      actor = authenticate(request);
      if (!actor) throw HttpFailure{401, "unauthorized", "missing or unknown bearer token"};
    }
    return route(request, actor);
  } catch (const HttpFailure& f) {
    return error_response(f.status, f.code, f.message);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", request.method, request.path, e.what());
    return error_response(500, "internal", e.what());
  }
}

Response Service::route(const Request& req, const std::optional<UserId>& actor) {
  const auto p = split_path(req.path);
  const auto& m = req.method;
  const auto is = [&](std::initializer_list<const char*> shape) {
    if (p.size() != shape.size()) return false;
    std::size_t i = 0;
    for (const char* s : shape) {
      if (std::string_view(s) != "*" && p[i] != s) return false;
      ++i;
    }
    return true;
  };
  const bool op = actor && actor->empty();
  const auto operator_only = [&] {
    if (!op) throw HttpFailure{403, "forbidden", "operator token required"};
  };
  const Timestamp now = clock_.now();

  if (m == "GET" && (is({"health"}) || is({"v1", "health"}))) {
    return json_response(200, {{"status", "ok"}, {"name", kServiceName}, {"version", kServiceVersion}});
  }

  if (!p.empty() && p[0] == "v1") {
    // /v1/users
    if (m == "POST" && is({"v1", "users"})) {
      operator_only();
      auto [user, token] = create_user(decode<UserProfile>(parse_json(req.body)));
      return json_response(201, {{"user", user}, {"token", token}});
    }
    if (m == "GET" && is({"v1", "users"})) {
      operator_only();
      return json_response(200, all_users());
    }
    if (p.size() >= 3 && p[1] == "users") {
      const UserId& id = p[2];
      const bool messaging = m == "POST" && is({"v1", "users", "*", "messages"});
      if (!messaging) require_access(actor, id);
      if (m == "GET" && is({"v1", "users", "*"})) return json_response(200, require_user(id));
      if (m == "POST" && is({"v1", "users", "*", "events"})) {
        return json_response(201, log_event(id, decode<ConsumptionEvent>(parse_json(req.body))));
      }
      if (m == "GET" && is({"v1", "users", "*", "events"})) {
        require_user(id);
        std::optional<store::TimeRange> range;
        const auto from = query_time(req, "from");
        const auto to = query_time(req, "to");
        if (from || to) range = store::TimeRange{from.value_or(from_epoch(0)), to.value_or(from_epoch(999'999'999'999))};
        return json_response(200, events_for(id, range));
      }
      if (m == "POST" && is({"v1", "users", "*", "fixes"})) {
        const Json body = parse_json(req.body);
        std::vector<LocationFix> fixes;
        if (body.is_array()) {
          fixes = decode<std::vector<LocationFix>>(body);
        } else {
          fixes.push_back(decode<LocationFix>(body));
        }
        Json events = Json::array();
        Json notes = Json::array();
        for (auto& f : fixes) {
          const auto out = ingest_fix(id, f);
          for (const auto& e : out.events) events.push_back(e);
          for (const auto& n : out.notifications) notes.push_back(n);
        }
        return json_response(201, {{"accepted", fixes.size()}, {"events", events}, {"notifications", notes}});
      }
      if (m == "POST" && is({"v1", "users", "*", "feedback"})) {
        return json_response(201, submit_feedback(id, decode<DailyFeedback>(parse_json(req.body))));
      }
      if (m == "GET" && is({"v1", "users", "*", "fences"})) return json_response(200, fences_for(id));
      if (m == "GET" && p.size() == 5 && p[3] == "summary") {
        const UserProfile user = require_user(id);
        const int off = user.utc_offset_minutes;
        if (p[4] == "daily") {
          auto it = req.query.find("date");
          const Date d = it != req.query.end() ? parse_date(it->second) : local_date(now, off);
          return json_response(200, stats::daily_summary(events_for(id), d, off));
        }
        if (p[4] == "weekly") {
          auto it = req.query.find("week_start");
          if (it == req.query.end()) throw Error(ErrorCode::InvalidArgument, "week_start is required");
          return json_response(
              200, stats::weekly_scores(events_for(id), feedback_for(id), parse_date(it->second), off));
        }
        if (p[4] == "monthly") {
          auto it = req.query.find("month");
          if (it == req.query.end()) throw Error(ErrorCode::InvalidArgument, "month is required");
          const auto series = stats::monthly_series(events_for(id), parse_month(it->second), off);
          auto fmt = req.query.find("format");
          if (fmt != req.query.end() && fmt->second == "csv") {
            return Response{200, stats::monthly_csv(series), "text/csv"};
          }
          return json_response(200, series);
        }
      }
      if (m == "GET" && is({"v1", "users", "*", "prediction"})) {
        return json_response(200, predict(id, now, query_int(req, "horizon", kDefaultHorizon)));
      }
      if (m == "GET" && is({"v1", "users", "*", "notifications"})) {
        require_user(id);
        return json_response(200, notifications_for(id, query_time(req, "since")));
      }
      if (m == "GET" && is({"v1", "users", "*", "connections"})) {
        const int k = query_int(req, "k", 5);
        const auto users = all_users();
        Json out = Json::array();
        for (const auto& s : community::suggest_connections(id, users, k)) {
          auto c = std::find_if(users.begin(), users.end(),
                                [&](const UserProfile& u) { return u.user_id == s.candidate_id; });
          out.push_back(suggestion_json(s, c == users.end() ? nullptr : &*c));
        }
        return json_response(200, out);
      }
      if (m == "GET" && is({"v1", "users", "*", "inbox"})) {
        Json out = Json::array();
        for (const auto& msg : community_.inbox(id)) out.push_back(message_json(msg));
        return json_response(200, out);
      }
    }
    // messages are sent by the authenticated user to the path user
    if (m == "POST" && is({"v1", "users", "*", "messages"})) {
      const Json body = parse_json(req.body);
      UserId from = *actor;
      if (from.empty()) from = body.at("from").get<std::string>();
      const auto msg = community_.send_message(from, p[2], body.at("body").get<std::string>(), now);
      return json_response(201, message_json(msg));
    }

    // /v1/fences
    if (m == "POST" && is({"v1", "fences"})) {
      const Json body = parse_json(req.body);
      const auto fence = decode<geo::Geofence>(body);
      std::vector<geo::TransitionRule> rules;
      if (body.contains("transitions")) rules = decode<std::vector<geo::TransitionRule>>(body["transitions"]);
      return json_response(201, add_fence(fence, rules, *actor));
    }
    if (m == "GET" && is({"v1", "fences"})) {
      Json out = Json::array();
      for (const auto& r : store_.scan(Namespace::Fences, "")) {
        if (is_meta(r.key)) continue;
        auto f = decode<geo::Geofence>(parse_json(r.value));
        if (f.is_public() || op) out.push_back(f);
      }
      return json_response(200, out);
    }

    // /v1/posts
    if (m == "POST" && is({"v1", "posts"})) {
      const Json body = parse_json(req.body);
      UserId author = *actor;
      if (author.empty()) author = body.value("author", std::string());
      const auto post = community_.create_post(author, body.value("title", std::string()),
                                               body.value("body", std::string()), now);
      return json_response(201, post_json(post));
    }
    if (m == "GET" && is({"v1", "posts"})) {
      Json out = Json::array();
      for (const auto& post : community_.list_feed()) out.push_back(post_json(post));
      return json_response(200, out);
    }
    if (m == "GET" && is({"v1", "posts", "*"})) {
      auto post = community_.get_post(p[2]);
      if (!post) throw Error(ErrorCode::UnknownPost, p[2]);
      return json_response(200, post_json(*post));
    }
    if (m == "POST" && is({"v1", "posts", "*", "comments"})) {
      const Json body = parse_json(req.body);
      UserId author = *actor;
      if (author.empty()) author = body.value("author", std::string());
      const auto c = community_.add_comment(p[2], author, body.value("body", std::string()), now);
      return json_response(201, {{"comment_id", c.comment_id},
                                 {"author", c.author},
                                 {"author_name", c.author_name},
                                 {"body", c.body},
                                 {"created_at", time_to_json(c.created_at)}});
    }

    // /v1/pois
    if (m == "POST" && is({"v1", "pois"})) {
      operator_only();
      const Json body = parse_json(req.body);
      const auto list = body.is_array() ? decode<std::vector<diversion::PointOfInterest>>(body)
                                        : std::vector{decode<diversion::PointOfInterest>(body)};
      import_pois(list);
      return json_response(201, {{"imported", list.size()}});
    }
    if (m == "GET" && is({"v1", "pois"})) return json_response(200, pois());
  }
  return error_response(404, "not_found", "no route for " + m + " " + req.path);
}

}  // namespace addictfree::service

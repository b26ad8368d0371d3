#include "addictfree/community/community.hpp"

#include <algorithm>
#include <cstdio>

#include "addictfree/codec/codec.hpp"
#include "addictfree/core/error.hpp"
#include "addictfree/geo/geofence.hpp"

namespace addictfree::community {

namespace {

constexpr std::string_view kFeedPrefix = "feed/";
constexpr std::string_view kIdPrefix = "id/";
constexpr int kMaxRetries = 1000;

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

Json comment_json(const Comment& c) {
  return Json{{"comment_id", c.comment_id},
              {"author", c.author},
              {"author_name", c.author_name},
              {"body", c.body},
              {"created_at", time_to_json(c.created_at)}};
}

Comment comment_from(const Json& j) {
  return Comment{j.at("comment_id").get<std::string>(), j.at("author").get<std::string>(),
                 j.at("author_name").get<std::string>(), j.at("body").get<std::string>(),
                 time_from_json(j.at("created_at"))};
}

std::string encode_post(const Post& p) {
  Json comments = Json::array();
  for (const auto& c : p.comments) comments.push_back(comment_json(c));
  return Json{{"post_id", p.post_id},
              {"author", p.author},
              {"author_name", p.author_name},
              {"title", p.title},
              {"body", p.body},
              {"created_at", time_to_json(p.created_at)},
              {"comments", comments}}
      .dump();
}

Post decode_post(const std::string& text) {
  const Json j = Json::parse(text);
  Post p;
  p.post_id = j.at("post_id").get<std::string>();
  p.author = j.at("author").get<std::string>();
  p.author_name = j.at("author_name").get<std::string>();
  p.title = j.at("title").get<std::string>();
  p.body = j.at("body").get<std::string>();
  p.created_at = time_from_json(j.at("created_at"));
  for (const auto& c : j.at("comments")) p.comments.push_back(comment_from(c));
  return p;
}

std::string numbered(std::string_view stem, Timestamp at, int n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "-%012lld-%04d", static_cast<long long>(to_epoch(at)), n);
  return std::string(stem) + buf;
}

}  // namespace

std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::SameStage: return "same-stage";
    case Basis::SameAddiction: return "same-addiction";
    case Basis::Vicinity: return "vicinity";
    case Basis::Therapist: return "therapist";
  }
  return "unknown";
}

double vicinity(const UserProfile& a, const UserProfile& b) {
  if (!a.home_region || !b.home_region) return 0.0;
  const double km = geo::haversine_m(*a.home_region, *b.home_region) / 1000.0;
  if (km <= kNearKm) return 1.0;
  if (km >= kFarKm) return 0.0;
  return (kFarKm - km) / (kFarKm - kNearKm);
}

ConnectionSuggestion score_candidate(const UserProfile& user, const UserProfile& candidate) {
  ConnectionSuggestion s{user.user_id, candidate.user_id, 0.0, {}};
  if (user.recovery_stage == candidate.recovery_stage) {
    s.score += kStageWeight;
    s.basis.insert(Basis::SameStage);
  }
  const bool shared = std::any_of(user.addiction_kinds.begin(), user.addiction_kinds.end(),
                                  [&](Substance k) { return candidate.addiction_kinds.count(k); });
  if (shared) {
    s.score += kAddictionWeight;
    s.basis.insert(Basis::SameAddiction);
  }
  const double v = vicinity(user, candidate);
  if (v > 0.0) {
    s.score += kVicinityWeight * v;
    s.basis.insert(Basis::Vicinity);
  }
  if (candidate.is_therapist()) {
    s.score += kTherapistWeight;
    s.basis.insert(Basis::Therapist);
  }
  s.score = std::clamp(s.score, 0.0, 1.0);
  return s;
}

std::vector<ConnectionSuggestion> suggest_connections(const UserId& user,
                                                      const std::vector<UserProfile>& all_users,
                                                      int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const auto self = std::find_if(all_users.begin(), all_users.end(),
                                 [&](const UserProfile& u) { return u.user_id == user; });
  if (self == all_users.end()) throw Error(ErrorCode::UnknownUser, user);
  std::vector<ConnectionSuggestion> out;
  for (const auto& c : all_users) {
    if (c.user_id == user) continue;
    out.push_back(score_candidate(*self, c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.candidate_id < b.candidate_id;
  });
  if (out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

Community::Community(store::Store& store, UserDirectory users)
    : store_(store), users_(std::move(users)) {}

UserProfile Community::require_user(const UserId& id) const {
  auto u = users_ ? users_(id) : std::nullopt;
  if (!u) throw Error(ErrorCode::UnknownUser, id);
  return *u;
}

Post Community::create_post(const UserId& author, const std::string& title,
                            const std::string& body, Timestamp now) {
  const UserProfile user = require_user(author);
  if (blank(title)) throw Error(ErrorCode::EmptyTitle, "post title is empty");
  if (blank(body)) throw Error(ErrorCode::EmptyBody, "post body is empty");

  Post p;
  p.author = author;
  p.author_name = user.display_name;
  p.title = title;
  p.body = body;
  p.created_at = now;
  for (int n = 1; n <= kMaxRetries; ++n) {
    p.post_id = numbered("post", now, n);
    const std::string feed_key = store::time_key("feed", now, p.post_id);
    try {
      // Claiming the id index first makes the id unique across writers.
      store_.put(store::Namespace::Posts, std::string(kIdPrefix) + p.post_id, feed_key, 0);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::VersionConflict) continue;
      throw;
    }
    store_.put(store::Namespace::Posts, feed_key, encode_post(p), 0);
    return p;
  }
  throw Error(ErrorCode::VersionConflict, "could not allocate a post id");
}

Comment Community::add_comment(const std::string& post_id, const UserId& author,
                               const std::string& body, Timestamp now) {
  const auto index = store_.get(store::Namespace::Posts, std::string(kIdPrefix) + post_id);
  if (!index) throw Error(ErrorCode::UnknownPost, post_id);
  const UserProfile user = require_user(author);
  if (blank(body)) throw Error(ErrorCode::EmptyBody, "comment body is empty");

  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    const auto current = store_.get(store::Namespace::Posts, index->value);
    if (!current) throw Error(ErrorCode::UnknownPost, post_id);
    Post p = decode_post(current->value);
    Comment c{post_id + "/c" + std::to_string(p.comments.size() + 1), author, user.display_name,
              body, now};
    const auto pos = std::upper_bound(
        p.comments.begin(), p.comments.end(), now,
        [](Timestamp t, const Comment& other) { return t < other.created_at; });
    p.comments.insert(pos, c);
    try {
      store_.put(store::Namespace::Posts, index->value, encode_post(p), current->version);
      return c;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::VersionConflict) throw;
    }
  }
  throw Error(ErrorCode::VersionConflict, "comment retries exhausted on " + post_id);
}

std::optional<Post> Community::get_post(const std::string& post_id) const {
  const auto index = store_.get(store::Namespace::Posts, std::string(kIdPrefix) + post_id);
  if (!index) return std::nullopt;
  const auto rec = store_.get(store::Namespace::Posts, index->value);
  if (!rec) return std::nullopt;
  return decode_post(rec->value);
}

std::vector<Post> Community::list_feed() const {
  std::vector<Post> out;
  for (const auto& r : store_.scan(store::Namespace::Posts, kFeedPrefix)) {
    out.push_back(decode_post(r.value));
  }
  return out;
}

Message Community::send_message(const UserId& from, const UserId& to, const std::string& body,
                                Timestamp now) {
  require_user(from);
  require_user(to);
  if (blank(body)) throw Error(ErrorCode::EmptyBody, "message body is empty");
  for (int n = 1; n <= kMaxRetries; ++n) {
    Message m{numbered("msg", now, n), from, to, body, now};
    const Json j{{"message_id", m.message_id},
                 {"from", m.from},
                 {"to", m.to},
                 {"body", m.body},
                 {"sent_at", time_to_json(m.sent_at)}};
    try {
      store_.put(store::Namespace::Posts, "inbox/" + to + "/" + m.message_id, j.dump(), 0);
      return m;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::VersionConflict) throw;
    }
  }
  throw Error(ErrorCode::VersionConflict, "could not allocate a message id");
}

std::vector<Message> Community::inbox(const UserId& user) const {
  std::vector<Message> out;
  for (const auto& r : store_.scan(store::Namespace::Posts, "inbox/" + user + "/")) {
    const Json j = Json::parse(r.value);
    out.push_back(Message{j.at("message_id").get<std::string>(), j.at("from").get<std::string>(),
                          j.at("to").get<std::string>(), j.at("body").get<std::string>(),
                          time_from_json(j.at("sent_at"))});
  }
  return out;
}

}  // namespace addictfree::community

#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "addictfree/core/types.hpp"
#include "addictfree/store/store.hpp"

namespace addictfree::community {

struct Comment {
  std::string comment_id;
  UserId author;
  std::string author_name;
  std::string body;
  Timestamp created_at{};

  friend bool operator==(const Comment&, const Comment&) = default;
};

struct Post {
  std::string post_id;
  UserId author;
  std::string author_name;  // display_name at posting time
  std::string title;
  std::string body;
  Timestamp created_at{};
  std::vector<Comment> comments;  // ordered by created_at

  friend bool operator==(const Post&, const Post&) = default;
};

struct Message {
  std::string message_id;
  UserId from;
  UserId to;
  std::string body;
  Timestamp sent_at{};

  friend bool operator==(const Message&, const Message&) = default;
};

enum class Basis { SameStage, SameAddiction, Vicinity, Therapist };

std::string_view to_string(Basis b);

struct ConnectionSuggestion {
  UserId user_id;
  UserId candidate_id;
  double score = 0.0;
  std::set<Basis> basis;
};

inline constexpr double kStageWeight = 0.4;
inline constexpr double kAddictionWeight = 0.3;
inline constexpr double kVicinityWeight = 0.2;
inline constexpr double kTherapistWeight = 0.1;
inline constexpr double kNearKm = 50.0;
inline constexpr double kFarKm = 500.0;

/// 1 within 50 km, linear to 0 at 500 km, 0 when either home region is
/// unknown.
double vicinity(const UserProfile& a, const UserProfile& b);

ConnectionSuggestion score_candidate(const UserProfile& user, const UserProfile& candidate);

/// Top `k` candidates by score, ties by candidate_id; `user` itself is
/// skipped. Throws Error{UnknownUser} when `user` is not in `all_users` and
/// Error{InvalidArgument} when k < 1.
std::vector<ConnectionSuggestion> suggest_connections(const UserId& user,
                                                      const std::vector<UserProfile>& all_users,
                                                      int k);

using UserDirectory = std::function<std::optional<UserProfile>(const UserId&)>;

/// Posts, comments and direct messages persisted in the posts namespace.
class Community {
 public:
  Community(store::Store& store, UserDirectory users);

  /// Throws Error{UnknownUser}, Error{EmptyTitle} or Error{EmptyBody}.
  Post create_post(const UserId& author, const std::string& title, const std::string& body,
                   Timestamp now);

  /// Safe under concurrent commenters. Throws Error{UnknownPost},
  /// Error{UnknownUser} or Error{EmptyBody}.
  Comment add_comment(const std::string& post_id, const UserId& author, const std::string& body,
                      Timestamp now);

  std::optional<Post> get_post(const std::string& post_id) const;

  /// All posts ordered by (created_at, post_id).
  std::vector<Post> list_feed() const;

  Message send_message(const UserId& from, const UserId& to, const std::string& body,
                       Timestamp now);

  /// Messages addressed to `user`, oldest first.
  std::vector<Message> inbox(const UserId& user) const;

 private:
  UserProfile require_user(const UserId& id) const;

  store::Store& store_;
  UserDirectory users_;
};

}  // namespace addictfree::community

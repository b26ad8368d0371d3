#pragma once

#include <optional>
#include <string>
#include <vector>

#include "addictfree/core/types.hpp"

namespace addictfree::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

enum class FenceKind { AlcoholSpot, TobaccoSpot, Custom };

enum class ConstraintScope { FenceState, Transition };

/// Duration interval [l_min, l_max] in seconds.
struct DurationConstraint {
  double l_min = 0.0;
  double l_max = 0.0;
  ConstraintScope applies_to = ConstraintScope::FenceState;

  friend bool operator==(const DurationConstraint&, const DurationConstraint&) = default;
};

/// True iff l_min >= 0, l_max > 0 and l_min < l_max (state) or
/// l_min <= l_max (transition).
bool is_well_formed(const DurationConstraint& c);

struct Geofence {
  FenceId fence_id;
  std::optional<UserId> owner;  // empty = public
  GeoPoint center;
  double radius_m = 0.0;
  FenceKind kind = FenceKind::Custom;
  std::optional<DurationConstraint> state_constraint;
  std::string label;

  bool is_public() const { return !owner.has_value(); }
};

/// Constraint on travel time between leaving `from` and entering `to`.
struct TransitionRule {
  FenceId from;
  FenceId to;
  DurationConstraint bounds{0.0, 0.0, ConstraintScope::Transition};
};

/// Closed ball: a point exactly at radius distance is inside.
bool fence_contains(const Geofence& f, const GeoPoint& p);

struct ConstraintViolation {
  enum class Source { FenceState, Transition };
  Source source = Source::FenceState;
  std::size_t index = 0;  // position in the list that was checked
  std::string reason;

  friend bool operator==(const ConstraintViolation&, const ConstraintViolation&) = default;
};

/// Checks every state constraint attached to `fences` and every entry of
/// `transitions`; an empty result means all constraints are well formed.
std::vector<ConstraintViolation> validate_constraints(
    const std::vector<Geofence>& fences, const std::vector<DurationConstraint>& transitions);

std::vector<ConstraintViolation> validate_constraints(
    const std::vector<Geofence>& fences, const std::vector<TransitionRule>& transitions);

/// Radius > 0 and a well-formed state constraint; throws Error{InvalidFence}.
void validate_fence(const Geofence& f);

/// Two fences overlap when their closed disks intersect.
bool fences_overlap(const Geofence& a, const Geofence& b);

/// Public fences whose kind matches one of the user's addictions, plus every
/// fence owned by the user.
std::vector<Geofence> active_fences_for(const UserProfile& user,
                                        const std::vector<Geofence>& all);

std::string_view to_string(FenceKind k);
std::string_view to_string(ConstraintScope s);
FenceKind parse_fence_kind(std::string_view text);
ConstraintScope parse_constraint_scope(std::string_view text);

}  // namespace addictfree::geo

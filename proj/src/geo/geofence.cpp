#include "addictfree/geo/geofence.hpp"

#include <cmath>
#include <numbers>

#include "addictfree/core/error.hpp"

namespace addictfree::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool kind_matches(FenceKind kind, const std::set<Substance>& kinds) {
  switch (kind) {
    case FenceKind::AlcoholSpot: return kinds.contains(Substance::Alcohol);
    case FenceKind::TobaccoSpot: return kinds.contains(Substance::Tobacco);
    case FenceKind::Custom: return false;
  }
  return false;
}

std::string describe(const DurationConstraint& c) {
  if (!std::isfinite(c.l_min) || !std::isfinite(c.l_max)) return "bounds must be finite";
  if (c.l_min < 0.0) return "l_min must be >= 0";
  if (c.l_max <= 0.0) return "l_max must be > 0";
  if (c.applies_to == ConstraintScope::FenceState) return "l_min must be < l_max";
  return "l_min must be <= l_max";
}

}  // namespace

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dphi = (b.lat() - a.lat()) * kDegToRad;
  const double dlambda = (b.lon() - a.lon()) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

bool is_well_formed(const DurationConstraint& c) {
  if (!std::isfinite(c.l_min) || !std::isfinite(c.l_max)) return false;
  if (!(c.l_min >= 0.0) || !(c.l_max > 0.0)) return false;
  return c.applies_to == ConstraintScope::FenceState ? c.l_min < c.l_max
                                                     : c.l_min <= c.l_max;
}

bool fence_contains(const Geofence& f, const GeoPoint& p) {
  return haversine_m(f.center, p) <= f.radius_m;
}

std::vector<ConstraintViolation> validate_constraints(
    const std::vector<Geofence>& fences, const std::vector<DurationConstraint>& transitions) {
  std::vector<ConstraintViolation> out;
  for (std::size_t i = 0; i < fences.size(); ++i) {
    if (!fences[i].state_constraint) continue;
    DurationConstraint c = *fences[i].state_constraint;
    c.applies_to = ConstraintScope::FenceState;
    if (!is_well_formed(c)) {
      out.push_back({ConstraintViolation::Source::FenceState, i, describe(c)});
    }
  }
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    DurationConstraint c = transitions[i];
    c.applies_to = ConstraintScope::Transition;
    if (!is_well_formed(c)) {
      out.push_back({ConstraintViolation::Source::Transition, i, describe(c)});
    }
  }
  return out;
}

std::vector<ConstraintViolation> validate_constraints(
    const std::vector<Geofence>& fences, const std::vector<TransitionRule>& transitions) {
  std::vector<DurationConstraint> bounds;
  bounds.reserve(transitions.size());
  for (const auto& t : transitions) bounds.push_back(t.bounds);
  return validate_constraints(fences, bounds);
}

void validate_fence(const Geofence& f) {
  if (f.fence_id.empty()) throw Error(ErrorCode::InvalidFence, "fence_id must be non-empty");
  if (!std::isfinite(f.radius_m) || f.radius_m <= 0.0) {
    throw Error(ErrorCode::InvalidFence, "radius_m must be > 0");
  }
  if (auto v = validate_constraints({f}, std::vector<DurationConstraint>{}); !v.empty()) {
    throw Error(ErrorCode::InvalidFence, "state constraint: " + v.front().reason);
  }
}

bool fences_overlap(const Geofence& a, const Geofence& b) {
  return haversine_m(a.center, b.center) <= a.radius_m + b.radius_m;
}

std::vector<Geofence> active_fences_for(const UserProfile& user,
                                        const std::vector<Geofence>& all) {
  std::vector<Geofence> out;
  for (const auto& f : all) {
    if (f.is_public() ? kind_matches(f.kind, user.addiction_kinds) : *f.owner == user.user_id) {
      out.push_back(f);
    }
  }
  return out;
}

std::string_view to_string(FenceKind k) {
  switch (k) {
    case FenceKind::AlcoholSpot: return "alcohol-spot";
    case FenceKind::TobaccoSpot: return "tobacco-spot";
    case FenceKind::Custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(ConstraintScope s) {
  return s == ConstraintScope::FenceState ? "fence-state" : "transition";
}

FenceKind parse_fence_kind(std::string_view text) {
  if (text == "alcohol-spot") return FenceKind::AlcoholSpot;
  if (text == "tobacco-spot") return FenceKind::TobaccoSpot;
  if (text == "custom") return FenceKind::Custom;
  throw Error(ErrorCode::InvalidArgument, "unknown fence kind '" + std::string(text) + "'");
}

ConstraintScope parse_constraint_scope(std::string_view text) {
  if (text == "fence-state") return ConstraintScope::FenceState;
  if (text == "transition") return ConstraintScope::Transition;
  throw Error(ErrorCode::InvalidArgument, "unknown constraint scope '" + std::string(text) + "'");
}

}  // namespace addictfree::geo

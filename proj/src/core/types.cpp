#include "addictfree/core/types.hpp"

#include <cmath>

#include "addictfree/core/error.hpp"

namespace addictfree {

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0 ||
      lon < -180.0 || lon > 180.0) {
    throw Error(ErrorCode::InvalidGeoPoint, "latitude/longitude out of range");
  }
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<Enum, std::string_view> (&table)[N],
                std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum e, const std::pair<Enum, std::string_view> (&table)[N]) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "unknown";
}

constexpr std::pair<Substance, std::string_view> kSubstances[] = {
    {Substance::Alcohol, "alcohol"},
    {Substance::Tobacco, "tobacco"},
};

constexpr std::pair<RecoveryStage, std::string_view> kStages[] = {
    {RecoveryStage::ActiveUse, "active-use"},
    {RecoveryStage::EarlyRecovery, "early-recovery"},
    {RecoveryStage::SustainedRecovery, "sustained-recovery"},
    {RecoveryStage::Recovered, "recovered"},
    {RecoveryStage::Therapist, "therapist"},
};

constexpr std::pair<InterestTheme, std::string_view> kThemes[] = {
    {InterestTheme::Food, "food"},
    {InterestTheme::Fitness, "fitness"},
    {InterestTheme::Shopping, "shopping"},
    {InterestTheme::Entertainment, "entertainment"},
    {InterestTheme::Other, "other"},
};

constexpr std::pair<EventSource, std::string_view> kSources[] = {
    {EventSource::Manual, "manual"},
    {EventSource::SurveyBackfill, "survey-backfill"},
};

}  // namespace

std::string_view to_string(Substance s) { return enum_name(s, kSubstances); }
std::string_view to_string(RecoveryStage s) { return enum_name(s, kStages); }
std::string_view to_string(InterestTheme t) { return enum_name(t, kThemes); }
std::string_view to_string(EventSource s) { return enum_name(s, kSources); }

Substance parse_substance(std::string_view text) {
  return parse_enum(text, kSubstances, "substance");
}
RecoveryStage parse_recovery_stage(std::string_view text) {
  return parse_enum(text, kStages, "recovery stage");
}
InterestTheme parse_interest_theme(std::string_view text) {
  return parse_enum(text, kThemes, "interest theme");
}
EventSource parse_event_source(std::string_view text) {
  return parse_enum(text, kSources, "event source");
}

}  // namespace addictfree

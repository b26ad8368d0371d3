#include "addictfree/core/validation.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "addictfree/core/error.hpp"

namespace addictfree {

ConsumptionEvent validate_event(const ConsumptionEvent& raw, Timestamp now,
                                const UserLookup& user_exists) {
  if (user_exists && !user_exists(raw.user_id)) {
    throw Error(ErrorCode::UnknownUser, "unknown user '" + raw.user_id + "'");
  }
  if (!std::isfinite(raw.quantity) || raw.quantity < 0.0) {
    throw Error(ErrorCode::NegativeQuantity);
  }
  if (raw.substance == Substance::Tobacco && raw.quantity != std::floor(raw.quantity)) {
    throw Error(ErrorCode::FractionalCigarette);
  }
  if (raw.at > now) {
    throw Error(ErrorCode::FutureTimestamp);
  }
  ConsumptionEvent event = raw;
  // -0.0 would otherwise survive and serialize differently.
  if (event.quantity == 0.0) event.quantity = 0.0;
  return event;
}

void validate_profile(const UserProfile& profile) {
  if (profile.user_id.empty()) {
    throw Error(ErrorCode::InvalidArgument, "user_id must be non-empty");
  }
  if (profile.addiction_kinds.empty() && !profile.is_therapist()) {
    throw Error(ErrorCode::InvalidArgument, "addiction_kinds must be non-empty");
  }
  for (std::size_t i = 0; i < profile.interests.size(); ++i) {
    const auto& tag = profile.interests[i];
    if (tag.theme == InterestTheme::Other && tag.subcategory.empty()) {
      throw Error(ErrorCode::InvalidArgument, "subcategory required for theme 'other'");
    }
    if (std::find(profile.interests.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                  profile.interests.end(), tag) != profile.interests.end()) {
      throw Error(ErrorCode::DuplicateInterest);
    }
  }
  if (profile.utc_offset_minutes < -14 * 60 || profile.utc_offset_minutes > 14 * 60) {
    throw Error(ErrorCode::InvalidArgument, "utc offset out of range");
  }
}

void validate_feedback(const DailyFeedback& feedback, Timestamp now) {
  if (feedback.stress_level < 1 || feedback.stress_level > 5) {
    throw Error(ErrorCode::InvalidArgument, "stress_level must be in 1..5");
  }
  for (const auto& e : feedback.backfill_events) {
    if (e.user_id != feedback.user_id) {
      throw Error(ErrorCode::InvalidArgument, "backfill event belongs to another user");
    }
    validate_event(e, now);
  }
}

std::string pseudonym(const UserId& id, std::string_view key) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(id.data()), id.size(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "anon-";
  for (unsigned int i = 0; i < 16 && i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

GeoPoint coarsen(const GeoPoint& p) {
  // The nudge keeps values such as 0.001 (stored as 0.000999...) on their
  // intended decimal before truncation.
  auto trunc3 = [](double v) {
    double scaled = v * 1000.0;
    scaled += scaled >= 0 ? 1e-9 : -1e-9;
    return std::trunc(scaled) / 1000.0;
  };
  return GeoPoint{trunc3(p.lat()), trunc3(p.lon())};
}

ConsumptionEvent anonymize(const ConsumptionEvent& event, std::string_view key) {
  ConsumptionEvent out = event;
  out.user_id = pseudonym(event.user_id, key);
  if (out.location) out.location = coarsen(*out.location);
  return out;
}

}  // namespace addictfree

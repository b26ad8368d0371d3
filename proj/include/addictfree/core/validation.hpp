#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "addictfree/core/types.hpp"

namespace addictfree {

using UserLookup = std::function<bool(const UserId&)>;

/// Normalizes a candidate event or throws Error with one of FutureTimestamp,
/// NegativeQuantity, FractionalCigarette, UnknownUser. When `user_exists` is
/// empty the user check is skipped. Idempotent.
ConsumptionEvent validate_event(const ConsumptionEvent& raw, Timestamp now,
                                const UserLookup& user_exists = {});

/// Profile invariants: non-empty addiction kinds unless therapist, unique
/// interests, non-empty subcategory for the `other` theme.
void validate_profile(const UserProfile& profile);

/// Stress level 1..5 and backfilled events belonging to the same user.
void validate_feedback(const DailyFeedback& feedback, Timestamp now);

/// Deterministic keyed pseudonym (HMAC-SHA256, hex, 128-bit prefix).
std::string pseudonym(const UserId& id, std::string_view key);

/// Location truncated toward zero at three decimals.
GeoPoint coarsen(const GeoPoint& p);

inline constexpr std::string_view kDefaultAnonymizationKey = "addictfree-anon-v1";

ConsumptionEvent anonymize(const ConsumptionEvent& event,
                           std::string_view key = kDefaultAnonymizationKey);

}  // namespace addictfree

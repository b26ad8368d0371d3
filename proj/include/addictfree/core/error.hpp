#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace addictfree {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  Unauthorized,
  // domain validation
  FutureTimestamp,
  NegativeQuantity,
  FractionalCigarette,
  UnknownUser,
  InvalidGeoPoint,
  DuplicateInterest,
  DuplicateFeedback,
  // geofencing
  InvalidFence,
  OutOfOrderFix,
  AmbiguousFences,
  // predictor
  EmptyWindow,
  ShapeMismatch,
  EmptySequence,
  AlignmentError,
  DivergenceDetected,
  InsufficientHistory,
  DegenerateLabels,
  // community
  EmptyTitle,
  EmptyBody,
  UnknownPost,
  // store / service
  VersionConflict,
  SerializationError,
  StoreCorrupt,
  AddressInUse,
};

/// Stable machine-readable name, e.g. "future_timestamp".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  explicit Error(ErrorCode code) : Error(code, std::string(to_string(code))) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace addictfree

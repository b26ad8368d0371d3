#include "addictfree/core/error.hpp"

namespace addictfree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Unauthorized: return "unauthorized";
    case ErrorCode::FutureTimestamp: return "future_timestamp";
    case ErrorCode::NegativeQuantity: return "negative_quantity";
    case ErrorCode::FractionalCigarette: return "fractional_cigarette";
    case ErrorCode::UnknownUser: return "unknown_user";
    case ErrorCode::InvalidGeoPoint: return "invalid_geo_point";
    case ErrorCode::DuplicateInterest: return "duplicate_interest";
    case ErrorCode::DuplicateFeedback: return "duplicate_feedback";
    case ErrorCode::InvalidFence: return "invalid_fence";
    case ErrorCode::OutOfOrderFix: return "out_of_order_fix";
    case ErrorCode::AmbiguousFences: return "ambiguous_fences";
    case ErrorCode::EmptyWindow: return "empty_window";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::EmptySequence: return "empty_sequence";
    case ErrorCode::AlignmentError: return "alignment_error";
    case ErrorCode::DivergenceDetected: return "divergence_detected";
    case ErrorCode::InsufficientHistory: return "insufficient_history";
    case ErrorCode::DegenerateLabels: return "degenerate_labels";
    case ErrorCode::EmptyTitle: return "empty_title";
    case ErrorCode::EmptyBody: return "empty_body";
    case ErrorCode::UnknownPost: return "unknown_post";
    case ErrorCode::VersionConflict: return "version_conflict";
    case ErrorCode::SerializationError: return "serialization_error";
    case ErrorCode::StoreCorrupt: return "store_corrupt";
    case ErrorCode::AddressInUse: return "address_in_use";
  }
  return "unknown";
}

}  // namespace addictfree

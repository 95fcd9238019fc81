#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace inbetween {

/// Stable error codes. Every engine failure carries exactly one of these; the
/// HTTP layer and the CLI map them to status codes and exit codes.
enum class ErrorCode {
    MalformedDocument,
    PointIncompatible,
    NonAntipodalStart,
    UnknownGlyph,
    InvalidCoords,
    UnknownCategory,
    TargetNotShown,
    MaxZoom,
    ShowAllActive,
    NoFineTuneTarget,
    ValueOutOfRange,
    MalformedContour,
    SequenceGap,
    OrderViolation,
    ClosedSession,
    SessionExists,
    UnknownSession,
    CorruptRecord,
    HashMismatch,
    IllegalEvent,
    WrongInterface,
    MissingDownload,
    InsufficientTraces,
    MixedTraces,
    UnknownRoute,
    Io,
};

/// Broad class used for exit codes and HTTP status mapping.
enum class ErrorClass { Validation, NotFound, Conflict, Io };

inline std::string_view code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedDocument: return "malformed_document";
    case ErrorCode::PointIncompatible: return "point_incompatible";
    case ErrorCode::NonAntipodalStart: return "non_antipodal_start";
    case ErrorCode::UnknownGlyph: return "unknown_glyph";
    case ErrorCode::InvalidCoords: return "invalid_coords";
    case ErrorCode::UnknownCategory: return "unknown_category";
    case ErrorCode::TargetNotShown: return "target_not_shown";
    case ErrorCode::MaxZoom: return "max_zoom";
    case ErrorCode::ShowAllActive: return "show_all_active";
    case ErrorCode::NoFineTuneTarget: return "no_fine_tune_target";
    case ErrorCode::ValueOutOfRange: return "value_out_of_range";
    case ErrorCode::MalformedContour: return "malformed_contour";
    case ErrorCode::SequenceGap: return "sequence_gap";
    case ErrorCode::OrderViolation: return "order_violation";
    case ErrorCode::ClosedSession: return "closed_session";
    case ErrorCode::SessionExists: return "session_exists";
    case ErrorCode::UnknownSession: return "unknown_session";
    case ErrorCode::CorruptRecord: return "corrupt_record";
    case ErrorCode::HashMismatch: return "hash_mismatch";
    case ErrorCode::IllegalEvent: return "illegal_event";
    case ErrorCode::WrongInterface: return "wrong_interface";
    case ErrorCode::MissingDownload: return "missing_download";
    case ErrorCode::InsufficientTraces: return "insufficient_traces";
    case ErrorCode::MixedTraces: return "mixed_traces";
    case ErrorCode::UnknownRoute: return "unknown_route";
    case ErrorCode::Io: return "io_error";
    }
    return "unknown";
}

inline constexpr ErrorCode kAllErrorCodes[] = {
    ErrorCode::MalformedDocument, ErrorCode::PointIncompatible, ErrorCode::NonAntipodalStart, ErrorCode::UnknownGlyph,
    ErrorCode::InvalidCoords,     ErrorCode::UnknownCategory,   ErrorCode::TargetNotShown,    ErrorCode::MaxZoom,
    ErrorCode::ShowAllActive,     ErrorCode::NoFineTuneTarget,  ErrorCode::ValueOutOfRange,   ErrorCode::MalformedContour,
    ErrorCode::SequenceGap,       ErrorCode::OrderViolation,    ErrorCode::ClosedSession,     ErrorCode::SessionExists,
    ErrorCode::UnknownSession,    ErrorCode::CorruptRecord,     ErrorCode::HashMismatch,      ErrorCode::IllegalEvent,
    ErrorCode::WrongInterface,    ErrorCode::MissingDownload,   ErrorCode::InsufficientTraces, ErrorCode::MixedTraces,
    ErrorCode::UnknownRoute,      ErrorCode::Io,
};

inline ErrorClass error_class(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownGlyph:
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownRoute:
        return ErrorClass::NotFound;
    case ErrorCode::SequenceGap:
    case ErrorCode::OrderViolation:
    case ErrorCode::ClosedSession:
    case ErrorCode::SessionExists:
        return ErrorClass::Conflict;
    case ErrorCode::Io:
        return ErrorClass::Io;
    default:
        return ErrorClass::Validation;
    }
}

/// CLI exit status: 2 for validation-type failures, 1 for I/O.
inline int exit_code(ErrorCode code) { return error_class(code) == ErrorClass::Io ? 1 : 2; }

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json detail = nullptr)
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    nlohmann::json detail_;
};

} // namespace inbetween

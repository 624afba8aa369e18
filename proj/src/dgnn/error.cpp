#include "dgnn/error.hpp"

namespace dgnn {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::RowPtrNotMonotone: return "RowPtrNotMonotone";
    case ErrorCode::ColIdxOutOfRange: return "ColIdxOutOfRange";
    case ErrorCode::ColIdxNotAscending: return "ColIdxNotAscending";
    case ErrorCode::RenumberNotBijective: return "RenumberNotBijective";
    case ErrorCode::EmbedShapeMismatch: return "EmbedShapeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyEdgeList: return "EmptyEdgeList";
    case ErrorCode::EndpointNotInTable: return "EndpointNotInTable";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingTensor: return "MissingTensor";
    case ErrorCode::IncompatibleExecutor: return "IncompatibleExecutor";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::ShapeOverflow: return "ShapeOverflow";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::DuplicateTensor: return "DuplicateTensor";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace dgnn

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dgnn {

enum class ErrorCode {
    Ok = 0,
    // structural validation
    RowPtrNotMonotone,
    ColIdxOutOfRange,
    ColIdxNotAscending,
    RenumberNotBijective,
    EmbedShapeMismatch,
    NonFiniteValue,
    // preprocessing
    EmptyEdgeList,
    EndpointNotInTable,
    // kernels / models / executors
    ShapeMismatch,
    MissingTensor,
    IncompatibleExecutor,
    // input files
    ParseError,
    MissingColumn,
    EmptyFile,
    IoError,
    BadMagic,
    VersionMismatch,
    TruncatedFile,
    ShapeOverflow,
    TrailingData,
    DuplicateTensor,
    InvalidArgument,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Every failure in the core
/// library is reported through this type; the C API maps it to a status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace dgnn

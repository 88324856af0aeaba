#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uvforge {

enum class ErrorCode {
    FileNotFound,
    DecodeError,
    DimensionBound,
    ParseError,
    SchemaError,
    DuplicateName,
    DuplicateColor,
    ColorsTooClose,
    UnknownPart,
    EmptyRegion,
    DimensionMismatch,
    EmptyFillImage,
    EmptyLogo,
    NonPositiveScale,
    ResolveError,
    GarmentMismatch,
    InvalidRequest,
    ProviderTimeout,
    ProviderError,
    CacheIoError,
    ValidationFailed,
    DuplicateGarment,
    StoreIoError,
    NotFound,
    StoreBusy,
    EmptyRecipe,
};

/// Stable snake_case name used in JSON error bodies and CLI diagnostics.
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. `detail` carries
/// secondary context (HTTP status, JSON path, embedded report); `op_index`
/// is set when the failure happened inside a recipe.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

    std::optional<std::size_t> op_index() const noexcept { return op_index_; }
    Error with_op_index(std::size_t index) const {
        Error copy = *this;
        copy.op_index_ = index;
        return copy;
    }

private:
    ErrorCode code_;
    std::string detail_;
    std::optional<std::size_t> op_index_;
};

}  // namespace uvforge

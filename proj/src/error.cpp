#include "uvforge/error.hpp"

namespace uvforge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileNotFound: return "file_not_found";
        case ErrorCode::DecodeError: return "decode_error";
        case ErrorCode::DimensionBound: return "dimension_bound";
        case ErrorCode::ParseError: return "parse_error";
        case ErrorCode::SchemaError: return "schema_error";
        case ErrorCode::DuplicateName: return "duplicate_name";
        case ErrorCode::DuplicateColor: return "duplicate_color";
        case ErrorCode::ColorsTooClose: return "colors_too_close";
        case ErrorCode::UnknownPart: return "unknown_part";
        case ErrorCode::EmptyRegion: return "empty_region";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::EmptyFillImage: return "empty_fill_image";
        case ErrorCode::EmptyLogo: return "empty_logo";
        case ErrorCode::NonPositiveScale: return "non_positive_scale";
        case ErrorCode::ResolveError: return "resolve_error";
        case ErrorCode::GarmentMismatch: return "garment_mismatch";
        case ErrorCode::InvalidRequest: return "invalid_request";
        case ErrorCode::ProviderTimeout: return "provider_timeout";
        case ErrorCode::ProviderError: return "provider_error";
        case ErrorCode::CacheIoError: return "cache_io_error";
        case ErrorCode::ValidationFailed: return "validation_failed";
        case ErrorCode::DuplicateGarment: return "duplicate_garment";
        case ErrorCode::StoreIoError: return "store_io_error";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::StoreBusy: return "store_busy";
        case ErrorCode::EmptyRecipe: return "empty_recipe";
    }
    return "unknown";
}

}  // namespace uvforge

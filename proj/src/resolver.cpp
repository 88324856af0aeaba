#include "uvforge/digest.hpp"
#include "uvforge/edit.hpp"
#include "uvforge/error.hpp"

namespace fs = std::filesystem;

namespace uvforge {

StandardResolver::StandardResolver(std::shared_ptr<ImageProvider> provider, fs::path asset_root,
                                   fs::path cache_dir)
    : provider_(std::move(provider)),
      asset_root_(std::move(asset_root)),
      cache_dir_(std::move(cache_dir)) {}

namespace {

TextureAtlas resolve_asset(const fs::path& root, const std::string& relative) {
    const fs::path rel = fs::path(relative).lexically_normal();
    if (rel.empty() || rel.is_absolute() || *rel.begin() == "..") {
        throw Error(ErrorCode::ResolveError, "asset path escapes the asset root: " + relative);
    }
    try {
        return load_atlas(root / rel);
    } catch (const Error& e) {
        throw Error(ErrorCode::ResolveError, std::string("asset: ") + e.what(),
                    std::string(to_string(e.code())));
    }
}

}  // namespace

TextureAtlas StandardResolver::resolve(const ImageRef& ref) {
    if (const auto* generated = std::get_if<GeneratedImage>(&ref)) {
        if (!provider_) throw Error(ErrorCode::ResolveError, "no image provider configured");
        if (cache_dir_.empty()) return generate(*provider_, generated->request).image;
        return cached_resolve(cache_dir_, *provider_, generated->request).image;
    }
    if (const auto* inline_image = std::get_if<InlineImage>(&ref)) {
        if (sha256_hex(inline_image->png) != inline_image->sha256) {
            throw Error(ErrorCode::ResolveError, "inline image digest mismatch");
        }
        try {
            return decode_png(inline_image->png);
        } catch (const Error& e) {
            throw Error(ErrorCode::ResolveError, std::string("inline image: ") + e.what());
        }
    }
    return resolve_asset(asset_root_, std::get<AssetImage>(ref).path);
}

}  // namespace uvforge

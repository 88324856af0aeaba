#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "uvforge/error.hpp"
#include "uvforge/gen.hpp"
#include "uvforge/wardrobe.hpp"

namespace httplib {
class Server;
}

namespace uvforge {

struct ServiceConfig {
    std::filesystem::path store_root;
    /// Kept outside the store by default so previews leave the store tree
    /// untouched. Empty disables caching.
    std::filesystem::path cache_dir;
    /// Root for AssetImage references.
    std::filesystem::path asset_root;
    /// Optional directory served at / (the browser editor build).
    std::filesystem::path ui_dir;
    std::shared_ptr<ImageProvider> provider;
};

/// HTTP status for a library error code.
int http_status_for(ErrorCode code);

/// JSON API over a wardrobe store. Routes:
///   GET    /v1/garments
///   GET    /v1/garments/{id}/mask-overlay
///   GET    /v1/garments/{id}/part-map
///   POST   /v1/garments/{id}/preview
///   POST   /v1/generate
///   POST   /v1/wardrobe
///   GET    /v1/wardrobe
///   GET    /v1/wardrobe/{id}
///   GET    /v1/wardrobe/{id}/texture
///   DELETE /v1/wardrobe/{id}
/// Errors are {code, message, detail?}.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Returns the bound port (useful with port 0). Throws StoreIoError if
    /// binding fails.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

    httplib::Server& server() { return *server_; }

private:
    void install_routes();
    std::shared_ptr<const Garment> garment(const std::string& id);

    ServiceConfig config_;
    WardrobeStore store_;
    std::unique_ptr<httplib::Server> server_;
    std::mutex garments_mutex_;
    std::unordered_map<std::string, std::shared_ptr<const Garment>> garments_;
};

/// Overlay image: labeled pixels mixed with their label color at
/// coverage x 1/2; background pixels unchanged.
TextureAtlas mask_overlay(const Garment& garment);

/// Part lookup image for click picking: R = label id + 1 (0 = background),
/// G = B = 0, A = 255.
TextureAtlas part_map(const Garment& garment);

}  // namespace uvforge

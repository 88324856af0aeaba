#include "uvforge/service.hpp"

#include <httplib.h>

#include "uvforge/digest.hpp"
#include "uvforge/error.hpp"

using nlohmann::json;

namespace uvforge {

int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::StoreBusy: return 409;
        case ErrorCode::ProviderError:
        case ErrorCode::DimensionMismatch: return 502;
        case ErrorCode::ProviderTimeout: return 504;
        case ErrorCode::StoreIoError:
        case ErrorCode::CacheIoError:
        case ErrorCode::FileNotFound: return 500;
        default: return 400;
    }
}

TextureAtlas mask_overlay(const Garment& garment) {
    TextureAtlas out = garment.atlas;
    const PartMaskIndex& index = garment.index;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const std::uint16_t label = index.label(x, y);
            if (label == kBackground) continue;
            Rgba8& px = out.at(x, y);
            const Fraction t = Fraction::from_byte(index.coverage(x, y)) * Fraction{1, 2};
            const Rgb8 mixed = mix(px.rgb(), garment.registry.label(label).color, t);
            px = {mixed.r, mixed.g, mixed.b, px.a};
        }
    }
    return out;
}

TextureAtlas part_map(const Garment& garment) {
    TextureAtlas out(garment.index.width(), garment.index.height(), Rgba8{0, 0, 0, 255});
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const std::uint16_t label = garment.index.label(x, y);
            if (label != kBackground) out.at(x, y).r = static_cast<std::uint8_t>(label + 1);
        }
    }
    return out;
}

namespace {

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::string& detail = {}) {
    json body = {{"code", code}, {"message", message}};
    if (!detail.empty()) body["detail"] = detail;
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
    std::string detail = e.detail();
    if (e.op_index()) {
        detail = detail.empty() ? "op " + std::to_string(*e.op_index())
                                : "op " + std::to_string(*e.op_index()) + ": " + detail;
    }
    send_error(res, http_status_for(e.code()), to_string(e.code()), e.what(), detail);
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_png(const httplib::Request& req, httplib::Response& res, std::vector<std::uint8_t> png) {
    const std::string etag = "\"" + sha256_hex(png) + "\"";
    res.set_header("ETag", etag);
    if (req.get_header_value("If-None-Match") == etag) {
        res.status = 304;
        return;
    }
    res.status = 200;
    res.set_content(std::string(png.begin(), png.end()), "image/png");
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
    }
}

// Runs a handler, translating library errors into the shared error body.
template <typename F>
httplib::Server::Handler guarded(F body) {
    return [body](const httplib::Request& req, httplib::Response& res) {
        try {
            body(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const json::exception& e) {
            send_error(res, 400, "schema_error", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      store_(config_.store_root),
      server_(std::make_unique<httplib::Server>()) {
    if (!config_.provider) config_.provider = std::make_shared<MockProvider>();
    install_routes();
}

Service::~Service() { stop(); }

std::shared_ptr<const Garment> Service::garment(const std::string& id) {
    {
        std::lock_guard lock(garments_mutex_);
        if (auto it = garments_.find(id); it != garments_.end()) return it->second;
    }
    // Installed garments never change, so a loaded copy stays valid.
    auto loaded = std::make_shared<const Garment>(store_.load_garment(id));
    std::lock_guard lock(garments_mutex_);
    return garments_.emplace(id, std::move(loaded)).first->second;
}

void Service::install_routes() {
    httplib::Server& srv = *server_;

    srv.Get("/v1/garments", guarded([this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const GarmentSummary& g : store_.list_garments()) out.push_back(to_json(g));
        send_json(res, out);
    }));

    srv.Get(R"(/v1/garments/([^/]+)/mask-overlay)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_png(req, res, encode_png(mask_overlay(*garment(req.matches[1]))));
            }));

    srv.Get(R"(/v1/garments/([^/]+)/part-map)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_png(req, res, encode_png(part_map(*garment(req.matches[1]))));
            }));

    srv.Post(R"(/v1/garments/([^/]+)/preview)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto g = garment(req.matches[1]);
                 const Recipe recipe = recipe_from_json(parse_body(req));
                 StandardResolver resolver(config_.provider, config_.asset_root, config_.cache_dir);
                 const TextureAtlas out = apply_recipe(*g, g->atlas, recipe, resolver);
                 res.set_header("X-Texture-Digest", pixel_digest(out));
                 send_png(req, res, encode_png(out));
             }));

    srv.Post("/v1/generate", guarded([this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::InvalidRequest, std::string("request body: ") + e.what());
        }
        const GenRequest request = gen_request_from_json(body);
        const GenResult result = config_.cache_dir.empty()
                                     ? generate(*config_.provider, request)
                                     : cached_resolve(config_.cache_dir, *config_.provider, request);
        send_json(res, {{"image_b64", base64_encode(encode_png(result.image))},
                        {"request_digest", result.request_digest},
                        {"provider_id", result.provider_id}});
    }));

    srv.Post("/v1/wardrobe", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        if (!body.is_object()) throw Error(ErrorCode::SchemaError, "body must be an object");
        for (const auto& [key, value] : body.items()) {
            if (key != "recipe" && key != "title") {
                throw Error(ErrorCode::SchemaError, "unknown field '" + key + "'", "/" + key);
            }
        }
        if (!body.contains("recipe")) throw Error(ErrorCode::SchemaError, "missing recipe", "/recipe");
        std::string title;
        if (body.contains("title")) {
            if (!body["title"].is_string()) throw Error(ErrorCode::SchemaError, "title must be a string", "/title");
            title = body["title"].get<std::string>();
        }
        Recipe recipe;
        try {
            recipe = recipe_from_json(body["recipe"]);
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), "/recipe" + e.detail());
        }
        StandardResolver resolver(config_.provider, config_.asset_root, config_.cache_dir);
        send_json(res, to_json(store_.save_outfit(recipe, title, resolver)), 201);
    }));

    srv.Get("/v1/wardrobe", guarded([this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const OutfitSummary& s : store_.list_outfits()) out.push_back(to_json(s));
        send_json(res, out);
    }));

    srv.Get(R"(/v1/wardrobe/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, to_json(store_.load_outfit(req.matches[1])));
    }));

    srv.Get(R"(/v1/wardrobe/([^/]+)/texture)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_png(req, res, read_file(store_.texture_path(req.matches[1])));
            }));

    srv.Delete(R"(/v1/wardrobe/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                   store_.delete_outfit(req.matches[1]);
                   res.status = 204;
               }));

    if (!config_.ui_dir.empty()) srv.set_mount_point("/", config_.ui_dir.string());
}

int Service::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
    } else if (!server_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw Error(ErrorCode::StoreIoError, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
    if (server_) server_->stop();
}

}  // namespace uvforge

#include <httplib.h>

#include "uvforge/digest.hpp"
#include "uvforge/error.hpp"
#include "uvforge/gen.hpp"

using nlohmann::json;

namespace uvforge {

namespace {

struct Endpoint {
    std::string scheme_host_port;
    std::string path_prefix;
};

Endpoint split_base_url(const std::string& base_url) {
    constexpr std::string_view kScheme = "http://";
    if (base_url.compare(0, kScheme.size(), kScheme) != 0) {
        throw Error(ErrorCode::ProviderError, "generation endpoint must be an http:// URL: " + base_url);
    }
    const auto slash = base_url.find('/', kScheme.size());
    Endpoint endpoint;
    endpoint.scheme_host_port = base_url.substr(0, slash);
    if (slash != std::string::npos) {
        endpoint.path_prefix = base_url.substr(slash);
        while (!endpoint.path_prefix.empty() && endpoint.path_prefix.back() == '/') {
            endpoint.path_prefix.pop_back();
        }
    }
    return endpoint;
}

}  // namespace

GenResult remote_generate(const RemoteConfig& config, const GenRequest& request) {
    validate_request(request);
    const Endpoint endpoint = split_base_url(config.base_url);

    httplib::Client client(endpoint.scheme_host_port);
    const auto sec = static_cast<time_t>(config.timeout_ms / 1000);
    const auto usec = static_cast<time_t>((config.timeout_ms % 1000) * 1000);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    httplib::Headers headers;
    if (!config.token.empty()) headers.emplace("Authorization", "Bearer " + config.token);

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(endpoint.path_prefix + "/v1/generate", headers, to_json(request).dump(),
                           "application/json");
    if (!res) {
        const httplib::Error err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
            throw Error(ErrorCode::ProviderTimeout,
                        "generation backend did not answer within " +
                            std::to_string(config.timeout_ms) + " ms");
        }
        throw Error(ErrorCode::ProviderError, "generation backend unreachable: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::ProviderError,
                    "generation backend returned HTTP " + std::to_string(res->status),
                    std::to_string(res->status));
    }

    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error&) {
        throw Error(ErrorCode::ProviderError, "generation backend returned malformed JSON");
    }
    if (!body.is_object() || !body.contains("image_b64") || !body["image_b64"].is_string()) {
        throw Error(ErrorCode::ProviderError, "generation backend response lacks image_b64");
    }
    GenResult result;
    try {
        result.image = decode_png(base64_decode(body["image_b64"].get<std::string>()));
    } catch (const Error& e) {
        throw Error(ErrorCode::ProviderError, std::string("generation backend image: ") + e.what());
    }
    if (result.image.width() != request.width || result.image.height() != request.height) {
        throw Error(ErrorCode::DimensionMismatch,
                    "backend returned " + std::to_string(result.image.width()) + "x" +
                        std::to_string(result.image.height()) + " for a " +
                        std::to_string(request.width) + "x" + std::to_string(request.height) +
                        " request");
    }
    if (body.contains("provider_id") && body["provider_id"].is_string()) {
        result.provider_id = body["provider_id"].get<std::string>();
    } else {
        result.provider_id = "remote";
    }
    result.request_digest = cache_key(request);
    result.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    return result;
}

}  // namespace uvforge

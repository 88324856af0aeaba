#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "uvforge/atlas.hpp"

namespace uvforge {

enum class Style { Cartoon, Aesthetic, Scenic, None };

std::string_view to_string(Style style);
/// Throws InvalidRequest for anything outside the enum.
Style parse_style(std::string_view text);

struct GenRequest {
    std::string prompt;
    Style style = Style::None;
    int width = 512;
    int height = 512;
    std::uint64_t seed = 0;

    friend bool operator==(const GenRequest&, const GenRequest&) = default;
};

inline constexpr int kMinGenSide = 64;
inline constexpr int kMaxGenSide = 2048;
inline constexpr std::size_t kMaxPromptChars = 500;

/// Prompt 1..500 code points and non-blank; sides 64..2048 and multiples
/// of 8. Throws InvalidRequest.
void validate_request(const GenRequest& request);

/// Strict: all five fields required, unknown fields rejected. Throws
/// InvalidRequest.
GenRequest gen_request_from_json(const nlohmann::json& json);
nlohmann::json to_json(const GenRequest& request);

/// Serialization hashed by cache_key: compact JSON with members in the
/// order prompt, style, width, height, seed.
std::string canonical_request(const GenRequest& request);
/// SHA-256 of canonical_request, 64 lowercase hex chars.
std::string cache_key(const GenRequest& request);

struct GenResult {
    TextureAtlas image;
    std::string provider_id;
    std::string request_digest;
    std::int64_t elapsed_ms = 0;
};

class ImageProvider {
public:
    virtual ~ImageProvider() = default;
    virtual std::string id() const = 0;
    /// Implementations may assume a validated request. Must be safe for
    /// concurrent calls.
    virtual GenResult generate(const GenRequest& request) = 0;
};

/// Validates, calls the provider, checks output dimensions (throws
/// DimensionMismatch), and fills request_digest and elapsed_ms.
GenResult generate(ImageProvider& provider, const GenRequest& request);

// ---- deterministic offline generator -------------------------------------

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffsetBasis);

/// Reference splitmix64 (Steele, Lea, Flood): state advances by the golden
/// gamma and each output is the variant-13 finalizer of the new state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_;
};

enum class MockPattern { Stripes = 0, Checker = 1, Gradient = 2, ValueNoise = 3 };

/// FNV-1a 64 over: prompt bytes, 0x00, style name, 0x00, seed as 8
/// little-endian bytes.
std::uint64_t mock_hash(const GenRequest& request);

struct MockPlan {
    std::uint64_t hash = 0;
    MockPattern pattern = MockPattern::Stripes;
    Rgb8 palette[3];
    /// Fourth stream draw; sets band/cell size or gradient axis.
    std::uint64_t param = 0;
};

MockPlan mock_plan(const GenRequest& request);

/// Pure function of the request. Throws InvalidRequest.
GenResult mock_generate(const GenRequest& request);

class MockProvider final : public ImageProvider {
public:
    std::string id() const override { return "mock"; }
    GenResult generate(const GenRequest& request) override { return mock_generate(request); }
};

// ---- remote HTTP backend -------------------------------------------------

inline constexpr int kDefaultGenTimeoutMs = 60'000;
inline constexpr const char* kGenTokenEnv = "UVFORGE_GEN_TOKEN";

struct RemoteConfig {
    /// http://host[:port][/prefix]; requests go to {base_url}/v1/generate.
    std::string base_url;
    int timeout_ms = kDefaultGenTimeoutMs;
    /// Bearer token; empty means no Authorization header.
    std::string token;

    /// Token taken from UVFORGE_GEN_TOKEN when set.
    static RemoteConfig from_env(std::string base_url, int timeout_ms = kDefaultGenTimeoutMs);
};

/// Throws ProviderTimeout; ProviderError on transport failure, non-2xx
/// status (detail holds the status) or a malformed body; DimensionMismatch
/// when the backend returns the wrong size.
GenResult remote_generate(const RemoteConfig& config, const GenRequest& request);

class RemoteProvider final : public ImageProvider {
public:
    explicit RemoteProvider(RemoteConfig config) : config_(std::move(config)) {}
    std::string id() const override { return "remote:" + config_.base_url; }
    GenResult generate(const GenRequest& request) override {
        return remote_generate(config_, request);
    }

private:
    RemoteConfig config_;
};

// ---- content-addressed cache ---------------------------------------------

/// {cache_dir}/{cache_key}.png. Hits skip the provider; unreadable or
/// wrong-sized entries count as misses and are overwritten.
GenResult cached_resolve(const std::filesystem::path& cache_dir, ImageProvider& provider,
                         const GenRequest& request);

std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                 const GenRequest& request);

}  // namespace uvforge

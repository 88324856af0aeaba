#include "uvforge/gen.hpp"

#include <algorithm>
#include <cstdlib>

#include "uvforge/digest.hpp"
#include "uvforge/error.hpp"
#include "uvforge/fileio.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace uvforge {

std::string_view to_string(Style style) {
    switch (style) {
        case Style::Cartoon: return "cartoon";
        case Style::Aesthetic: return "aesthetic";
        case Style::Scenic: return "scenic";
        case Style::None: return "none";
    }
    return "none";
}

Style parse_style(std::string_view text) {
    for (Style s : {Style::Cartoon, Style::Aesthetic, Style::Scenic, Style::None}) {
        if (text == to_string(s)) return s;
    }
    throw Error(ErrorCode::InvalidRequest, "unknown style '" + std::string(text) + "'", "style");
}

namespace {

std::size_t utf8_code_points(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    });
}

void check_side(int v, const char* name) {
    if (v < kMinGenSide || v > kMaxGenSide || v % 8 != 0) {
        throw Error(ErrorCode::InvalidRequest,
                    std::string(name) + " must be a multiple of 8 in [64, 2048], got " +
                        std::to_string(v),
                    name);
    }
}

}  // namespace

void validate_request(const GenRequest& request) {
    if (is_blank(request.prompt)) {
        throw Error(ErrorCode::InvalidRequest, "prompt must be non-empty", "prompt");
    }
    if (utf8_code_points(request.prompt) > kMaxPromptChars) {
        throw Error(ErrorCode::InvalidRequest, "prompt longer than 500 characters", "prompt");
    }
    check_side(request.width, "width");
    check_side(request.height, "height");
}

GenRequest gen_request_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::InvalidRequest, "request must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "prompt" && key != "style" && key != "width" && key != "height" && key != "seed") {
            throw Error(ErrorCode::InvalidRequest, "unknown field '" + key + "'", key);
        }
    }
    const auto field = [&](const char* key) -> const json& {
        const auto it = doc.find(key);
        if (it == doc.end()) {
            throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + key + "'", key);
        }
        return *it;
    };
    const auto side = [&](const char* key) {
        const json& v = field(key);
        if (!v.is_number_integer()) {
            throw Error(ErrorCode::InvalidRequest, std::string(key) + " must be an integer", key);
        }
        const auto n = v.get<std::int64_t>();
        if (n < 0 || n > kMaxGenSide) {
            throw Error(ErrorCode::InvalidRequest,
                        std::string(key) + " must be a multiple of 8 in [64, 2048]", key);
        }
        return static_cast<int>(n);
    };

    GenRequest request;
    const json& prompt = field("prompt");
    if (!prompt.is_string()) throw Error(ErrorCode::InvalidRequest, "prompt must be a string", "prompt");
    request.prompt = prompt.get<std::string>();
    const json& style = field("style");
    if (!style.is_string()) throw Error(ErrorCode::InvalidRequest, "style must be a string", "style");
    request.style = parse_style(style.get<std::string>());
    request.width = side("width");
    request.height = side("height");
    const json& seed = field("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        throw Error(ErrorCode::InvalidRequest, "seed must be a non-negative integer", "seed");
    }
    request.seed = seed.get<std::uint64_t>();
    validate_request(request);
    return request;
}

json to_json(const GenRequest& request) {
    return json{{"prompt", request.prompt},
                {"style", to_string(request.style)},
                {"width", request.width},
                {"height", request.height},
                {"seed", request.seed}};
}

std::string canonical_request(const GenRequest& request) {
    ordered_json doc;
    doc["prompt"] = request.prompt;
    doc["style"] = to_string(request.style);
    doc["width"] = request.width;
    doc["height"] = request.height;
    doc["seed"] = request.seed;
    return doc.dump();
}

std::string cache_key(const GenRequest& request) { return sha256_hex(canonical_request(request)); }

GenResult generate(ImageProvider& provider, const GenRequest& request) {
    validate_request(request);
    const auto start = std::chrono::steady_clock::now();
    GenResult result = provider.generate(request);
    if (result.image.width() != request.width || result.image.height() != request.height) {
        throw Error(ErrorCode::DimensionMismatch,
                    "provider returned " + std::to_string(result.image.width()) + "x" +
                        std::to_string(result.image.height()) + " for a " +
                        std::to_string(request.width) + "x" + std::to_string(request.height) +
                        " request");
    }
    if (result.provider_id.empty()) result.provider_id = provider.id();
    result.request_digest = cache_key(request);
    result.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return result;
}

// ---- mock ---------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
    for (char c : bytes) {
        state ^= static_cast<unsigned char>(c);
        state *= kFnvPrime;
    }
    return state;
}

std::uint64_t SplitMix64::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
}

std::uint64_t mock_hash(const GenRequest& request) {
    std::string buf = request.prompt;
    buf.push_back('\0');
    buf.append(to_string(request.style));
    buf.push_back('\0');
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((request.seed >> (8 * i)) & 0xFF));
    return fnv1a64(buf);
}

MockPlan mock_plan(const GenRequest& request) {
    MockPlan plan;
    plan.hash = mock_hash(request);
    plan.pattern = static_cast<MockPattern>(plan.hash % 4);
    SplitMix64 rng(plan.hash);
    for (Rgb8& color : plan.palette) {
        const std::uint64_t v = rng.next();
        color = {static_cast<std::uint8_t>(v & 0xFF), static_cast<std::uint8_t>((v >> 8) & 0xFF),
                 static_cast<std::uint8_t>((v >> 16) & 0xFF)};
    }
    plan.param = rng.next();
    return plan;
}

namespace {

std::uint8_t lerp_byte(std::uint8_t a, std::uint8_t b, std::uint64_t i, std::uint64_t n) {
    // (a*(n-i) + b*i + n/2) / n, all integer.
    return static_cast<std::uint8_t>((a * (n - i) + b * i + n / 2) / n);
}

Rgb8 lerp_color(Rgb8 a, Rgb8 b, std::uint64_t i, std::uint64_t n) {
    return {lerp_byte(a.r, b.r, i, n), lerp_byte(a.g, b.g, i, n), lerp_byte(a.b, b.b, i, n)};
}

std::uint64_t lattice_value(std::uint64_t hash, std::uint64_t i, std::uint64_t j) {
    return SplitMix64::mix(hash ^ (i * 0x9e3779b97f4a7c15ULL) ^ (j * 0xc2b2ae3d27d4eb4fULL)) >> 56;
}

}  // namespace

GenResult mock_generate(const GenRequest& request) {
    validate_request(request);
    const MockPlan plan = mock_plan(request);
    const int w = request.width;
    const int h = request.height;
    TextureAtlas image(w, h);
    const auto& p = plan.palette;

    const auto put = [&image](int x, int y, Rgb8 c) { image.at(x, y) = {c.r, c.g, c.b, 255}; };
    switch (plan.pattern) {
        case MockPattern::Stripes: {
            const int band = 4 + static_cast<int>(plan.param % 29);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) put(x, y, p[(y / band) % 3]);
            break;
        }
        case MockPattern::Checker: {
            const int cell = 4 + static_cast<int>(plan.param % 29);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) put(x, y, p[((x / cell) + (y / cell)) % 2]);
            break;
        }
        case MockPattern::Gradient: {
            const bool vertical = (plan.param & 1) != 0;
            const std::uint64_t n = static_cast<std::uint64_t>(vertical ? h : w) - 1;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    put(x, y, lerp_color(p[0], p[1], static_cast<std::uint64_t>(vertical ? y : x), n));
            break;
        }
        case MockPattern::ValueNoise: {
            const std::uint64_t cell = 8 + plan.param % 25;
            const std::uint64_t area = cell * cell;
            for (int y = 0; y < h; ++y) {
                const std::uint64_t j = static_cast<std::uint64_t>(y) / cell;
                const std::uint64_t fy = static_cast<std::uint64_t>(y) % cell;
                for (int x = 0; x < w; ++x) {
                    const std::uint64_t i = static_cast<std::uint64_t>(x) / cell;
                    const std::uint64_t fx = static_cast<std::uint64_t>(x) % cell;
                    const std::uint64_t v00 = lattice_value(plan.hash, i, j);
                    const std::uint64_t v10 = lattice_value(plan.hash, i + 1, j);
                    const std::uint64_t v01 = lattice_value(plan.hash, i, j + 1);
                    const std::uint64_t v11 = lattice_value(plan.hash, i + 1, j + 1);
                    const std::uint64_t v = (v00 * (cell - fx) * (cell - fy) + v10 * fx * (cell - fy) +
                                             v01 * (cell - fx) * fy + v11 * fx * fy) /
                                            area;
                    put(x, y, lerp_color(p[1], p[2], v, 255));
                }
            }
            break;
        }
    }
    GenResult result;
    result.image = std::move(image);
    result.provider_id = "mock";
    result.request_digest = cache_key(request);
    return result;
}

// ---- cache --------------------------------------------------------------------

std::filesystem::path cache_path(const std::filesystem::path& cache_dir, const GenRequest& request) {
    return cache_dir / (cache_key(request) + ".png");
}

GenResult cached_resolve(const std::filesystem::path& cache_dir, ImageProvider& provider,
                         const GenRequest& request) {
    validate_request(request);
    const auto path = cache_path(cache_dir, request);
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) {
        try {
            TextureAtlas image = decode_png(read_file(path));
            if (image.width() == request.width && image.height() == request.height) {
                return GenResult{std::move(image), provider.id(), cache_key(request), 0};
            }
        } catch (const Error&) {
            // Corrupt entry: regenerate below and overwrite.
        }
    }
    GenResult result = generate(provider, request);
    try {
        std::filesystem::create_directories(cache_dir);
        write_file_atomic(path, encode_png(result.image));
    } catch (const std::filesystem::filesystem_error& e) {
        throw Error(ErrorCode::CacheIoError, std::string("cache: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::CacheIoError, std::string("cache: ") + e.what());
    }
    return result;
}

RemoteConfig RemoteConfig::from_env(std::string base_url, int timeout_ms) {
    RemoteConfig config;
    config.base_url = std::move(base_url);
    config.timeout_ms = timeout_ms;
    if (const char* token = std::getenv(kGenTokenEnv)) config.token = token;
    return config;
}

}  // namespace uvforge
